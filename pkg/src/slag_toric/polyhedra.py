"""Exact double description for rational cones and polyhedra.

Desk scale only: adjacency is decided by the algebraic rank test, which is
quadratic in the number of intermediate rays per inequality.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .lattice import dot, hermite_normal_form, primitive_int, rank


def _prim(v) -> tuple[int, ...]:
    return primitive_int(v)


def _axpy(r, c, l0):
    return tuple(x - c * y for x, y in zip(r, l0))


def cone_dd(ineqs: Sequence[Sequence], dim: int) -> tuple[list[tuple[int, ...]], list[tuple[int, ...]]]:
    """Generators of ``{x in R^dim : a . x >= 0 for a in ineqs}``.

    Returns ``(rays, lineality)``: primitive integer extreme rays (modulo the
    lineality space) and an HNF basis of the lineality space.
    """
    ineqs = [tuple(Fraction(x) for x in a) for a in ineqs]
    lin: list[tuple] = [tuple(int(i == j) for j in range(dim)) for i in range(dim)]
    rays: list[tuple] = []
    done: list[tuple] = []
    for a in ineqs:
        vals = [dot(a, l) for l in lin]
        k = next((i for i, v in enumerate(vals) if v != 0), None)
        if k is not None:
            l0, s = lin[k], vals[k]
            if s < 0:
                l0, s = tuple(-x for x in l0), -s
            lin = [_prim(_axpy(l, Fraction(v) / s, l0))
                   for i, (l, v) in enumerate(zip(lin, vals)) if i != k]
            rays = [_prim(_axpy(r, Fraction(dot(a, r)) / s, l0)) for r in rays]
            rays.append(_prim(l0))
        else:
            rays = _dd_step(rays, a, done, dim - len(lin))
        done.append(a)
    rays = sorted(set(rays))
    if lin:
        h, _ = hermite_normal_form(lin)
        lin = [tuple(r) for r in h if any(r)]
    return rays, lin


def _dd_step(rays, a, done, pointed_dim):
    pos, zero, neg = [], [], []
    for r in rays:
        v = dot(a, r)
        (pos if v > 0 else neg if v < 0 else zero).append((r, v))
    out = [r for r, _ in pos] + [r for r, _ in zero]
    if not pos or not neg:
        return out
    tight = {r: frozenset(i for i, b in enumerate(done) if dot(b, r) == 0) for r in rays}
    for p, vp in pos:
        for n, vn in neg:
            # adjacent iff the common tight constraints cut out a 2-face
            common = tight[p] & tight[n]
            if len(common) < pointed_dim - 2:
                continue
            if face_rank([done[i] for i in common]) != pointed_dim - 2:
                continue
            out.append(_prim(tuple(vp * x - vn * y for x, y in zip(n, p))))
    return out


@dataclass(frozen=True)
class VRep:
    vertices: tuple[tuple[Fraction, ...], ...]
    rays: tuple[tuple[int, ...], ...]
    lineality: tuple[tuple[int, ...], ...]


def polyhedron_vrep(normals: Sequence[Sequence], offsets: Sequence) -> VRep:
    """V-representation of ``{x : <normal_i, x> + offset_i >= 0}``."""
    dim = len(normals[0])
    hom = [tuple(n) + (Fraction(b),) for n, b in zip(normals, offsets)]
    hom.append(tuple([0] * dim) + (1,))
    rays, lin = cone_dd(hom, dim + 1)
    vertices = sorted(tuple(Fraction(x, r[-1]) for x in r[:-1]) for r in rays if r[-1] > 0)
    rec = sorted(_prim(r[:-1]) for r in rays if r[-1] == 0)
    return VRep(tuple(vertices), tuple(rec), tuple(l[:-1] for l in lin))


def cone_facets(generators: Sequence[Sequence], dim: int) -> tuple[list[tuple[int, ...]], list[tuple[int, ...]]]:
    """Inward facet normals of ``cone(generators)`` plus the orthogonal complement of its span."""
    return cone_dd(generators, dim)


def face_rank(vectors: Sequence[Sequence]) -> int:
    return rank(vectors) if vectors else 0
