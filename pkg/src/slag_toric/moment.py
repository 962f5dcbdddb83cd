"""Ray maps, divisor classes, piecewise linear functions and moment polytopes.

Moment-map convention: each homogeneous coordinate contributes |z|^2 with no
factor 1/2, so the polytope of a lift x0 is ``{m : <m, n_s> + x0_s >= 0}``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .cones import Fan
from .errors import EmptyPolytope, Inconsistent, NotAmple, NotSurjective
from .lattice import (Matrix, Vector, dot, hermite_normal_form, identity, kernel_basis,
                      rank, solve, transpose, vec)
from .polyhedra import polyhedron_vrep


@dataclass(frozen=True)
class RayMap:
    """pi: Z^{rays} -> N, columns are the ray generators in ambient coordinates."""

    fan: Fan
    pi: Matrix
    kernel: tuple[tuple[int, ...], ...]

    @property
    def n_rays(self) -> int:
        return len(self.fan.rays)

    def p(self, x0: Sequence) -> Vector:
        """Restriction t* -> k*: pair a lift with each kernel generator."""
        return tuple(dot(x0, k) for k in self.kernel)


def build_ray_map(f: Fan) -> RayMap:
    coords = [f.lattice.coords(r) for r in f.rays]
    n = f.lattice.rank
    h, _ = hermite_normal_form([[int(x) for x in c] for c in coords])
    if tuple(h[:n]) != identity(n) or any(any(row) for row in h[n:]):
        raise NotSurjective("ray generators do not span N")
    pi = transpose(f.rays)
    return RayMap(f, pi, tuple(kernel_basis(pi)))


@dataclass(frozen=True)
class DivisorClass:
    """A real divisor class, by its coordinates alpha in k* and/or a lift x0 in t*."""

    alpha: Vector | None = None
    x0: Vector | None = None

    def __post_init__(self):
        if self.alpha is None and self.x0 is None:
            raise ValueError("a divisor class needs alpha or a lift x0")
        if self.alpha is not None:
            object.__setattr__(self, "alpha", vec(self.alpha))
        if self.x0 is not None:
            object.__setattr__(self, "x0", vec(self.x0))

    def lift(self, rm: RayMap) -> Vector:
        if self.x0 is not None:
            if len(self.x0) != rm.n_rays:
                raise ValueError("lift length differs from the number of rays")
            if self.alpha is not None and rm.p(self.x0) != self.alpha:
                raise ValueError("lift does not restrict to alpha")
            return self.x0
        return normalized_lift(rm, self.alpha)


def normalized_lift(rm: RayMap, alpha: Sequence) -> Vector:
    """A lift of alpha whose offsets vanish on a maximal independent set of old rays."""
    alpha = vec(alpha)
    if len(alpha) != len(rm.kernel):
        raise ValueError(f"class has {len(alpha)} coordinates, kernel rank is {len(rm.kernel)}")
    s = rm.n_rays
    if not rm.kernel:
        x = tuple(Fraction(0) for _ in range(s))
    else:
        x = solve(rm.kernel, alpha)
    rays = rm.fan.rays
    chosen: list[int] = []
    for i in rm.fan.old_rays():
        if rank([rays[j] for j in chosen + [i]]) == len(chosen) + 1:
            chosen.append(i)
    if chosen:
        m = solve([rays[i] for i in chosen], [-x[i] for i in chosen])
        x = tuple(xi + dot(m, r) for xi, r in zip(x, rays))
    return x


@dataclass(frozen=True)
class PLFunction:
    """Linear pieces m_tau on maximal cones: <m_tau, n_s> = -x0_s for rays s of tau."""

    pieces: dict

    def __call__(self, cone: tuple[int, ...]) -> Vector:
        return self.pieces[cone]


def pl_function(f: Fan, x0: Sequence) -> PLFunction:
    pieces = {}
    for c in f.max_cones:
        m = solve([f.rays[i] for i in c], [-x0[i] for i in c])
        if m is None:
            raise Inconsistent(f"no linear function matches the lift on cone {c}")
        pieces[c] = m
    return PLFunction(pieces)


def ampleness(f: Fan, d: DivisorClass) -> tuple[bool, PLFunction]:
    """Strict upper convexity: <m_tau, n_s> > -x0_s for every ray s outside tau."""
    x0 = d.lift(build_ray_map(f))
    phi = pl_function(f, x0)
    ok = all(dot(phi(c), f.rays[i]) > -x0[i]
             for c in f.max_cones for i in range(len(f.rays)) if i not in c)
    return ok, phi


@dataclass(frozen=True)
class Edge:
    """A 1-face: bounded (two vertex indices) or a ray (vertex index + M-primitive direction)."""

    start: int
    end: int | None
    direction: Vector | None
    active: tuple[int, ...]

    @property
    def bounded(self) -> bool:
        return self.end is not None


@dataclass(frozen=True)
class MomentPolytope:
    fan: Fan
    x0: Vector
    vertices: tuple[Vector, ...]
    rays: tuple[Vector, ...]
    skeleton: tuple[Edge, ...]

    @property
    def h_rep(self) -> list[tuple[Vector, Fraction]]:
        return list(zip(self.fan.rays, self.x0))

    def active(self, point: Sequence) -> tuple[int, ...]:
        return tuple(i for i, (n, b) in enumerate(self.h_rep) if dot(n, point) + b == 0)

    def contains(self, point: Sequence) -> bool:
        return all(dot(n, point) + b >= 0 for n, b in self.h_rep)

    @property
    def bounded_edges(self) -> list[Edge]:
        return [e for e in self.skeleton if e.bounded]

    @property
    def unbounded_edges(self) -> list[Edge]:
        return [e for e in self.skeleton if not e.bounded]

    def vertex_cone(self, v: int) -> tuple[int, ...]:
        """The maximal cone of the fan whose rays are active at vertex v."""
        return self.active(self.vertices[v])


def moment_polytope(f: Fan, d: DivisorClass, require_ample: bool = True) -> MomentPolytope:
    x0 = d.lift(build_ray_map(f))
    if require_ample:
        ok, _ = ampleness(f, d)
        if not ok:
            raise NotAmple("the divisor class is not ample on this fan")
    vrep = polyhedron_vrep(f.rays, x0)
    if not vrep.vertices:
        raise EmptyPolytope("the moment polytope has no vertices")
    m_lat = f.lattice.dual()
    rays = tuple(sorted(m_lat.primitive(r) for r in vrep.rays))
    p = MomentPolytope(f, x0, vrep.vertices, rays, ())
    return MomentPolytope(f, x0, vrep.vertices, rays, tuple(one_skeleton(p)))


def one_skeleton(p: MomentPolytope) -> list[Edge]:
    normals = p.fan.rays
    n = p.fan.lattice.rank
    act = [set(p.active(v)) for v in p.vertices]
    edges = []
    for i, j in itertools.combinations(range(len(p.vertices)), 2):
        common = sorted(act[i] & act[j])
        if len(common) >= n - 1 and rank([normals[k] for k in common]) == n - 1:
            edges.append(Edge(i, j, None, tuple(common)))
    for i, r in itertools.product(range(len(p.vertices)), p.rays):
        common = sorted(k for k in act[i] if dot(normals[k], r) == 0)
        if len(common) >= n - 1 and rank([normals[k] for k in common]) == n - 1:
            edges.append(Edge(i, None, r, tuple(common)))
    return edges


def find_ample_class(f: Fan, bound: int = 2) -> DivisorClass:
    """Search small integral lifts supported on the non-old rays for an ample class."""
    s = len(f.rays)
    old = set(f.old_rays())
    free = [i for i in range(s) if i not in old] or list(range(s))
    candidates = sorted(itertools.product(range(-bound, bound + 1), repeat=len(free)),
                        key=lambda c: (sum(map(abs, c)), c))
    for c in candidates:
        x0 = [0] * s
        for i, v in zip(free, c):
            x0[i] = v
        d = DivisorClass(x0=tuple(x0))
        try:
            if ampleness(f, d)[0]:
                return d
        except Inconsistent:
            continue
    raise NotAmple("no ample class among small integral lifts")
