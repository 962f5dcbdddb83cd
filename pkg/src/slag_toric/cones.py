"""Rational polyhedral cones, Gorenstein cross-sections, triangulations and fans."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DimensionMismatch, InvalidTriangulation, NotGorenstein
from .lattice import (LatticeSpec, Vector, det, dot, is_integral, is_lattice_basis,
                      primitive_int, rank, solve, vec)
from .polyhedra import cone_dd


def _ray_key(v) -> tuple[int, ...]:
    """Scale-free identity of a ray, for comparing cones as sets of rays."""
    return primitive_int(v)


@dataclass(frozen=True)
class Cone:
    """A rational polyhedral cone given by canonical generators.

    ``generators`` are the lattice-primitive extreme rays sorted
    lexicographically; when the cone has a lineality space its basis vectors
    and their negatives are appended to the generators and listed in
    ``lineality``.
    """

    lattice: LatticeSpec
    generators: tuple[Vector, ...]
    lineality: tuple[Vector, ...] = ()

    @classmethod
    def generated_by(cls, lattice: LatticeSpec, vectors: Iterable[Sequence],
                     allow_lineality: bool = False) -> "Cone":
        vectors = [vec(v) for v in vectors if any(x != 0 for x in v)]
        d = lattice.rank
        if any(len(v) != d for v in vectors):
            raise DimensionMismatch("generator length differs from lattice rank")
        if not vectors:
            return cls(lattice, ())
        normals, perp = cone_dd(vectors, d)
        eqs = list(normals) + list(perp) + [tuple(-x for x in p) for p in perp]
        rays, lin = cone_dd(eqs, d)
        if lin and not allow_lineality:
            raise ValueError("cone is not strongly convex")
        gens = sorted(lattice.primitive(r) for r in rays)
        lin_gens = sorted(lattice.primitive(l) for l in lin)
        both = sorted(set(gens) | set(lin_gens) | {tuple(-x for x in l) for l in lin_gens})
        return cls(lattice, tuple(both), tuple(lin_gens))

    @property
    def dim(self) -> int:
        return rank(self.generators) if self.generators else 0

    @property
    def ambient_dim(self) -> int:
        return self.lattice.rank

    @property
    def is_strongly_convex(self) -> bool:
        return not self.lineality

    @property
    def is_full_dimensional(self) -> bool:
        return self.dim == self.ambient_dim

    @property
    def rays(self) -> tuple[Vector, ...]:
        """Extreme rays (generators other than the lineality directions)."""
        lin = {l for l in self.lineality} | {tuple(-x for x in l) for l in self.lineality}
        return tuple(g for g in self.generators if g not in lin)

    @property
    def facet_normals(self) -> list[tuple[int, ...]]:
        """Inward normals of facets, in dual ambient coordinates."""
        normals, _ = cone_dd(self.generators, self.ambient_dim)
        return normals

    def contains(self, v: Sequence) -> bool:
        normals, perp = cone_dd(self.generators, self.ambient_dim)
        return all(dot(a, v) >= 0 for a in normals) and all(dot(p, v) == 0 for p in perp)

    def same_rays(self, other: "Cone") -> bool:
        return {_ray_key(g) for g in self.generators} == {_ray_key(g) for g in other.generators}

    def __str__(self):
        return "Cone(" + ", ".join("(" + ",".join(map(str, g)) + ")" for g in self.generators) + ")"


def dual_cone(c: Cone) -> Cone:
    """``{m : <m, v> >= 0 for v in c}`` in the dual lattice M."""
    m = c.lattice.dual()
    d = c.ambient_dim
    if not c.generators:
        full = [tuple(int(i == j) for j in range(d)) for i in range(d)]
        return Cone.generated_by(m, full + [tuple(-x for x in v) for v in full],
                                 allow_lineality=True)
    rays, lin = cone_dd(c.generators, d)
    return Cone.generated_by(m, list(rays) + list(lin) + [tuple(-x for x in l) for l in lin],
                             allow_lineality=True)


@dataclass(frozen=True)
class LatticePolytope:
    """Cross-section polytope P = conv(n_1, ..., n_s) on the hyperplane <m0, .> = 1."""

    lattice: LatticeSpec
    vertices: tuple[Vector, ...]
    m0: Vector

    def lattice_points(self) -> list[Vector]:
        """All points of P ∩ N, vertices first (in vertex order) then the rest sorted."""
        cone = Cone.generated_by(self.lattice, self.vertices)
        coords = [self.lattice.coords(v) for v in self.vertices]
        lo = [min(c[i] for c in coords) for i in range(self.lattice.rank)]
        hi = [max(c[i] for c in coords) for i in range(self.lattice.rank)]
        found = []
        for pt in itertools.product(*(range(int(a), int(b) + 1) for a, b in zip(lo, hi))):
            v = self.lattice.ambient(pt)
            if dot(self.m0, v) == 1 and cone.contains(v):
                found.append(v)
        rest = sorted(v for v in found if v not in self.vertices)
        return list(self.vertices) + rest

    def normalized_volume(self) -> Fraction:
        """Sum of |det| (N-coordinates) over a pulling triangulation of the cone over P."""
        return sum((abs(det([self.lattice.coords(v) for v in s]))
                    for s in pulling_triangulation(self.vertices, self.lattice.rank)),
                   Fraction(0))


@dataclass(frozen=True)
class GorensteinData:
    cone: Cone
    m0: Vector
    cross_section: LatticePolytope

    @property
    def lattice(self) -> LatticeSpec:
        return self.cone.lattice


def gorenstein_degree(c: Cone) -> GorensteinData:
    """Find m0 in M with <m0, n_i> = 1 on every ray generator of ``c``."""
    if not c.is_strongly_convex or not c.is_full_dimensional:
        raise ValueError("gorenstein_degree needs a strongly convex full-dimensional cone")
    rays = list(c.rays)
    m0 = solve(rays, [1] * len(rays))
    if m0 is None:
        raise NotGorenstein(f"no m0 pairs to 1 with all rays of {c}")
    if not c.lattice.dual().contains(m0):
        raise NotGorenstein(f"solution {tuple(map(str, m0))} is not in the dual lattice")
    return GorensteinData(c, m0, LatticePolytope(c.lattice, tuple(rays), m0))


def _facets(gens: Sequence[Vector], d: int) -> list[list[Vector]]:
    normals, _ = cone_dd(gens, d)
    return [[g for g in gens if dot(a, g) == 0] for a in normals]


def pulling_triangulation(gens: Sequence[Vector], d: int) -> list[tuple[Vector, ...]]:
    """Simplicial cones triangulating cone(gens) by pulling the first generator."""
    gens = list(gens)
    if len(gens) == rank(gens):
        return [tuple(gens)]
    v0 = gens[0]
    out = []
    for face in _facets(gens, d):
        if v0 in face:
            continue
        out.extend((v0,) + s for s in pulling_triangulation(face, d))
    return out


@dataclass(frozen=True)
class Triangulation:
    """Simplices given as index tuples into ``points`` (lattice points of P)."""

    points: tuple[Vector, ...]
    simplices: tuple[tuple[int, ...], ...]

    @classmethod
    def of(cls, points: Iterable[Sequence], simplices: Iterable[Iterable[int]]) -> "Triangulation":
        return cls(tuple(vec(p) for p in points), tuple(tuple(sorted(s)) for s in simplices))


def star_subdivision(g: GorensteinData, point: Sequence) -> Triangulation:
    """Triangulation of P coning the given lattice point over the facets of P avoiding it."""
    point = vec(point)
    d = g.lattice.rank
    verts = list(g.cross_section.vertices)
    points = verts + ([point] if point not in verts else [])
    idx = {p: i for i, p in enumerate(points)}
    simplices = []
    for face in _facets(verts, d):
        if rank(face + [point]) == rank(face):
            continue
        for s in pulling_triangulation(face, d):
            simplices.append(tuple(sorted(idx[v] for v in s + (point,))))
    return Triangulation(tuple(points), tuple(sorted(simplices)))


def _cone_ineqs(gens: Sequence[Vector], d: int) -> list[tuple]:
    normals, perp = cone_dd(gens, d)
    return list(normals) + list(perp) + [tuple(-x for x in p) for p in perp]


def _intersects_properly(a: Sequence[Vector], b: Sequence[Vector], d: int) -> bool:
    """cone(a) ∩ cone(b) == cone(common generators)."""
    rays, lin = cone_dd(_cone_ineqs(a, d) + _cone_ineqs(b, d), d)
    if lin:
        return False
    common = [v for v in a if v in b]
    return {_ray_key(r) for r in rays} == {_ray_key(v) for v in common}


@dataclass(frozen=True)
class Fan:
    """A fan given by its rays (in a fixed order) and maximal cones as ray-index tuples."""

    lattice: LatticeSpec
    rays: tuple[Vector, ...]
    max_cones: tuple[tuple[int, ...], ...]
    _faces: dict = field(default_factory=dict, compare=False, repr=False)

    @classmethod
    def from_cones(cls, lattice: LatticeSpec, rays: Iterable[Sequence],
                   cones: Iterable[Iterable[int]], check: bool = True) -> "Fan":
        rays = tuple(vec(r) for r in rays)
        for r in rays:
            if not lattice.contains(r) or lattice.primitive(r) != r:
                raise ValueError(f"ray {tuple(map(str, r))} is not a primitive lattice vector")
        cones = tuple(sorted(tuple(sorted(c)) for c in cones))
        fan = cls(lattice, rays, cones)
        if check:
            d = lattice.rank
            for c in cones:
                Cone.generated_by(lattice, [rays[i] for i in c])
            for c1, c2 in itertools.combinations(cones, 2):
                if not _intersects_properly([rays[i] for i in c1], [rays[i] for i in c2], d):
                    raise ValueError(f"cones {c1} and {c2} do not meet in a common face")
        return fan

    @classmethod
    def from_cone(cls, c: Cone) -> "Fan":
        return cls(c.lattice, tuple(c.rays), (tuple(range(len(c.rays))),))

    def cone(self, idx: Sequence[int]) -> Cone:
        return Cone.generated_by(self.lattice, [self.rays[i] for i in idx])

    def faces(self, idx: tuple[int, ...]) -> set[tuple[int, ...]]:
        """All nonempty faces of one cone, as ray-index tuples (including itself)."""
        if idx in self._faces:
            return self._faces[idx]
        out = {idx}
        if len(idx) > 1:
            gens = [self.rays[i] for i in idx]
            if len(idx) == rank(gens):
                for k in range(1, len(idx)):
                    out.update(itertools.combinations(idx, k))
            else:
                for face in _facets(gens, self.lattice.rank):
                    sub = tuple(sorted(i for i in idx if self.rays[i] in face))
                    out |= self.faces(sub)
        self._faces[idx] = out
        return out

    @property
    def cones(self) -> list[tuple[int, ...]]:
        out = set()
        for c in self.max_cones:
            out |= self.faces(c)
        return sorted(out, key=lambda c: (len(c), c))

    def cones_of_dim(self, k: int) -> list[tuple[int, ...]]:
        return [c for c in self.cones if rank([self.rays[i] for i in c]) == k]

    def support_cone(self) -> Cone:
        return Cone.generated_by(self.lattice, self.rays)

    def old_rays(self) -> list[int]:
        """Indices of rays that are extreme rays of the support cone."""
        support = set(self.support_cone().rays)
        return [i for i, r in enumerate(self.rays) if r in support]


def fan_from_triangulation(g: GorensteinData, t: Triangulation) -> Fan:
    """Fan of cones over the simplices of a lattice triangulation of P."""
    lat, d = g.lattice, g.lattice.rank
    sigma = g.cone
    for p in t.points:
        if len(p) != d or not lat.contains(p) or dot(g.m0, p) != 1 or not sigma.contains(p):
            raise InvalidTriangulation(f"{tuple(map(str, p))} is not a lattice point of P")
    for s in t.simplices:
        if any(i < 0 or i >= len(t.points) for i in s):
            raise InvalidTriangulation(f"simplex {s} indexes outside the point list")
        if len(s) != d or rank([t.points[i] for i in s]) != d:
            raise InvalidTriangulation(f"simplex {s} is not full-dimensional")
    for s1, s2 in itertools.combinations(t.simplices, 2):
        if not _intersects_properly([t.points[i] for i in s1], [t.points[i] for i in s2], d):
            raise InvalidTriangulation(f"simplices {s1} and {s2} overlap")
    vol = sum((abs(det([lat.coords(t.points[i]) for i in s])) for s in t.simplices), Fraction(0))
    if vol != g.cross_section.normalized_volume():
        raise InvalidTriangulation("simplices do not cover P")
    used = sorted({i for s in t.simplices for i in s})
    new_index = {old: new for new, old in enumerate(used)}
    rays = tuple(t.points[i] for i in used)
    cones = tuple(sorted(tuple(sorted(new_index[i] for i in s)) for s in t.simplices))
    return Fan(lat, rays, cones)


def is_smooth(f: Fan) -> tuple[bool, list[tuple[int, ...]]]:
    """Every maximal cone must be generated by a basis of N."""
    offenders = []
    for c in f.max_cones:
        gens = [f.rays[i] for i in c]
        try:
            ok = is_lattice_basis(gens, f.lattice)
        except DimensionMismatch:
            ok = False
        if not ok:
            offenders.append(c)
    return not offenders, offenders


def crepancy_check(g: GorensteinData, f: Fan) -> bool:
    return all(dot(g.m0, r) == 1 for r in f.rays)


def is_gorenstein_fan(f: Fan) -> bool:
    return all(is_integral(f.lattice.coords(r)) for r in f.rays)
