"""Minkowski decompositions of the cross-section polygon and the smoothings they induce.

Each lattice Minkowski decomposition P = R_0 + ... + R_p gives a cone
sigma~ = Cone(R_k x {e_k}) in N' = L + Z^{p+1}, Gorenstein of degree
m0' = e_0* + ... + e_p*, containing sigma through l + a n0 -> (l; a, ..., a).
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from math import gcd
from typing import Iterable, Sequence

from .cones import Cone, GorensteinData
from .errors import InvalidDecomposition, TooLarge
from .lattice import (LatticeSpec, Matrix, Vector, dot, is_integral, kernel_basis, matvec,
                      primitive_int, sign_normalize, solve, transpose, vec)
from .polyhedra import cone_dd

Point = tuple[int, int]


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points: Iterable[Sequence[int]]) -> list[Point]:
    """Extreme points in counterclockwise order starting at the lexicographic minimum."""
    pts = sorted({(int(p[0]), int(p[1])) for p in points})
    if len(pts) <= 2:
        return pts
    lower: list[Point] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[Point] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _half(v) -> int:
    return 0 if v[1] > 0 or (v[1] == 0 and v[0] > 0) else 1


def _angle_cmp(u, v) -> int:
    """Counterclockwise angle order from the positive x-axis, exactly."""
    hu, hv = _half(u), _half(v)
    if hu != hv:
        return hu - hv
    c = u[0] * v[1] - u[1] * v[0]
    return -1 if c > 0 else (1 if c < 0 else 0)


@dataclass(frozen=True)
class LatticePolygon:
    """A lattice polygon (or segment, or point) by its extreme points, counterclockwise."""

    vertices: tuple[Point, ...]

    def __post_init__(self):
        verts = tuple((int(v[0]), int(v[1])) for v in self.vertices)
        hull = tuple(convex_hull(verts))
        if len(hull) != len(verts) or set(hull) != set(verts):
            raise ValueError("vertices are not exactly the extreme points of a convex polygon")
        object.__setattr__(self, "vertices", hull)

    @classmethod
    def from_points(cls, points: Iterable[Sequence[int]]) -> "LatticePolygon":
        return cls(tuple(convex_hull(points)))

    @classmethod
    def from_edges(cls, edges: Sequence[Point], start: Point = (0, 0)) -> "LatticePolygon":
        """Polygon traced by zero-sum edge vectors taken in angular order."""
        ordered = sorted(edges, key=cmp_to_key(_angle_cmp))
        pts, cur = [start], start
        for v in ordered:
            cur = (cur[0] + v[0], cur[1] + v[1])
            pts.append(cur)
        return cls.from_points(pts)

    def translated(self, t: Sequence[int]) -> "LatticePolygon":
        return LatticePolygon(tuple((v[0] + t[0], v[1] + t[1]) for v in self.vertices))

    def normalized(self) -> "LatticePolygon":
        lo = min(self.vertices)
        return self.translated((-lo[0], -lo[1]))

    @property
    def edges(self) -> list[tuple[Point, Point]]:
        """Edges as vertex pairs; a segment has one edge, a point none."""
        v = self.vertices
        if len(v) == 1:
            return []
        if len(v) == 2:
            return [(v[0], v[1])]
        return [(v[i], v[(i + 1) % len(v)]) for i in range(len(v))]

    def support(self, u: Sequence[int]) -> int:
        return min(u[0] * v[0] + u[1] * v[1] for v in self.vertices)

    def __add__(self, other: "LatticePolygon") -> "LatticePolygon":
        return LatticePolygon.from_points(
            (a[0] + b[0], a[1] + b[1]) for a in self.vertices for b in other.vertices)

    def __str__(self):
        return "[" + " ".join(f"({x},{y})" for x, y in self.vertices) + "]"


def edge_vector_multiset(p: LatticePolygon) -> list[tuple[Point, int]]:
    """Primitive edge vectors counterclockwise, each with its lattice length."""
    v = p.vertices
    if len(v) == 1:
        return []
    cyc = list(v) + [v[0]]
    out = []
    for a, b in zip(cyc, cyc[1:]):
        dx, dy = b[0] - a[0], b[1] - a[1]
        g = gcd(dx, dy)
        out.append(((dx // g, dy // g), g))
    return out


def _expanded(p: LatticePolygon) -> list[Point]:
    return [vtx for vtx, k in edge_vector_multiset(p) for _ in range(k)]


@dataclass(frozen=True)
class MinkowskiDecomposition:
    """Summands R_0..R_p, each translated to put its lexicographic minimum at the origin."""

    summands: tuple[LatticePolygon, ...]

    @property
    def p(self) -> int:
        return len(self.summands) - 1

    def minkowski_sum(self) -> LatticePolygon:
        total = self.summands[0]
        for r in self.summands[1:]:
            total = total + r
        return total

    def __str__(self):
        return " + ".join(map(str, self.summands))


def _zero_sum_blocks(counts: Counter, first: Point) -> Iterable[Counter]:
    """Zero-sum sub-multisets of ``counts`` containing one copy of ``first``."""
    keys = sorted(counts)
    ranges = [range((1 if k == first else 0), counts[k] + 1) for k in keys]
    for choice in itertools.product(*ranges):
        sx = sum(c * k[0] for c, k in zip(choice, keys))
        sy = sum(c * k[1] for c, k in zip(choice, keys))
        if sx == 0 and sy == 0:
            yield Counter({k: c for k, c in zip(keys, choice) if c})


def _is_minimal(block: Counter) -> bool:
    keys = sorted(block)
    total = sum(block.values())
    for choice in itertools.product(*(range(block[k] + 1) for k in keys)):
        size = sum(choice)
        if 0 < size < total and not any(
                sum(c * k[i] for c, k in zip(choice, keys)) for i in (0, 1)):
            return False
    return True


def minkowski_decompositions(p: LatticePolygon, maximal_only: bool = True,
                             max_edges: int = 16, budget: int = 200000) -> list[MinkowskiDecomposition]:
    """All nontrivial lattice Minkowski decompositions of P (p >= 1), up to reordering.

    Summands correspond to partitions of the primitive edge multiset into
    zero-sum blocks. With ``maximal_only`` every block must be a minimal
    zero-sum multiset, i.e. no summand decomposes further.
    """
    edges = _expanded(p)
    if len(edges) > max_edges:
        raise TooLarge(f"{len(edges)} primitive edges exceeds the limit of {max_edges}")
    found: set[tuple] = set()
    nodes = 0

    def rec(remaining: Counter, blocks: list[tuple]):
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise TooLarge("decomposition search exceeded its budget")
        if not remaining:
            found.add(tuple(sorted(blocks)))
            return
        first = min(remaining)
        for block in _zero_sum_blocks(remaining, first):
            if maximal_only and not _is_minimal(block):
                continue
            rest = remaining - block
            rec(rest, blocks + [tuple(sorted(block.elements()))])

    rec(Counter(edges), [])
    out = []
    for blocks in found:
        if len(blocks) < 2:
            continue
        summands = sorted((LatticePolygon.from_edges(list(b)).normalized() for b in blocks),
                          key=lambda r: (len(r.vertices), r.vertices))
        out.append(MinkowskiDecomposition(tuple(summands)))
    out.sort(key=lambda d: (len(d.summands), [s.vertices for s in d.summands]))
    return out


def is_valid_decomposition(p: LatticePolygon, d: MinkowskiDecomposition) -> bool:
    """Support functions of P and of the sum agree on every edge normal (up to translation)."""
    s = d.minkowski_sum()
    shift = (min(p.vertices)[0] - min(s.vertices)[0], min(p.vertices)[1] - min(s.vertices)[1])
    s = s.translated(shift)
    normals = {(-b[1] + a[1], b[0] - a[0]) for a, b in p.edges + s.edges}
    normals |= {(-u[0], -u[1]) for u in normals}
    return all(p.support(u) == s.support(u) for u in normals)


@dataclass(frozen=True)
class PolygonChart:
    """Identification of P with a polygon in L = N_{m0}: n = n0 + l_1 b_1 + l_2 b_2."""

    lattice: LatticeSpec
    n0: Vector
    l_basis: tuple[Vector, ...]

    @property
    def frame(self) -> list[Vector]:
        return list(self.l_basis) + [self.n0]

    def to_chart(self, v: Sequence) -> Vector:
        """Coordinates (l; a) of an ambient point of N in the frame (L basis, n0)."""
        return solve(transpose(self.frame), vec(v))

    def from_chart(self, c: Sequence) -> Vector:
        return tuple(sum(ci * f[k] for ci, f in zip(c, self.frame)) for k in range(len(self.n0)))


def polygon_chart(g: GorensteinData) -> tuple[LatticePolygon, PolygonChart]:
    """The cross-section as a lattice polygon, based at its lexicographically smallest lattice point."""
    lat = g.lattice
    if lat.rank != 3:
        raise ValueError("polygon charts need a rank-3 lattice")
    c = [dot(g.m0, b) for b in lat.generators]
    l_basis = tuple(lat.ambient(k) for k in kernel_basis([c]))
    n0 = min(g.cross_section.lattice_points())
    chart = PolygonChart(lat, n0, l_basis)
    pts = []
    for v in g.cross_section.vertices:
        x = chart.to_chart(v)
        if not is_integral(x):
            raise ValueError("cross-section vertex is not a lattice point of the chart")
        pts.append((int(x[0]), int(x[1])))
    return LatticePolygon.from_points(pts), chart


@dataclass(frozen=True)
class AltmannCone:
    decomposition: MinkowskiDecomposition
    summands: tuple[LatticePolygon, ...]
    sigma_tilde: Cone
    m0_prime: Vector
    embedding: Matrix
    chart: PolygonChart | None = None

    @property
    def N_prime(self) -> LatticeSpec:
        return self.sigma_tilde.lattice

    def embed(self, chart_coords: Sequence) -> Vector:
        return matvec(self.embedding, vec(chart_coords))


def diagonal_embedding(rank_l: int, p: int) -> Matrix:
    """(l; a) -> (l; a, ..., a) as an integer matrix."""
    rows = [tuple(int(i == j) for j in range(rank_l + 1)) for i in range(rank_l)]
    rows += [tuple([0] * rank_l + [1]) for _ in range(p + 1)]
    return tuple(rows)


def altmann_cone(p: LatticePolygon, d: MinkowskiDecomposition,
                 chart: PolygonChart | None = None) -> AltmannCone:
    if not is_valid_decomposition(p, d):
        raise InvalidDecomposition("summands do not add up to P")
    total = d.minkowski_sum()
    lo_p, lo_s = min(p.vertices), min(total.vertices)
    shift = (lo_p[0] - lo_s[0], lo_p[1] - lo_s[1])
    summands = (d.summands[0].translated(shift),) + d.summands[1:]
    k = len(summands)
    gens = []
    for idx, r in enumerate(summands):
        for v in r.vertices:
            gens.append((v[0], v[1]) + tuple(int(j == idx) for j in range(k)))
    n_prime = LatticeSpec.standard(2 + k)
    sigma_tilde = Cone.generated_by(n_prime, gens)
    m0p = vec([0, 0] + [1] * k)
    if any(dot(m0p, r) != 1 for r in sigma_tilde.rays):
        raise InvalidDecomposition("cone over the summands is not Gorenstein of degree m0'")
    return AltmannCone(d, summands, sigma_tilde, m0p, diagonal_embedding(2, k - 1), chart)


def verify_embedding(g: GorensteinData, a: AltmannCone, chart: PolygonChart | None = None) -> bool:
    """Check sigma = sigma~ ∩ N_R under the stored embedding.

    Every ray of sigma must map into sigma~, and every extreme ray of
    sigma~ ∩ image(N_R) must pull back to a ray of sigma.
    """
    chart = chart or a.chart
    if chart is None:
        chart = polygon_chart(g)[1]
    e = a.embedding
    sig = a.sigma_tilde
    images = [a.embed(chart.to_chart(r)) for r in g.cone.rays]
    if not all(sig.contains(v) for v in images):
        return False
    dim = len(e)
    # image(N_R) is cut out by the left kernel of the embedding matrix
    eqs = [tuple(r) for r in kernel_basis(transpose(e))]
    ineqs = list(sig.facet_normals) + eqs + [tuple(-x for x in q) for q in eqs]
    rays, lin = cone_dd(ineqs, dim)
    if lin:
        return False
    pulled = set()
    for r in rays:
        c = solve(e, r)
        if c is None:
            return False
        pulled.add(primitive_int(chart.from_chart(c)))
    return pulled == {primitive_int(r) for r in g.cone.rays}


GaussianRational = tuple[Fraction, Fraction]


def _gauss(x) -> GaussianRational:
    if isinstance(x, complex):
        raise TypeError("deformation parameters must be exact (re, im) pairs")
    if isinstance(x, (int, Fraction, str)):
        return (Fraction(x), Fraction(0))
    re, im = x
    return (Fraction(re), Fraction(im))


def im_i_power(z: GaussianRational, k: int) -> Fraction:
    """Im(i^k z), exactly."""
    re, im = z
    for _ in range(k % 4):
        re, im = -im, re
    return im


@dataclass(frozen=True)
class SmoothingComponent:
    k: int
    plane_value: Fraction
    direction: tuple[int, int]
    edge: tuple[Point, Point]


@dataclass(frozen=True)
class SmoothingDiscriminant:
    components: tuple[SmoothingComponent, ...]
    plane_values: tuple[Fraction, ...]
    n: int

    @property
    def generic(self) -> bool:
        return len(set(self.plane_values)) == len(self.plane_values)

    @property
    def distinct_planes(self) -> int:
        return len({c.plane_value for c in self.components})


def plane_values(x: Sequence, n: int) -> tuple[Fraction, ...]:
    """Im(i^{n+1}(x_0 - x_k)) for k = 0..p."""
    xs = [_gauss(v) for v in x]
    x0 = xs[0]
    return tuple(im_i_power((x0[0] - xk[0], x0[1] - xk[1]), n + 1) for xk in xs)


def smoothing_discriminant(d: MinkowskiDecomposition, x: Sequence, n: int = 3) -> SmoothingDiscriminant:
    """One line direction per edge of each summand, lying in the plane of that summand."""
    if len(x) != len(d.summands):
        raise ValueError(f"need {len(d.summands)} deformation parameters, got {len(x)}")
    values = plane_values(x, n)
    comps = []
    for k, r in enumerate(d.summands):
        for a, b in r.edges:
            v = (b[0] - a[0], b[1] - a[1])
            direction = sign_normalize(primitive_int((-v[1], v[0])))
            comps.append(SmoothingComponent(k, values[k], direction, (a, b)))
    return SmoothingDiscriminant(tuple(comps), values, n)


def extremal_transition_report(g: GorensteinData, resolution_graphs: Sequence,
                               smoothing: SmoothingDiscriminant | None, x: Sequence | None = None,
                               scales: Sequence = (1, Fraction(1, 10), Fraction(1, 100), 0),
                               decomposition: MinkowskiDecomposition | None = None) -> dict:
    """Resolution-side graphs against the smoothing-side line arrangement as x -> 0."""
    res = [{"vertices": len(gr.vertices), "bounded_edges": len(gr.bounded_edges),
            "rays": len(gr.rays)} for gr in resolution_graphs]
    report = {"m0": g.m0, "resolution": res, "smoothing": None, "collapse": [], "collapsed": True}
    if smoothing is None or not smoothing.components:
        return report
    report["smoothing"] = {
        "components": len(smoothing.components),
        "planes": smoothing.distinct_planes,
        "generic": smoothing.generic,
    }
    if x is not None and decomposition is not None:
        spreads = []
        for s in scales:
            xs = [tuple(Fraction(s) * c for c in _gauss(v)) for v in x]
            vals = smoothing_discriminant(decomposition, xs, smoothing.n).plane_values
            spreads.append((Fraction(s), max(vals) - min(vals)))
        report["collapse"] = spreads
        report["collapsed"] = spreads[-1][1] == 0 and all(
            a[1] >= b[1] for a, b in zip(spreads, spreads[1:]))
    return report
