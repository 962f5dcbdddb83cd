"""Discriminant graphs of the toric fibrations, edge monodromy and the dual fibration data.

A basis e_1..e_n of N with <m0, e_i> = 1 identifies M_R with R^n via
x_i = <x, e_i>; the base of the fibration is R^{n-1} through
r(x) = (x_1 - x_2, ..., x_1 - x_n), which kills the m0 direction.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .errors import InconsistentGraph, NoBasis, NotInSpan, NotInSublattice
from .lattice import (LatticeSpec, Matrix, Vector, det, dot, express_in_basis, hermite_normal_form,
                      identity, inverse, is_integral, is_lattice_basis, kernel_basis, matmul,
                      primitive_int, sign_normalize, transpose, vec)
from .moment import MomentPolytope

GENERIC = "generic (2,2)"
POSITIVE = "positive (1,2)"
NEGATIVE = "negative (2,1)"
UNCLASSIFIED = "unclassified"
_SWAP = {POSITIVE: NEGATIVE, NEGATIVE: POSITIVE}


@dataclass(frozen=True)
class AdaptedBasis:
    """Basis e of N with m0 = e_1* + ... + e_n*, and f_i = e_1 - e_{i+1} spanning N_{m0}."""

    lattice: LatticeSpec
    m0: Vector
    e: tuple[Vector, ...]

    def __post_init__(self):
        e = tuple(vec(v) for v in self.e)
        object.__setattr__(self, "e", e)
        object.__setattr__(self, "m0", vec(self.m0))
        if any(dot(self.m0, v) != 1 for v in e):
            raise NoBasis("every basis vector must pair to 1 with m0")
        if not is_lattice_basis(e, self.lattice):
            raise NoBasis("vectors do not form a basis of N")

    @property
    def n(self) -> int:
        return len(self.e)

    @property
    def f(self) -> tuple[Vector, ...]:
        e1 = self.e[0]
        return tuple(tuple(x - y for x, y in zip(e1, ei)) for ei in self.e[1:])

    def f_coords(self, delta: Sequence) -> tuple[int, ...]:
        """Integer coordinates of a vector of N_{m0} in the basis f."""
        delta = vec(delta)
        if dot(self.m0, delta) != 0:
            raise NotInSublattice("vector does not pair to 0 with m0")
        try:
            a = express_in_basis(delta, self.f)
        except NotInSpan as exc:
            raise NotInSublattice(str(exc)) from exc
        if not is_integral(a):
            raise NotInSublattice("vector is not a lattice point of N_{m0}")
        return tuple(int(x) for x in a)


def adapted_basis(lattice: LatticeSpec, m0: Sequence) -> AdaptedBasis:
    """Deterministic adapted basis from the HNF of m0's coordinates in the dual basis."""
    m0 = vec(m0)
    c = [dot(m0, b) for b in lattice.generators]
    if not is_integral(c):
        raise NoBasis("m0 is not in the dual lattice")
    c = [int(x) for x in c]
    h, u = hermite_normal_form([[x] for x in c])
    if h[0][0] != 1:
        raise NoBasis("m0 is not primitive, so <m0, e> = 1 has no solution in N")
    n = lattice.rank
    s = [[1] * n] + [list(r) for r in identity(n)[1:]]
    coords = matmul(transpose(u), s)
    e = tuple(lattice.ambient(col) for col in transpose(coords))
    return AdaptedBasis(lattice, m0, e)


def projection_r(x: Sequence, b: AdaptedBasis | Sequence[Sequence] | None = None) -> Vector:
    """Project a point of M_R to the base R^{n-1}.

    ``b`` may be an adapted basis, a plain frame of vectors e_i, or None when
    ``x`` is already given in the coordinates x_i = <x, e_i>.
    """
    if b is None:
        xs = vec(x)
    else:
        frame = b.e if isinstance(b, AdaptedBasis) else [vec(v) for v in b]
        xs = tuple(dot(x, e) for e in frame)
    return tuple(xs[0] - xi for xi in xs[1:])


def edge_monodromy(delta: Sequence, b: AdaptedBasis) -> Matrix:
    """I plus the f-coordinates of delta placed in the last column."""
    a = b.f_coords(delta)
    n = b.n
    return tuple(tuple(int(i == j) + (a[i] if j == n - 1 and i < n - 1 else 0)
                       for j in range(n)) for i in range(n))


@dataclass(frozen=True)
class GraphEdge:
    """A bounded edge (start, end) or a ray (start, direction) of the discriminant graph."""

    start: int
    end: int | None
    direction: tuple[int, ...] | None
    pair: tuple[Vector, ...]
    delta: Vector | None
    monodromy: Matrix | None
    fiber_type: str

    @property
    def bounded(self) -> bool:
        return self.end is not None


@dataclass(frozen=True)
class DiscriminantGraph:
    n: int
    vertices: tuple[Vector, ...]
    edges: tuple[GraphEdge, ...]
    vertex_rays: tuple[tuple[Vector, ...], ...]
    vertex_types: tuple[str, ...]
    basis: AdaptedBasis | None
    proper: bool = False
    warnings: tuple[str, ...] = ()

    @property
    def ambient_dim(self) -> int:
        return self.n - 1

    @property
    def bounded_edges(self) -> list[GraphEdge]:
        return [e for e in self.edges if e.bounded]

    @property
    def rays(self) -> list[GraphEdge]:
        return [e for e in self.edges if not e.bounded]

    @property
    def generic_fiber(self) -> str:
        k = self.n - 1
        return f"T^{self.n}" if self.proper else f"T^{k} x R"

    def valence(self, v: int) -> int:
        return sum((e.start == v) + (e.end == v) for e in self.edges)

    def incident(self, v: int) -> list[GraphEdge]:
        return [e for e in self.edges if v in (e.start, e.end)]

    def with_edges(self, edges: Sequence[GraphEdge]) -> "DiscriminantGraph":
        return DiscriminantGraph(self.n, self.vertices, tuple(edges), self.vertex_rays,
                                 self.vertex_types, self.basis, self.proper, self.warnings)

    def as_proper(self) -> "DiscriminantGraph":
        """The same graph read as the discriminant of the proper fibration."""
        return DiscriminantGraph(self.n, self.vertices, self.edges, self.vertex_rays,
                                 self.vertex_types, self.basis, True, self.warnings)


def _segments_cross(p, q, r, s) -> bool:
    def orient(a, b, c):
        v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        return (v > 0) - (v < 0)
    o1, o2, o3, o4 = orient(p, q, r), orient(p, q, s), orient(r, s, p), orient(r, s, q)
    return o1 * o2 < 0 and o3 * o4 < 0


def discriminant_graph(p: MomentPolytope, b: AdaptedBasis,
                       display_frame: Sequence[Sequence] | None = None) -> DiscriminantGraph:
    """Project the 1-skeleton of the moment polytope to the base.

    Positions use ``display_frame`` when given (any rational frame with
    <m0, e_i> = 1); edge classes and monodromy always use the lattice basis ``b``.
    """
    frame = [vec(v) for v in display_frame] if display_frame is not None else list(b.e)
    if any(dot(b.m0, v) != 1 for v in frame):
        raise ValueError("display frame vectors must pair to 1 with m0")
    n = b.n
    rays = p.fan.rays
    verts = tuple(projection_r(v, frame) for v in p.vertices)
    edges = []
    for e in p.skeleton:
        pair = tuple(sorted(rays[i] for i in e.active))
        if len(pair) == 2:
            delta = tuple(x - y for x, y in zip(*pair))
            mono = edge_monodromy(delta, b)
        else:
            delta = mono = None
        ftype = GENERIC if n == 3 else UNCLASSIFIED
        direction = None if e.bounded else primitive_int(projection_r(e.direction, frame))
        edges.append(GraphEdge(e.start, e.end, direction, pair, delta, mono, ftype))
    vrays = tuple(tuple(sorted(rays[i] for i in p.vertex_cone(v))) for v in range(len(verts)))
    g = DiscriminantGraph(n, verts, tuple(edges), vrays, (), b)
    vtypes = tuple(POSITIVE if n == 3 and g.valence(v) == 3 and len(vrays[v]) == 3
                   else UNCLASSIFIED for v in range(len(verts)))
    warnings = []
    if len(set(verts)) != len(verts):
        warnings.append("NonInjectiveProjection: vertices collide")
    if n == 3:
        segs = [(verts[e.start], verts[e.end]) for e in edges if e.bounded]
        for (a1, a2), (b1, b2) in itertools.combinations(segs, 2):
            if _segments_cross(a1, a2, b1, b2):
                warnings.append("NonInjectiveProjection: bounded edges cross")
                break
    return DiscriminantGraph(n, verts, tuple(edges), vrays, vtypes, b, False, tuple(warnings))


def _orientation(pair: tuple, triple: tuple) -> int:
    """+1 when pair follows the cyclic order of the sorted ray triple, -1 otherwise."""
    i, j = triple.index(pair[0]), triple.index(pair[1])
    return 1 if (j - i) % 3 == 1 else -1


def _power(t: Matrix, k: int) -> Matrix:
    return t if k == 1 else inverse(t)


def vertex_consistency(g: DiscriminantGraph) -> tuple[bool, list[int]]:
    """At each trivalent vertex the cyclically oriented classes sum to zero.

    Equivalently the ordered product of the three local monodromies is the
    identity; both are checked.
    """
    bad = []
    for v, triple in enumerate(g.vertex_rays):
        inc = g.incident(v)
        if len(inc) != 3 or len(triple) != 3 or any(e.delta is None for e in inc):
            continue
        try:
            signs = [_orientation(e.pair, triple) for e in inc]
        except ValueError:
            bad.append(v)
            continue
        total = [sum(s * e.delta[k] for s, e in zip(signs, inc)) for k in range(g.n)]
        prod = identity(g.n)
        for s, e in zip(signs, inc):
            prod = matmul(prod, _power(e.monodromy, s))
        if any(total) or prod != identity(g.n):
            bad.append(v)
    return not bad, bad


def _annihilator(a: Sequence[int]) -> tuple[tuple[int, ...], ...]:
    if not any(a):
        return tuple(tuple(int(i == j) for j in range(len(a))) for i in range(len(a)))
    return tuple(sign_normalize(k) for k in kernel_basis([list(a)]))


@dataclass(frozen=True)
class DualFibrationData:
    """Per-edge circle classes, monodromies and fiber types on a fixed graph.

    ``classes`` hold f-coordinates: the classes delta on the original side and
    primitive annihilators (in the dual basis of N_{m0}) on the dual side.
    """

    graph: DiscriminantGraph
    classes: tuple[tuple[tuple[int, ...], ...] | None, ...]
    monodromies: tuple[Matrix | None, ...]
    edge_types: tuple[str, ...]
    vertex_types: tuple[str, ...]
    is_dual: bool

    @property
    def circle_classes(self):
        return self.classes


def _data_of(g: DiscriminantGraph) -> DualFibrationData:
    classes = tuple(None if e.delta is None else (g.basis.f_coords(e.delta),) for e in g.edges)
    return DualFibrationData(g, classes, tuple(e.monodromy for e in g.edges),
                             tuple(e.fiber_type for e in g.edges), g.vertex_types, False)


def dualize(x: DiscriminantGraph | DualFibrationData) -> DualFibrationData:
    """Swap to the dual fibration: annihilator classes, inverse-transpose monodromy,
    and (1,2) <-> (2,1) vertex types. Applying it twice restores the monodromy."""
    if isinstance(x, DiscriminantGraph):
        ok, bad = vertex_consistency(x)
        if not ok:
            raise InconsistentGraph(f"classes do not close up at vertices {bad}")
        x = _data_of(x)
    classes = []
    for c in x.classes:
        if c is None:
            classes.append(None)
        elif len(c) == 1:
            classes.append(_annihilator(c[0]))
        else:
            # annihilator of a hyperplane of classes is a single line
            classes.append(tuple(sign_normalize(k) for k in kernel_basis([list(r) for r in c])))
    monos = tuple(None if t is None else
                  tuple(tuple(int(v) for v in row) for row in transpose(inverse(t)))
                  for t in x.monodromies)
    return DualFibrationData(x.graph, tuple(classes), monos, x.edge_types,
                             tuple(_SWAP.get(t, t) for t in x.vertex_types), not x.is_dual)


def is_unipotent_step(t: Matrix) -> bool:
    """(T - I)^2 == 0 and det T == 1."""
    n = len(t)
    a = tuple(tuple(t[i][j] - int(i == j) for j in range(n)) for i in range(n))
    return not any(any(r) for r in matmul(a, a)) and det(t) == 1
