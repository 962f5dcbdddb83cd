"""Exact tropical curves of max-plus polynomials in two variables.

Heights are rational numbers h_k and an optional positive float scale L.
The curve is the corner locus of ``max_k (L*h_k + <a_k, x>)``; since
x = L*y reduces it to ``L * max_k (h_k + <a_k, y>)``, all combinatorics are
computed exactly for L = 1 and positions are scaled afterwards.
With h_k = -phi_k and L = -log t this is the spine of the amoeba of
``sum t^phi_k m_k z^a_k``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isfinite
from typing import Sequence

import networkx as nx
import numpy as np

from .deformations import convex_hull
from .errors import DegenerateHeights
from .lattice import frac, primitive_int, rank, solve

Point = tuple[int, int]


@dataclass(frozen=True)
class TropicalPolynomial:
    support: tuple[Point, ...]
    heights: tuple[Fraction, ...]

    def __post_init__(self):
        sup = tuple((int(a), int(b)) for a, b in self.support)
        if len(set(sup)) != len(sup):
            raise ValueError("support points must be distinct")
        if len(sup) != len(self.heights):
            raise ValueError("one height per support point is required")
        hs = []
        for h in self.heights:
            if isinstance(h, float) and not isfinite(h):
                raise DegenerateHeights("heights must be finite")
            hs.append(Fraction(h) if isinstance(h, float) else frac(h))
        object.__setattr__(self, "support", sup)
        object.__setattr__(self, "heights", tuple(hs))

    @classmethod
    def from_phi(cls, support: Sequence[Point], phi: Sequence) -> "TropicalPolynomial":
        """Heights -phi, so that scaling by L = -log t gives valuations of t^phi."""
        return cls(tuple(support), tuple(-frac(p) for p in phi))

    def value(self, y: Sequence) -> Fraction:
        return max(h + a[0] * y[0] + a[1] * y[1] for a, h in zip(self.support, self.heights))

    def dominant(self, y: Sequence) -> list[int]:
        vals = [h + a[0] * y[0] + a[1] * y[1] for a, h in zip(self.support, self.heights)]
        top = max(vals)
        return [i for i, v in enumerate(vals) if v == top]


@dataclass(frozen=True)
class TropicalEdge:
    start: int
    end: int | None
    direction: tuple[int, int]
    multiplicity: int
    dual: tuple[int, int]

    @property
    def bounded(self) -> bool:
        return self.end is not None


@dataclass(frozen=True)
class TropicalLine:
    """A full line {y : <normal, y> = level} from collinear support."""

    point: tuple[Fraction, Fraction]
    direction: tuple[int, int]
    multiplicity: int


@dataclass(frozen=True)
class TropicalCurve:
    vertices: tuple[tuple[Fraction, Fraction], ...]
    edges: tuple[TropicalEdge, ...]
    cells: tuple[tuple[int, ...], ...]
    lines: tuple[TropicalLine, ...] = ()
    scale: float = 1.0

    @property
    def bounded_edges(self) -> list[TropicalEdge]:
        return [e for e in self.edges if e.bounded]

    @property
    def rays(self) -> list[TropicalEdge]:
        return [e for e in self.edges if not e.bounded]

    @property
    def dual_subdivision(self) -> tuple[tuple[int, ...], ...]:
        return self.cells

    def positions(self) -> np.ndarray:
        return np.array([[float(x) * self.scale, float(y) * self.scale] for x, y in self.vertices])

    def rescaled(self, scale: float) -> "TropicalCurve":
        return TropicalCurve(self.vertices, self.edges, self.cells, self.lines, float(scale))

    def balanced(self) -> bool:
        for v in range(len(self.vertices)):
            sx = sy = 0
            for e in self.edges:
                if e.start == v:
                    sx += e.multiplicity * e.direction[0]
                    sy += e.multiplicity * e.direction[1]
                if e.end == v:
                    sx -= e.multiplicity * e.direction[0]
                    sy -= e.multiplicity * e.direction[1]
            if sx or sy:
                return False
        return True

    def segments(self, window: float | None = None) -> list[tuple[np.ndarray, np.ndarray]]:
        """Spine pieces as float segments; rays and lines are clipped to a long length."""
        pos = self.positions()
        far = 10.0 * (window or 1.0) + 10.0 * float(np.abs(pos).max(initial=0.0))
        out = []
        for e in self.edges:
            a = pos[e.start]
            if e.bounded:
                out.append((a, pos[e.end]))
            else:
                d = np.array(e.direction, float)
                out.append((a, a + far * d / np.linalg.norm(d)))
        for ln in self.lines:
            p = np.array([float(ln.point[0]), float(ln.point[1])]) * self.scale
            d = np.array(ln.direction, float)
            d /= np.linalg.norm(d)
            out.append((p - far * d, p + far * d))
        return out


def _upper_faces(pts: Sequence[Point], hs: Sequence[Fraction]) -> dict:
    """Planes h = u.a + w supporting the lifted points from above, with their point sets."""
    faces = {}
    n = len(pts)
    for i, j, k in itertools.combinations(range(n), 3):
        a, b, c = pts[i], pts[j], pts[k]
        if (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]) == 0:
            continue
        sol = solve([(a[0], a[1], 1), (b[0], b[1], 1), (c[0], c[1], 1)], [hs[i], hs[j], hs[k]])
        u1, u2, w = sol
        if (u1, u2, w) in faces:
            continue
        vals = [hs[m] - (u1 * pts[m][0] + u2 * pts[m][1] + w) for m in range(n)]
        if all(v <= 0 for v in vals):
            faces[(u1, u2, w)] = tuple(m for m in range(n) if vals[m] == 0)
    return faces


def _hull_edges(pts: Sequence[Point], idx: Sequence[int]) -> list[tuple[int, int]]:
    """Edges of the convex hull of a planar point subset, as index pairs of extreme points."""
    hull = convex_hull([pts[i] for i in idx])
    where = {pts[i]: i for i in idx}
    h = [where[p] for p in hull]
    return [(h[i], h[(i + 1) % len(h)]) for i in range(len(h))]


def tropical_curve(tp: TropicalPolynomial, scale: float = 1.0) -> TropicalCurve:
    """Corner locus of max_k (h_k + <a_k, y>) with its dual regular subdivision."""
    pts, hs = tp.support, tp.heights
    if len(pts) < 2:
        raise DegenerateHeights("a tropical polynomial needs at least two terms")
    if rank([(p[0] - pts[0][0], p[1] - pts[0][1]) for p in pts[1:]]) < 2:
        return TropicalCurve((), (), (), _collinear_lines(pts, hs), float(scale))
    faces = _upper_faces(pts, hs)
    keys = sorted(faces)
    vertices = tuple((-u1, -u2) for u1, u2, _ in keys)
    cells = tuple(faces[k] for k in keys)
    owners: dict[tuple[int, int], list[int]] = {}
    for c, idx in enumerate(cells):
        for i, j in _hull_edges(pts, idx):
            owners.setdefault(tuple(sorted((i, j))), []).append(c)
    edges = []
    for (i, j), cs in sorted(owners.items()):
        dx, dy = pts[j][0] - pts[i][0], pts[j][1] - pts[i][1]
        mult = gcd(dx, dy)
        if len(cs) == 2:
            c0, c1 = cs
            d = primitive_int((vertices[c1][0] - vertices[c0][0], vertices[c1][1] - vertices[c0][1]))
            edges.append(TropicalEdge(c0, c1, d, mult, (i, j)))
        else:
            (c0,) = cs
            normal = (dy // mult, -dx // mult)
            # outward: away from the rest of the cell
            off = [normal[0] * (pts[m][0] - pts[i][0]) + normal[1] * (pts[m][1] - pts[i][1])
                   for m in cells[c0]]
            if any(v > 0 for v in off):
                normal = (-normal[0], -normal[1])
            edges.append(TropicalEdge(c0, None, normal, mult, (i, j)))
    return TropicalCurve(vertices, tuple(edges), cells, (), float(scale))


def _collinear_lines(pts, hs) -> tuple[TropicalLine, ...]:
    base = pts[0]
    v = primitive_int(next((p[0] - base[0], p[1] - base[1]) for p in pts[1:]
                           if p != base))
    ts = [((p[0] - base[0]) * v[0] + (p[1] - base[1]) * v[1]) // (v[0] ** 2 + v[1] ** 2)
          for p in pts]
    lifted = sorted(zip(ts, hs))
    hull: list[tuple[int, Fraction]] = []
    for q in lifted:
        while len(hull) >= 2:
            (t1, h1), (t2, h2) = hull[-2], hull[-1]
            if (h2 - h1) * (q[0] - t1) <= (q[1] - h1) * (t2 - t1):
                hull.pop()
            else:
                break
        hull.append(q)
    lines = []
    norm2 = v[0] ** 2 + v[1] ** 2
    for (t1, h1), (t2, h2) in zip(hull, hull[1:]):
        # h1 + t1 <v,y> = h2 + t2 <v,y>  along <v,y> = level
        level = -(h2 - h1) / (t2 - t1)
        point = (level * v[0] / norm2, level * v[1] / norm2)
        lines.append(TropicalLine(point, (-v[1], v[0]), t2 - t1))
    return tuple(lines)


@dataclass(frozen=True)
class PlanarGraph:
    """Positions, bounded edges and rays of an embedded planar graph (floats)."""

    positions: np.ndarray
    bounded: tuple[tuple[int, int], ...]
    rays: tuple[tuple[int, tuple[int, int]], ...]

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        for i in range(len(self.positions)):
            g.add_node(("v", i), kind="vertex", direction=None)
        for i, j in self.bounded:
            g.add_edge(("v", i), ("v", j))
        for k, (i, d) in enumerate(self.rays):
            g.add_node(("r", k), kind="ray", direction=tuple(d))
            g.add_edge(("v", i), ("r", k))
        return g


def planar_graph(obj, linear_map: Sequence[Sequence[int]] | None = None) -> PlanarGraph:
    """Normalize a tropical curve, a discriminant graph or a planar graph, optionally mapped."""
    if isinstance(obj, PlanarGraph):
        pg = obj
    elif isinstance(obj, TropicalCurve):
        pg = PlanarGraph(obj.positions(), tuple((e.start, e.end) for e in obj.bounded_edges),
                         tuple((e.start, tuple(e.direction)) for e in obj.rays))
    else:
        pos = np.array([[float(x) for x in v] for v in obj.vertices], float).reshape(-1, 2)
        pg = PlanarGraph(pos, tuple((e.start, e.end) for e in obj.bounded_edges),
                         tuple((e.start, tuple(e.direction)) for e in obj.rays))
    if linear_map is None:
        return pg
    a = np.array(linear_map, dtype=object)
    pos = pg.positions @ np.array(linear_map, float).T if len(pg.positions) else pg.positions
    rays = tuple((i, primitive_int(tuple(a.dot(np.array(d, dtype=object)))))
                 for i, d in pg.rays)
    return PlanarGraph(pos, pg.bounded, rays)


def compare_spine_to_discriminant(tc, g, basis_change: Sequence[Sequence[int]] | None = None) -> dict:
    """Combinatorial isomorphism (ray directions matched through the basis change) and
    the vertex discrepancy after the best uniform scale fitted from the spine to the graph."""
    a = planar_graph(tc, basis_change)
    b = planar_graph(g)
    report = {
        "counts_spine": (len(a.positions), len(a.bounded), len(a.rays)),
        "counts_graph": (len(b.positions), len(b.bounded), len(b.rays)),
        "isomorphic": False,
        "mapping": None,
        "scale": None,
        "discrepancy": None,
    }
    ga, gb = a.to_networkx(), b.to_networkx()
    matcher = nx.algorithms.isomorphism.GraphMatcher(
        ga, gb, node_match=lambda x, y: x["kind"] == y["kind"] and x["direction"] == y["direction"])
    best = None
    for m in matcher.isomorphisms_iter():
        vmap = sorted((i, j) for (ka, i), (kb, j) in m.items() if ka == "v")
        if not vmap:
            best = (0.0, 1.0, vmap)
            break
        src = np.array([a.positions[i] for i, _ in vmap])
        dst = np.array([b.positions[j] for _, j in vmap])
        denom = float((src * src).sum())
        s = float((src * dst).sum()) / denom if denom > 0 else 1.0
        err = float(np.abs(dst - s * src).max())
        if best is None or err < best[0]:
            best = (err, s, vmap)
    if best is not None:
        report.update(isomorphic=True, mapping=best[2], scale=best[1], discrepancy=best[0])
    return report
