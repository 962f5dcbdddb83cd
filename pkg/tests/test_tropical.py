import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from slag_toric.errors import DegenerateHeights
from slag_toric.lattice import solve
from slag_toric.tropical import (PlanarGraph, TropicalPolynomial, compare_spine_to_discriminant,
                                 planar_graph, tropical_curve)

MIRROR = ((1, 0), (0, 1), (-1, -1), (0, 0))


def brute_vertices(tp):
    """Points where three affinely independent terms tie for the maximum."""
    out = set()
    pts, hs = tp.support, tp.heights
    for i, j, k in itertools.combinations(range(len(pts)), 3):
        a = [(pts[m][0] - pts[i][0], pts[m][1] - pts[i][1]) for m in (j, k)]
        if a[0][0] * a[1][1] - a[0][1] * a[1][0] == 0:
            continue
        y = solve(a, [hs[i] - hs[j], hs[i] - hs[k]])
        if len(tp.dominant(y)) >= 3 and {i, j, k} <= set(tp.dominant(y)):
            out.add(tuple(y))
    return out


def test_mirror_curve_spine():
    tc = tropical_curve(TropicalPolynomial.from_phi(MIRROR, (1, 1, 1, 0)))
    assert sorted(tc.vertices) == [(-2, 1), (1, -2), (1, 1)]
    assert len(tc.bounded_edges) == 3 and len(tc.rays) == 3
    assert sorted(e.direction for e in tc.rays) == [(-2, 1), (1, -2), (1, 1)]
    assert tc.balanced()
    scaled = tc.rescaled(2.0).positions()
    assert sorted(map(tuple, scaled.tolist())) == [(-4.0, 2.0), (2.0, -4.0), (2.0, 2.0)]


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(-2, 2), st.integers(-2, 2)), min_size=3, max_size=7, unique=True),
       st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=4), min_size=7, max_size=7))
def test_vertices_and_edges_match_brute_force(support, heights):
    tp = TropicalPolynomial(tuple(support), tuple(heights[:len(support)]))
    tc = tropical_curve(tp)
    if tc.lines:
        return
    assert set(tc.vertices) == brute_vertices(tp)
    assert tc.balanced()
    for e in tc.edges:
        a = tc.vertices[e.start]
        if e.bounded:
            b = tc.vertices[e.end]
            probe = ((a[0] + b[0]) / 2, (a[1] + b[1]) / 2)
        else:
            probe = (a[0] + e.direction[0], a[1] + e.direction[1])
        dom = tp.dominant(probe)
        assert set(e.dual) <= set(dom)
        # the dominant terms along an edge are collinear
        base = tp.support[dom[0]]
        vecs = [(tp.support[m][0] - base[0], tp.support[m][1] - base[1]) for m in dom]
        assert all(u[0] * v[1] - u[1] * v[0] == 0 for u in vecs for v in vecs)


def test_binomial_is_a_line():
    tc = tropical_curve(TropicalPolynomial(((0, 0), (1, 1)), (0, 0)))
    assert tc.vertices == () and len(tc.lines) == 1
    ln = tc.lines[0]
    assert ln.point == (0, 0) and ln.direction in ((1, -1), (-1, 1))


def test_square_subdivisions():
    sq = ((0, 0), (1, 0), (1, 1), (0, 1))
    flat = tropical_curve(TropicalPolynomial(sq, (0, 0, 0, 0)))
    assert flat.vertices == ((0, 0),) and len(flat.rays) == 4
    tilted = tropical_curve(TropicalPolynomial(sq, (1, 0, 1, 0)))
    assert len(tilted.vertices) == 2 and len(tilted.bounded_edges) == 1
    assert tilted.balanced()


def test_degenerate_heights():
    with pytest.raises(DegenerateHeights):
        tropical_curve(TropicalPolynomial(((0, 0),), (0,)))
    with pytest.raises(DegenerateHeights):
        TropicalPolynomial(((0, 0), (1, 0)), (0, float("inf")))


def test_compare_spine_to_itself_and_to_a_mismatch():
    tc = tropical_curve(TropicalPolynomial.from_phi(MIRROR, (1, 1, 1, 0)))
    rep = compare_spine_to_discriminant(tc, planar_graph(tc))
    assert rep["isomorphic"] and rep["discrepancy"] == 0 and rep["scale"] == pytest.approx(1.0)
    flipped = planar_graph(tc, ((-1, 0), (0, -1)))
    assert not compare_spine_to_discriminant(tc, flipped)["isomorphic"]
    assert compare_spine_to_discriminant(tc, flipped, ((-1, 0), (0, -1)))["isomorphic"]
    other = PlanarGraph(planar_graph(tc).positions, ((0, 1),), planar_graph(tc).rays)
    assert not compare_spine_to_discriminant(tc, other)["isomorphic"]


def test_exact_heights_are_kept_rational():
    tp = TropicalPolynomial.from_phi(MIRROR, ("1/3", 1, 1, 0))
    assert all(isinstance(h, Fraction) for h in tp.heights)
    assert all(isinstance(c, Fraction) for v in tropical_curve(tp).vertices for c in v)
