from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.spatial import ConvexHull
from sympy.utilities.iterables import multiset_partitions

from slag_toric.cones import Cone, gorenstein_degree
from slag_toric.deformations import (LatticePolygon, MinkowskiDecomposition, altmann_cone, convex_hull,
                                     edge_vector_multiset, extremal_transition_report, im_i_power,
                                     minkowski_decompositions, plane_values, polygon_chart,
                                     smoothing_discriminant, verify_embedding)
from slag_toric.errors import InvalidDecomposition, TooLarge
from slag_toric.lattice import dot

from oracles import HEXAGON, SQUARE, Z3

HEX = LatticePolygon.from_points([(0, 0), (1, 0), (2, 1), (2, 2), (1, 2), (0, 1)])
SQ = LatticePolygon.from_points([(0, 0), (1, 0), (1, 1), (0, 1)])
TRI = LatticePolygon.from_points([(0, 0), (1, 0), (0, 1)])


def expanded_edges(p):
    return [v for v, k in edge_vector_multiset(p) for _ in range(k)]


def zero_sum(block):
    return not any(sum(v[i] for v in block) for i in (0, 1))


def brute_census(p):
    """(all nontrivial, maximal) decomposition counts from set partitions of the edge multiset."""
    edges = sorted(expanded_edges(p))
    seen_all, seen_max = set(), set()
    for part in multiset_partitions(edges):
        if len(part) < 2 or not all(zero_sum(b) for b in part):
            continue
        key = tuple(sorted(tuple(sorted(b)) for b in part))
        seen_all.add(key)
        minimal = all(not any(all(map(zero_sum, s)) for s in multiset_partitions(b, 2)) for b in part)
        if minimal:
            seen_max.add(key)
    return len(seen_all), len(seen_max)


def test_convex_hull_and_edges():
    assert convex_hull([(0, 0), (2, 0), (1, 0), (1, 1)]) == [(0, 0), (2, 0), (1, 1)]
    seg = LatticePolygon.from_points([(0, 0), (2, 0)])
    assert seg.edges == [((0, 0), (2, 0))]
    assert edge_vector_multiset(seg) == [((1, 0), 2), ((-1, 0), 2)]
    with pytest.raises(ValueError):
        LatticePolygon(((0, 0), (1, 0), (2, 0)))


@pytest.mark.parametrize("poly,counts", [(HEX, (5, 2)), (SQ, (1, 1)), (TRI, (0, 0))])
def test_census_matches_set_partition_oracle(poly, counts):
    assert brute_census(poly) == counts
    assert len(minkowski_decompositions(poly, maximal_only=False)) == counts[0]
    assert len(minkowski_decompositions(poly)) == counts[1]


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)), min_size=3, max_size=8))
def test_census_property(points):
    if len(set(points)) < 3 or np.linalg.matrix_rank(np.array(points) - points[0]) < 2:
        return
    p = LatticePolygon.from_points(points)
    if len(expanded_edges(p)) > 9:
        return
    decs = minkowski_decompositions(p, maximal_only=False)
    assert len(decs) == brute_census(p)[0]
    hull = ConvexHull(np.array(p.vertices, float))
    for d in decs:
        s = d.minkowski_sum()
        assert ConvexHull(np.array(s.vertices, float)).volume == pytest.approx(hull.volume)
        lo, lo_s = min(p.vertices), min(s.vertices)
        assert s.translated((lo[0] - lo_s[0], lo[1] - lo_s[1])) == p


def test_hexagon_decompositions():
    decs = minkowski_decompositions(HEX)
    shapes = sorted(tuple(len(s.vertices) for s in d.summands) for d in decs)
    assert shapes == [(2, 2, 2), (3, 3)]


def test_too_large():
    with pytest.raises(TooLarge):
        minkowski_decompositions(HEX, max_edges=4)
    with pytest.raises(TooLarge):
        minkowski_decompositions(HEX, budget=2)


def test_altmann_embeddings():
    for verts, poly in ((HEXAGON, HEX), (SQUARE, SQ)):
        g = gorenstein_degree(Cone.generated_by(Z3, verts))
        p, chart = polygon_chart(g)
        assert p == poly
        for d in minkowski_decompositions(p):
            a = altmann_cone(p, d, chart)
            assert all(dot(a.m0_prime, r) == 1 for r in a.sigma_tilde.rays)
            assert len(a.sigma_tilde.rays) == sum(len(s.vertices) for s in d.summands)
            assert verify_embedding(g, a)


def test_corrupted_embedding_fails():
    g = gorenstein_degree(Cone.generated_by(Z3, HEXAGON))
    p, chart = polygon_chart(g)
    a = altmann_cone(p, minkowski_decompositions(p)[0], chart)
    k = len(a.embedding) - 2
    bad = tuple(a.embedding[:2]) + ((0, 0, 1),) + tuple((0, 0, 0) for _ in range(k - 1))
    assert not verify_embedding(g, type(a)(a.decomposition, a.summands, a.sigma_tilde, a.m0_prime,
                                            bad, chart))


def test_invalid_decomposition():
    with pytest.raises(InvalidDecomposition):
        altmann_cone(HEX, MinkowskiDecomposition((TRI, TRI)))


def test_im_i_power_against_complex_arithmetic():
    for z in [(Fraction(1), Fraction(2)), (Fraction(-3, 2), Fraction(1, 3))]:
        for k in range(8):
            ref = ((1j) ** k * complex(z[0], z[1])).imag
            assert float(im_i_power(z, k)) == pytest.approx(ref)


def test_smoothing_components():
    x = [(Fraction(0), Fraction(0)), (Fraction(1), Fraction(2)), (Fraction(3), Fraction(-1))]
    by_shape = {}
    for d in minkowski_decompositions(HEX):
        sd = smoothing_discriminant(d, x[:d.p + 1])
        by_shape[len(d.summands)] = (len(sd.components), sd.distinct_planes, sd.generic)
    assert by_shape == {3: (3, 3, True), 2: (6, 2, True)}
    (d,) = minkowski_decompositions(SQ)
    sd = smoothing_discriminant(d, [(0, 0), (1, 1)])
    assert (len(sd.components), sd.distinct_planes) == (2, 2)
    with pytest.raises(ValueError):
        smoothing_discriminant(d, [(0, 0)])


def test_planes_converge_as_parameters_shrink():
    x = [(Fraction(0), Fraction(0)), (Fraction(1), Fraction(2)), (Fraction(3), Fraction(-1))]
    for s in (1, Fraction(1, 10), Fraction(1, 1000), 0):
        vals = plane_values([(s * a, s * b) for a, b in x], 3)
        assert max(vals) - min(vals) == s * (max(plane_values(x, 3)) - min(plane_values(x, 3)))
    g = gorenstein_degree(Cone.generated_by(Z3, HEXAGON))
    d = [d for d in minkowski_decompositions(HEX) if d.p == 2][0]
    rep = extremal_transition_report(g, [], smoothing_discriminant(d, x), x=x, decomposition=d)
    assert rep["collapsed"] and rep["collapse"][-1][1] == 0
    assert Counter(s for s, _ in rep["collapse"]) == Counter([1, Fraction(1, 10), Fraction(1, 100), 0])
