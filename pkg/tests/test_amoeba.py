import numpy as np
import pytest

from slag_toric.amoeba import (AmoebaCloud, LaurentPolynomial2, amoeba_sample, curve_family,
                               fattening_check, required_eps, specialize)
from slag_toric.errors import DegenerateSpecialization
from slag_toric.tropical import TropicalPolynomial, tropical_curve

MIRROR = ((1, 0), (0, 1), (-1, -1), (0, 0))
PHI = (1, 1, 1, 0)


def mirror(t):
    return curve_family(MIRROR, PHI, (1, 1, 1, 1), t)


def test_specialization_coefficients():
    h = mirror(0.01)
    assert np.allclose(specialize(h, 1.0), [0.01, 1.01, 0.01])


def test_roots_match_quadratic_formula():
    t = 0.05
    h = mirror(t)
    x, thetas = 0.7, np.linspace(0, 2 * np.pi, 16, endpoint=False)
    cloud = amoeba_sample(h, [x], thetas)
    got = sorted(cloud.points.tolist())
    expected = []
    for th in thetas:
        z1 = np.exp(x + 1j * th)
        # z2 * h = t z2^2 + (1 + t z1) z2 + t / z1
        a, b, c = t, 1 + t * z1, t / z1
        disc = np.sqrt(b * b - 4 * a * c)
        for z2 in ((-b + disc) / (2 * a), (-b - disc) / (2 * a)):
            expected.append([np.log(abs(z1)), np.log(abs(z2))])
    assert np.allclose(sorted(expected), got, atol=1e-10)
    assert cloud.discarded == 0


def test_binomial_cloud_lies_on_its_line():
    h = LaurentPolynomial2((((0, 0), 1), ((1, 1), 1)))
    grid = np.linspace(-2, 2, 41)
    cloud = amoeba_sample(h, grid, 16, x2_grid=grid)
    assert np.abs(cloud.points.sum(axis=1)).max() < 1e-12
    tc = tropical_curve(TropicalPolynomial(((0, 0), (1, 1)), (0, 0)))
    res = 0.1 * np.sqrt(2)
    assert fattening_check(cloud, tc, 1e-9, window=2.0, resolution=res) == (1.0, 1.0)


def test_degenerate_slices():
    # z1 - 1 vanishes identically in z2 on the slice through z1 = 1
    h = LaurentPolynomial2((((1, 0), 1), ((0, 0), -1), ((0, 1), 0)))
    cloud = amoeba_sample(h, [0.0], [0.0, 1.0])
    assert cloud.degenerate >= 1
    with pytest.raises(DegenerateSpecialization):
        amoeba_sample(h, [0.0], [0.0], strict=True)
    assert LaurentPolynomial2((((0, 0), 1),)).degenerate


def test_thread_count_does_not_change_samples(monkeypatch):
    h = mirror(0.1)
    grid = np.linspace(-5, 5, 21)
    monkeypatch.setenv("SLAG_TORIC_THREADS", "1")
    a = amoeba_sample(h, grid, 8, x2_grid=grid).points
    monkeypatch.setenv("SLAG_TORIC_THREADS", "4")
    b = amoeba_sample(h, grid, 8, x2_grid=grid).points
    assert a.tobytes() == b.tobytes()


def test_fattening_tightens_as_t_shrinks():
    tp = TropicalPolynomial.from_phi(MIRROR, PHI)
    eps = []
    for t in (0.1, 0.01):
        big_l = -np.log(t)
        w = 3 * big_l
        grid = np.linspace(-w, w, 80)
        cloud = amoeba_sample(mirror(t), grid, 32, x2_grid=grid)
        tc = tropical_curve(tp, big_l)
        contained, covers = fattening_check(cloud, tc, 1.0, w)
        assert contained >= 0.99 and covers >= 0.95
        eps.append(required_eps(cloud, tc, w))
    assert eps[1] < eps[0]


def test_empty_cloud_fails_coverage():
    tc = tropical_curve(TropicalPolynomial.from_phi(MIRROR, PHI), 2.0)
    empty = AmoebaCloud(np.zeros((0, 2)))
    assert fattening_check(empty, tc, 1.0, 5.0) == (0.0, 0.0)
    assert required_eps(empty, tc, 5.0) == float("inf")


def test_curve_family_validates_t():
    with pytest.raises(ValueError):
        mirror(0.0)
