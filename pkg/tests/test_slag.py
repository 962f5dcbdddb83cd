import numpy as np
import pytest
import sympy

from slag_toric.errors import OnDivisor, SingularMetric
from slag_toric.slag import (AFFINE, PROPER, TorusInvariantPotential, certify, fibration_map,
                             hamiltonian_check, kahler_form, random_seed_point, sample_fiber, to_complex,
                             to_real, verify_slag)


def symbolic_kahler(lam, point):
    """omega = (1/4) d d^c K in real coordinates (x1, y1, x2, y2), K = phi(|z1|^2, |z2|^2)."""
    xs = sympy.symbols("x1 y1 x2 y2", real=True)
    s = [xs[0] ** 2 + xs[1] ** 2, xs[2] ** 2 + xs[3] ** 2]
    k = sum(s) + lam * sum(v ** 2 for v in s)
    # J maps d/dx to d/dy and d/dy to -d/dx
    jmat = sympy.zeros(4)
    for i in range(2):
        jmat[2 * i + 1, 2 * i] = 1
        jmat[2 * i, 2 * i + 1] = -1
    grad = [sympy.diff(k, v) for v in xs]
    alpha = [-sum(grad[c] * jmat[c, b] for c in range(4)) for b in range(4)]
    w = sympy.Matrix(4, 4, lambda a, b: (sympy.diff(alpha[b], xs[a]) - sympy.diff(alpha[a], xs[b])) / 4)
    return np.array(w.subs(dict(zip(xs, point))).evalf(), dtype=float)


@pytest.mark.parametrize("lam", [0.0, 0.25, 1.0])
def test_kahler_form_against_symbolic_expansion(lam):
    z = np.array([0.7 - 0.4j, -1.1 + 0.3j])
    p = TorusInvariantPotential.quadratic(2, lam)
    assert np.allclose(kahler_form(p, z), symbolic_kahler(lam, to_real(z)), atol=1e-12)


def test_real_complex_roundtrip():
    z = np.array([1 + 2j, -3 + 0.5j])
    assert np.array_equal(to_complex(to_real(z)), z)


def test_flat_fibration_map_values():
    p = TorusInvariantPotential.flat(3)
    assert np.allclose(fibration_map(p, np.array([2, 1, 1], complex)), [3, 3, 0])
    z = np.array([1j, 1, 1])
    # Im(i^4 * i) = 1
    assert fibration_map(p, z)[-1] == pytest.approx(1.0)
    with pytest.raises(OnDivisor):
        fibration_map(p, np.array([-1, 1, 1], complex), PROPER)
    with pytest.raises(ValueError):
        fibration_map(p, z, "other")


def test_singular_metric_detected():
    p = TorusInvariantPotential.quadratic(2, -1.0)
    with pytest.raises(SingularMetric):
        kahler_form(p, np.array([1.0, 1.0], complex))


@pytest.mark.parametrize("variant", [AFFINE, PROPER])
def test_fiber_samples_lie_on_one_fiber(variant):
    rng = np.random.default_rng(3)
    p = TorusInvariantPotential.quadratic(3)
    z0 = random_seed_point(3, rng, variant)
    pts, target = sample_fiber(p, z0, 20, rng, variant)
    for z in pts:
        assert np.abs(fibration_map(p, z, variant) - target).max() < 1e-10
    assert len({tuple(np.round(z, 6)) for z in pts}) == 20


@pytest.mark.parametrize("name", ["flat", "quadratic"])
@pytest.mark.parametrize("n", [2, 3])
def test_slag_residuals_and_negative_control(name, n):
    p = TorusInvariantPotential.named(name, n)
    good = certify(p, AFFINE, fibers=2, points=10, seed=1)
    bad = certify(p, AFFINE, fibers=2, points=10, seed=1, corrupted=True)
    assert good.passed and good.max_omega < 1e-8 and good.max_im_omega < 1e-8
    assert not bad.passed and bad.max_omega > 1e4 * max(good.max_omega, 1e-12)


def test_verify_single_point():
    p = TorusInvariantPotential.flat(2)
    r = verify_slag(p, np.array([0.8 + 0.1j, 1.2 - 0.5j]), PROPER)
    assert r.passed(1e-6) and not r.critical


def test_critical_point_is_flagged():
    p = TorusInvariantPotential.flat(2)
    r = verify_slag(p, np.array([0, 0], complex))
    assert r.critical and not r.passed(1.0)


def test_hamiltonian_identity():
    rng = np.random.default_rng(0)
    p = TorusInvariantPotential.quadratic(3, 0.5)
    for _ in range(5):
        z = random_seed_point(3, rng)
        assert max(hamiltonian_check(p, j, z) for j in range(3)) < 1e-7


def test_certify_is_seed_deterministic():
    p = TorusInvariantPotential.quadratic(2)
    assert certify(p, fibers=2, points=5, seed=7) == certify(p, fibers=2, points=5, seed=7)


def test_custom_potential_matches_closed_form():
    lam = 0.3
    custom = TorusInvariantPotential.from_function(2, lambda x: x.sum(-1) + lam * (x * x).sum(-1))
    ref = TorusInvariantPotential.quadratic(2, lam)
    z = np.array([0.9 + 0.2j, 0.4 - 1.0j])
    assert np.allclose(kahler_form(custom, z), kahler_form(ref, z), atol=1e-6)
