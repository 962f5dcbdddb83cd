"""Numerical checks of the special Lagrangian fibrations built from torus-invariant potentials.

Points of C^n are complex arrays with the coordinates on the last axis; real
tangent vectors use the ordering (Re z_1, Im z_1, ..., Re z_n, Im z_n).
A potential phi(x_1..x_n) is pulled back through x_i = |z_i|^2 and gives
omega = (i/2) d d-bar phi, so omega(u, v) = -Im(U^T H conj(V)) with
H[j][i] = delta_ij phi_i + phi_ij conj(z_j) z_i.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import OnDivisor, SingularMetric

AFFINE = "affine"
PROPER = "proper"


@dataclass(frozen=True)
class TorusInvariantPotential:
    """phi with gradient and Hessian evaluators on arrays x of shape (..., n)."""

    n: int
    name: str
    phi: Callable[[np.ndarray], np.ndarray]
    grad: Callable[[np.ndarray], np.ndarray]
    hess: Callable[[np.ndarray], np.ndarray]
    params: dict = field(default_factory=dict)

    @classmethod
    def flat(cls, n: int) -> "TorusInvariantPotential":
        return cls(n, "flat",
                   lambda x: np.sum(x, axis=-1),
                   lambda x: np.ones_like(x),
                   lambda x: np.zeros(x.shape + (n,)))

    @classmethod
    def quadratic(cls, n: int, lam: float = 0.25) -> "TorusInvariantPotential":
        """phi = sum x_i + lam * sum x_i^2 (plurisubharmonic for lam >= 0)."""
        return cls(n, "quadratic",
                   lambda x: np.sum(x, axis=-1) + lam * np.sum(x * x, axis=-1),
                   lambda x: 1.0 + 2.0 * lam * x,
                   lambda x: 2.0 * lam * np.eye(n) * np.ones(x.shape + (n,)),
                   {"lambda": lam})

    @classmethod
    def from_function(cls, n: int, f: Callable[[np.ndarray], np.ndarray],
                      step: float = 1e-4) -> "TorusInvariantPotential":
        """Finite-difference gradient and Hessian of a user-supplied phi."""
        eye = np.eye(n)

        def grad(x):
            return np.stack([(f(x + step * eye[i]) - f(x - step * eye[i])) / (2 * step)
                             for i in range(n)], axis=-1)

        def hess(x):
            return np.stack([(grad(x + step * eye[i]) - grad(x - step * eye[i])) / (2 * step)
                             for i in range(n)], axis=-1)

        return cls(n, "custom", f, grad, hess)

    @classmethod
    def named(cls, name: str, n: int, lam: float = 0.25) -> "TorusInvariantPotential":
        if name == "flat":
            return cls.flat(n)
        if name == "quadratic":
            return cls.quadratic(n, lam)
        raise ValueError(f"unknown potential {name!r}")


def _abs2(z: np.ndarray) -> np.ndarray:
    return (z * z.conj()).real


def hermitian_matrix(p: TorusInvariantPotential, z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, complex)
    x = _abs2(z)
    g = p.grad(x)
    h = p.hess(x)
    return np.diag(g) + h * np.outer(z.conj(), z)


def _real_to_complex_basis(n: int) -> np.ndarray:
    """n x 2n matrix whose column a is the complex vector of the a-th real basis vector."""
    b = np.zeros((n, 2 * n), complex)
    for k in range(n):
        b[k, 2 * k] = 1.0
        b[k, 2 * k + 1] = 1.0j
    return b


def to_complex(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, float)
    return v[..., 0::2] + 1j * v[..., 1::2]


def to_real(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, complex)
    out = np.empty(z.shape[:-1] + (2 * z.shape[-1],))
    out[..., 0::2] = z.real
    out[..., 1::2] = z.imag
    return out


def kahler_form(p: TorusInvariantPotential, z, check: bool = True) -> np.ndarray:
    """The 2n x 2n antisymmetric matrix W with omega(u, v) = u^T W v."""
    z = np.asarray(z, complex)
    h = hermitian_matrix(p, z)
    if check:
        ev = np.linalg.eigvalsh(h)
        if ev.min() <= 1e-12 * max(1.0, abs(ev.max())):
            raise SingularMetric(f"metric degenerate at z = {z}")
    b = _real_to_complex_basis(p.n)
    s = -(b.T @ h @ b.conj()).imag
    return 0.5 * (s - s.T)


def fibration_map(p: TorusInvariantPotential, z, variant: str = AFFINE,
                  corrupted: bool = False) -> np.ndarray:
    """(phi_1|z_1|^2 - phi_k|z_k|^2 for k = 2..n, Im(i^(n+1) prod z)) for the affine variant,
    (log|1 + prod z|, phi_1|z_1|^2 - phi_k|z_k|^2 ...) for the proper one.

    ``corrupted`` replaces the first moment component with phi_1|z_1|^2 alone,
    a deliberately wrong map used as a negative control.
    """
    z = np.asarray(z, complex)
    n = p.n
    x = _abs2(z)
    m = p.grad(x) * x
    mu0 = m[..., :1] - m[..., 1:]
    if corrupted:
        mu0 = mu0.copy()
        mu0[..., 0] = m[..., 0]
    prod = np.prod(z, axis=-1)
    if variant == AFFINE:
        last = ((1j ** (n + 1)) * prod).imag
        return np.concatenate([mu0, last[..., None]], axis=-1)
    if variant == PROPER:
        w = np.abs(1 + prod)
        if np.any(w == 0):
            raise OnDivisor("1 + prod z vanishes")
        return np.concatenate([np.log(w)[..., None], mu0], axis=-1)
    raise ValueError(f"unknown variant {variant!r}")


def jacobian(p: TorusInvariantPotential, z, variant: str = AFFINE, h_fd: float = 1e-5,
             corrupted: bool = False) -> np.ndarray:
    """n x 2n real Jacobian by central differences with relative step h_fd."""
    x = to_real(np.asarray(z, complex))
    dim = len(x)
    steps = h_fd * np.maximum(1.0, np.abs(x))
    shifts = np.eye(dim) * steps[:, None]
    plus = fibration_map(p, to_complex(x + shifts), variant, corrupted)
    minus = fibration_map(p, to_complex(x - shifts), variant, corrupted)
    return ((plus - minus) / (2 * steps[:, None])).T


@dataclass(frozen=True)
class SlagResidual:
    omega: float
    im_omega: float
    critical: bool
    singular_values: tuple[float, ...]

    def passed(self, tol: float) -> bool:
        return not self.critical and self.omega < tol and self.im_omega < tol


def tangent_space(jac: np.ndarray, rel: float = 1e-8) -> tuple[np.ndarray | None, np.ndarray]:
    """Orthonormal basis (columns) of the null space of the Jacobian, or None when critical."""
    u, s, vt = np.linalg.svd(jac)
    r = int(np.sum(s > rel * s[0])) if s.size and s[0] > 0 else 0
    if r < jac.shape[0]:
        return None, s
    return vt[r:].T, s


def verify_slag(p: TorusInvariantPotential, z, variant: str = AFFINE, tol: float = 1e-7,
                h_fd: float = 1e-5, corrupted: bool = False) -> SlagResidual:
    """Restrict omega and Im Omega (or Im Omega') to the numerical fiber tangent space."""
    z = np.asarray(z, complex)
    jac = jacobian(p, z, variant, h_fd, corrupted)
    basis, s = tangent_space(jac)
    if basis is None:
        return SlagResidual(float("nan"), float("nan"), True, tuple(map(float, s)))
    w = kahler_form(p, z)
    om = basis.T @ w @ basis
    c = to_complex(basis.T).T
    vol = np.linalg.det(c)
    if variant == PROPER:
        vol = vol / ((1j ** p.n) * (1 + np.prod(z)))
    return SlagResidual(float(np.abs(om).max()), float(abs(vol.imag)), False, tuple(map(float, s)))


def project_to_fiber(p: TorusInvariantPotential, z, target: np.ndarray, variant: str = AFFINE,
                     iters: int = 30, h_fd: float = 1e-6, atol: float = 1e-13) -> np.ndarray:
    """Gauss-Newton (minimum-norm steps) from z onto the level set f = target."""
    x = to_real(np.asarray(z, complex))
    for _ in range(iters):
        zc = to_complex(x)
        r = fibration_map(p, zc, variant) - target
        if np.abs(r).max() < atol:
            break
        jac = jacobian(p, zc, variant, h_fd)
        x = x - np.linalg.lstsq(jac, r, rcond=None)[0]
    return to_complex(x)


def torus_rotation(z, theta) -> np.ndarray:
    """Phase rotation; with sum(theta) = 0 it moves along the fiber exactly."""
    return np.asarray(z, complex) * np.exp(1j * np.asarray(theta, float))


def sample_fiber(p: TorusInvariantPotential, seed_z, count: int, rng: np.random.Generator,
                 variant: str = AFFINE, spread: float = 0.05) -> tuple[np.ndarray, np.ndarray]:
    """Points on the fiber through seed_z: random N_{m0} rotations of projected perturbations."""
    seed_z = np.asarray(seed_z, complex)
    target = fibration_map(p, seed_z, variant)
    pts = []
    for _ in range(count):
        theta = rng.uniform(-np.pi, np.pi, p.n)
        theta -= theta.mean()
        start = torus_rotation(seed_z, theta)
        start = start + spread * (rng.normal(size=p.n) + 1j * rng.normal(size=p.n))
        pts.append(project_to_fiber(p, start, target, variant))
    return np.array(pts), target


def random_seed_point(n: int, rng: np.random.Generator, variant: str = AFFINE) -> np.ndarray:
    while True:
        z = rng.uniform(0.5, 1.5, n) * np.exp(1j * rng.uniform(-np.pi, np.pi, n))
        if variant != PROPER or abs(1 + np.prod(z)) > 0.2:
            return z


def rotation_field(z, j: int) -> np.ndarray:
    """Real components of X_j = 2i(conj(z_j) d/d conj(z_j) - z_j d/dz_j)."""
    z = np.asarray(z, complex)
    v = np.zeros(z.shape, complex)
    v[..., j] = -2j * z[..., j]
    return to_real(v)


def hamiltonian_check(p: TorusInvariantPotential, j: int, z, h_fd: float = 1e-6) -> float:
    """max |iota(X_j) omega - d(phi_j |z_j|^2)| over the 2n real components."""
    z = np.asarray(z, complex)
    w = kahler_form(p, z, check=False)
    lhs = rotation_field(z, j) @ w
    x = to_real(z)
    dim = len(x)

    def ham(xr):
        zc = to_complex(xr)
        a = _abs2(zc)
        return p.grad(a)[..., j] * a[..., j]

    steps = h_fd * np.maximum(1.0, np.abs(x))
    shifts = np.eye(dim) * steps[:, None]
    rhs = (ham(x + shifts) - ham(x - shifts)) / (2 * steps)
    return float(np.abs(lhs - rhs).max())


@dataclass
class SlagReport:
    potential: str
    n: int
    variant: str
    fibers: int
    points: int
    max_omega: float
    max_im_omega: float
    critical: int
    tol: float
    corrupted: bool = False

    @property
    def passed(self) -> bool:
        return self.critical == 0 and self.max_omega < self.tol and self.max_im_omega < self.tol


def certify(p: TorusInvariantPotential, variant: str = AFFINE, fibers: int = 10, points: int = 100,
            seed: int = 0, tol: float = 1e-6, h_fd: float = 1e-5, corrupted: bool = False) -> SlagReport:
    """Sample fibers and report the worst SLag residuals over all sampled points."""
    rng = np.random.default_rng(seed)
    max_om = max_im = 0.0
    crit = 0
    for _ in range(fibers):
        z0 = random_seed_point(p.n, rng, variant)
        pts, _ = sample_fiber(p, z0, points, rng, variant)
        for z in pts:
            r = verify_slag(p, z, variant, tol, h_fd, corrupted)
            if r.critical:
                crit += 1
                continue
            max_om = max(max_om, r.omega)
            max_im = max(max_im, r.im_omega)
    return SlagReport(p.name, p.n, variant, fibers, points, max_om, max_im, crit, tol, corrupted)
