"""Laurent polynomials in two variables, their amoebas, and fattening checks against spines."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from .errors import DegenerateSpecialization
from .tropical import TropicalCurve


@dataclass(frozen=True)
class LaurentPolynomial2:
    terms: tuple[tuple[tuple[int, int], complex], ...]

    def __post_init__(self):
        exps = [e for e, _ in self.terms]
        if len(set(exps)) != len(exps):
            raise ValueError("exponents must be distinct")

    @property
    def degenerate(self) -> bool:
        """Fewer than two nonzero terms: a monomial has an empty zero set on the torus."""
        return sum(1 for _, c in self.terms if c != 0) < 2

    def __call__(self, z1, z2):
        return sum(c * z1 ** a * z2 ** b for (a, b), c in self.terms)

    def term_magnitude(self, z1, z2):
        return sum(abs(c) * abs(z1) ** a * abs(z2) ** b for (a, b), c in self.terms)

    def swapped(self) -> "LaurentPolynomial2":
        return LaurentPolynomial2(tuple(((b, a), c) for (a, b), c in self.terms))


def curve_family(support: Sequence[Sequence[int]], phi: Sequence[float],
                 coefficients: Sequence[complex], t: float) -> LaurentPolynomial2:
    """h_t = sum t^phi(a,b) m_(a,b) z1^a z2^b."""
    if not 0 < t <= 1:
        raise ValueError("t must lie in (0, 1]")
    terms = tuple(((int(a), int(b)), complex(t ** float(p) * complex(m)))
                  for (a, b), p, m in zip(support, phi, coefficients))
    return LaurentPolynomial2(terms)


def _thread_count() -> int:
    env = os.environ.get("SLAG_TORIC_THREADS")
    if env:
        return max(1, int(env))
    return min(8, os.cpu_count() or 1)


def specialize(h: LaurentPolynomial2, z1: complex) -> np.ndarray:
    """Coefficients (highest degree first) of z2^(-bmin) * h(z1, z2) as a polynomial in z2."""
    bs = [b for (_, b), _ in h.terms]
    lo, hi = min(bs), max(bs)
    coeffs = np.zeros(hi - lo + 1, complex)
    for (a, b), c in h.terms:
        coeffs[hi - b] += c * z1 ** a
    return coeffs


def _polish(coeffs: np.ndarray, roots: np.ndarray, steps: int = 2) -> np.ndarray:
    d = np.polyder(coeffs)
    for _ in range(steps):
        val, der = np.polyval(coeffs, roots), np.polyval(d, roots)
        ok = der != 0
        roots = np.where(ok, roots - np.where(ok, val, 0) / np.where(ok, der, 1), roots)
    return roots


@dataclass
class AmoebaCloud:
    points: np.ndarray
    t: float | None = None
    resolution: tuple[int, int] = (0, 0)
    discarded: int = 0
    degenerate: int = 0
    roots: list = field(default_factory=list, repr=False)


def _slice(h: LaurentPolynomial2, x: float, thetas: np.ndarray, tol: float, swap: bool):
    pts, kept, dropped, degen = [], [], 0, 0
    for th in thetas:
        z1 = np.exp(x + 1j * th)
        coeffs = specialize(h, z1)
        nz = np.flatnonzero(np.abs(coeffs) > 0)
        if len(nz) == 0 or len(coeffs) - nz[0] <= 1:
            degen += 1
            continue
        coeffs = coeffs[nz[0]:]
        roots = _polish(coeffs, np.roots(coeffs))
        for z2 in roots:
            if not np.isfinite(z2) or z2 == 0:
                dropped += 1
                continue
            if abs(h(z1, z2)) > tol * h.term_magnitude(z1, z2):
                dropped += 1
                continue
            pair = (z2, z1) if swap else (z1, z2)
            kept.append(pair)
            pts.append((np.log(abs(pair[0])), np.log(abs(pair[1]))))
    return pts, kept, dropped, degen


def amoeba_sample(h: LaurentPolynomial2, x1_grid: Sequence[float], angle_samples: int | Sequence[float],
                  x2_grid: Sequence[float] | None = None, tol: float = 1e-9,
                  t: float | None = None, strict: bool = False) -> AmoebaCloud:
    """Sample nu(z) = (log|z1|, log|z2|) over the zero set of h.

    For each x1 in the grid and each angle, z1 = exp(x1 + i theta) is fixed and
    the resulting polynomial in z2 is solved through companion-matrix
    eigenvalues plus Newton polishing. With ``x2_grid`` the roles of z1 and z2
    are also swapped, which resolves edges of the amoeba parallel to the x2-axis.
    Roots failing |h| <= tol * (sum of term magnitudes) are discarded and counted.
    Slices whose z2-polynomial vanishes identically are skipped and counted,
    or raise DegenerateSpecialization when ``strict``.
    """
    if isinstance(angle_samples, int):
        thetas = np.linspace(0.0, 2 * np.pi, angle_samples, endpoint=False)
    else:
        thetas = np.asarray(angle_samples, float)
    jobs = [(h, float(x), False) for x in x1_grid]
    if x2_grid is not None:
        hs = h.swapped()
        jobs += [(hs, float(x), True) for x in x2_grid]
    with ThreadPoolExecutor(max_workers=_thread_count()) as pool:
        results = list(pool.map(lambda job: _slice(job[0], job[1], thetas, tol, job[2]), jobs))
    pts, roots, dropped, degen = [], [], 0, 0
    for p, r, d, g in results:
        pts.extend(p)
        roots.extend(r)
        dropped += d
        degen += g
    if strict and degen:
        raise DegenerateSpecialization(f"{degen} slices specialize to the zero polynomial")
    arr = np.array(pts, float).reshape(-1, 2)
    return AmoebaCloud(arr, t, (len(jobs), len(thetas)), dropped, degen, roots)


def _segment_distances(points: np.ndarray, segments) -> np.ndarray:
    best = np.full(len(points), np.inf)
    for a, b in segments:
        ab = b - a
        denom = float(ab @ ab)
        if denom == 0:
            d = np.linalg.norm(points - a, axis=1)
        else:
            s = np.clip(((points - a) @ ab) / denom, 0.0, 1.0)
            d = np.linalg.norm(points - (a + s[:, None] * ab), axis=1)
        best = np.minimum(best, d)
    return best


def _window_box(window) -> tuple[float, float, float, float]:
    if np.isscalar(window):
        w = float(window)
        return (-w, w, -w, w)
    return tuple(float(v) for v in window)


def _inside(points: np.ndarray, box) -> np.ndarray:
    x0, x1, y0, y1 = box
    return (points[:, 0] >= x0) & (points[:, 0] <= x1) & (points[:, 1] >= y0) & (points[:, 1] <= y1)


def spine_samples(tc: TropicalCurve, window, spacing: float) -> np.ndarray:
    box = _window_box(window)
    size = max(abs(v) for v in box)
    out = []
    for a, b in tc.segments(size):
        n = max(2, int(np.ceil(np.linalg.norm(b - a) / spacing)) + 1)
        s = np.linspace(0.0, 1.0, n)
        out.append(a + s[:, None] * (b - a))
    pts = np.vstack(out) if out else np.zeros((0, 2))
    return pts[_inside(pts, box)]


def fattening_distances(cloud: AmoebaCloud, tc: TropicalCurve, window,
                        spacing: float = 0.05) -> tuple[np.ndarray, np.ndarray]:
    """Cloud-to-spine and spine-to-cloud distances inside the window."""
    box = _window_box(window)
    size = max(abs(v) for v in box)
    pts = cloud.points[_inside(cloud.points, box)]
    to_spine = _segment_distances(pts, tc.segments(size))
    samples = spine_samples(tc, box, spacing)
    if len(cloud.points) == 0:
        return to_spine, np.full(len(samples), np.inf)
    to_cloud, _ = cKDTree(cloud.points).query(samples)
    return to_spine, np.asarray(to_cloud)


def fattening_check(cloud: AmoebaCloud, tc: TropicalCurve, eps: float, window=None,
                    spacing: float | None = None, resolution: float = 0.0) -> tuple[float, float]:
    """(fraction of cloud points within eps of the spine,
    fraction of spine samples within eps + resolution of the cloud), on the window.

    ``resolution`` allows for the gap between neighbouring cloud samples, so that
    an exact curve sampled on a grid can cover its spine at tiny eps.
    """
    if window is None:
        window = float(np.abs(cloud.points).max()) if len(cloud.points) else 1.0
    if spacing is None:
        spacing = max(min(0.05, eps / 4), 1e-3)
    to_spine, to_cloud = fattening_distances(cloud, tc, window, spacing)
    contained = float(np.mean(to_spine <= eps)) if len(to_spine) else 0.0
    covers = float(np.mean(to_cloud <= eps + resolution)) if len(to_cloud) else 0.0
    return contained, covers


def required_eps(cloud: AmoebaCloud, tc: TropicalCurve, window, fraction: float = 0.99,
                 spacing: float = 0.05) -> float:
    """Smallest eps at which both fattening fractions reach ``fraction``."""
    to_spine, to_cloud = fattening_distances(cloud, tc, window, spacing)
    if not len(to_spine) or not len(to_cloud):
        return float("inf")
    return float(max(np.quantile(to_spine, fraction, method="higher"),
                     np.quantile(to_cloud, fraction, method="higher")))
