"""Legendre duality and real Monge-Ampere residuals for potentials sampled on grids."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import CloughTocher2DInterpolator

from .errors import NotConvex


@dataclass(frozen=True)
class HessianPotentialGrid:
    """Values K(y) on the tensor grid spanned by ``axes`` (possibly non-uniform)."""

    axes: tuple[np.ndarray, ...]
    values: np.ndarray

    def __post_init__(self):
        axes = tuple(np.asarray(a, float) for a in self.axes)
        vals = np.asarray(self.values, float)
        if vals.shape != tuple(len(a) for a in axes):
            raise ValueError("values do not match the grid shape")
        if any(len(a) < 3 or np.any(np.diff(a) <= 0) for a in axes):
            raise ValueError("each axis needs at least 3 strictly increasing nodes")
        if not np.all(np.isfinite(vals)):
            raise ValueError("potential values must be finite")
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "values", vals)

    @property
    def d(self) -> int:
        return len(self.axes)

    @property
    def spacing(self) -> float:
        return float(max(np.max(np.diff(a)) for a in self.axes))

    def mesh(self) -> list[np.ndarray]:
        return np.meshgrid(*self.axes, indexing="ij")

    @classmethod
    def sample(cls, f: Callable[..., np.ndarray], lo: Sequence[float], hi: Sequence[float],
               n: int | Sequence[int]) -> "HessianPotentialGrid":
        counts = [n] * len(lo) if isinstance(n, int) else list(n)
        axes = tuple(np.linspace(a, b, k) for a, b, k in zip(lo, hi, counts))
        return cls(axes, f(*np.meshgrid(*axes, indexing="ij")))


def gradient(k: HessianPotentialGrid) -> list[np.ndarray]:
    g = np.gradient(k.values, *k.axes, edge_order=2)
    return [g] if k.d == 1 else list(g)


def hessian(k: HessianPotentialGrid) -> np.ndarray:
    """Array of shape grid + (d, d) from repeated second-order differences."""
    grads = gradient(k)
    rows = []
    for gi in grads:
        gg = np.gradient(gi, *k.axes, edge_order=2)
        rows.append([gg] if k.d == 1 else list(gg))
    h = np.array(rows)
    return np.moveaxis(h, (0, 1), (-2, -1))


def _interior(a: np.ndarray, d: int) -> np.ndarray:
    return a[(slice(1, -1),) * d]


def legendre_dual(k: HessianPotentialGrid, check_convex: bool = True
                  ) -> tuple[list[np.ndarray], np.ndarray]:
    """Dual coordinates y^_i = dK/dy_i and K^ = sum y_i y^_i - K at the same nodes."""
    if check_convex:
        h = _interior(hessian(k), k.d)
        ev = np.linalg.eigvalsh(h.reshape(-1, k.d, k.d))
        if ev.size and ev.min() <= 0:
            raise NotConvex(f"Hessian has eigenvalue {ev.min():.3g} at an interior node")
    dual = gradient(k)
    ys = k.mesh()
    kd = sum(y * yd for y, yd in zip(ys, dual)) - k.values
    return dual, kd


def dual_grid(k: HessianPotentialGrid, resample: int | None = None) -> HessianPotentialGrid:
    """The dual potential as a grid over the dual coordinates.

    When the dual coordinates form a tensor grid (always for d = 1, and for
    separable potentials) the nodes are used directly; otherwise, in d = 2,
    K^ is interpolated (piecewise cubic) onto a regular grid with ``resample``
    nodes per axis over the interior of the dual domain.
    """
    dual, kd = legendre_dual(k)
    axes = []
    tensor = True
    for i, di in enumerate(dual):
        ax = np.moveaxis(di, i, 0).reshape(di.shape[i], -1)
        if not np.allclose(ax, ax[:, :1], rtol=0, atol=1e-12 * max(1.0, np.abs(ax).max())):
            tensor = False
            break
        axes.append(ax[:, 0])
    if tensor and resample is None:
        return HessianPotentialGrid(tuple(axes), kd)
    if k.d != 2:
        raise ValueError("resampling of non-tensor dual grids is only available for d = 2")
    pts = np.column_stack([di.ravel() for di in dual])
    interp = CloughTocher2DInterpolator(pts, kd.ravel())
    count = resample or max(len(a) for a in k.axes)
    lo = [float(np.max(np.min(di, axis=i))) for i, di in enumerate(dual)]
    hi = [float(np.min(np.max(di, axis=i))) for i, di in enumerate(dual)]
    new_axes = tuple(np.linspace(a, b, count) for a, b in zip(lo, hi))
    vals = interp(*np.meshgrid(*new_axes, indexing="ij"))
    return HessianPotentialGrid(new_axes, vals)


def monge_ampere_residual(k: HessianPotentialGrid) -> tuple[np.ndarray, float]:
    """det(Hess K) at interior nodes and max |det - mean| / |mean|."""
    dets = np.linalg.det(_interior(hessian(k), k.d))
    mean = float(np.mean(dets))
    if mean == 0:
        return dets, float("inf")
    return dets, float(np.max(np.abs(dets - mean)) / abs(mean))
