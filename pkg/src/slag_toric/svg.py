"""Minimal SVG rendering for planar graphs, spines and amoeba clouds.

The y-axis is flipped for screen coordinates; rays are drawn to the edge of
the viewport with an arrowhead. The first line is a version comment, the only
part of the output that depends on the tool version.
"""

from __future__ import annotations

from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

from . import __version__

SIZE = 480
MARGIN = 24


class _Canvas:
    def __init__(self, box: tuple[float, float, float, float]):
        x0, x1, y0, y1 = box
        self.box = box
        span = max(x1 - x0, y1 - y0, 1e-9)
        self.s = (SIZE - 2 * MARGIN) / span
        self.items: list[str] = []

    def xy(self, p) -> tuple[str, str]:
        x0, _, _, y1 = self.box
        return f"{MARGIN + (float(p[0]) - x0) * self.s:.3f}", f"{MARGIN + (y1 - float(p[1])) * self.s:.3f}"

    def line(self, a, b, cls: str, arrow: bool = False):
        (ax, ay), (bx, by) = self.xy(a), self.xy(b)
        marker = ' marker-end="url(#arrow)"' if arrow else ""
        self.items.append(f'<line class="{cls}" x1="{ax}" y1="{ay}" x2="{bx}" y2="{by}"{marker}/>')

    def dot(self, p, cls: str, r: float = 3.0):
        x, y = self.xy(p)
        self.items.append(f'<circle class="{cls}" cx="{x}" cy="{y}" r="{r}"/>')

    def text(self, p, s: str):
        x, y = self.xy(p)
        self.items.append(f'<text x="{x}" y="{y}">{escape(s)}</text>')

    def render(self, title: str) -> str:
        head = [
            f"<!-- slag-toric {__version__} -->",
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
            f'viewBox="0 0 {SIZE} {SIZE}">',
            f"<title>{escape(title)}</title>",
            '<defs><marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="6" '
            'markerHeight="6" orient="auto"><path d="M0,0 L10,5 L0,10 z"/></marker></defs>',
            "<style>line{stroke:#222;stroke-width:1.5}.ray{stroke:#555}.spine{stroke:#c22}"
            ".cloud{fill:#36c;fill-opacity:0.25}.vertex{fill:#222}text{font:9px sans-serif}</style>",
        ]
        return "\n".join(head + self.items + ["</svg>"]) + "\n"


def _clip_ray(start: np.ndarray, d: np.ndarray, box) -> np.ndarray:
    x0, x1, y0, y1 = box
    ts = []
    for k, (lo, hi) in enumerate(((x0, x1), (y0, y1))):
        if d[k] > 0:
            ts.append((hi - start[k]) / d[k])
        elif d[k] < 0:
            ts.append((lo - start[k]) / d[k])
    t = max(0.0, min(ts)) if ts else 0.0
    return start + t * d


def _box_around(points: np.ndarray, pad: float) -> tuple[float, float, float, float]:
    if len(points) == 0:
        return (-1.0, 1.0, -1.0, 1.0)
    lo, hi = points.min(axis=0), points.max(axis=0)
    c = (lo + hi) / 2
    half = max(float((hi - lo).max()) / 2 + pad, 1.0)
    return (c[0] - half, c[0] + half, c[1] - half, c[1] + half)


def graph_svg(positions: np.ndarray, bounded: Sequence[tuple[int, int]],
              rays: Sequence[tuple[int, Sequence[int]]], labels: Sequence[str] = (),
              title: str = "discriminant graph") -> str:
    """Vertices, bounded edges and rays; ``labels`` (one per edge, bounded first) are
    written at edge midpoints or near ray starts."""
    positions = np.asarray(positions, float).reshape(-1, 2)
    box = _box_around(positions, pad=max(1.0, 0.5 * float(np.ptp(positions)) if len(positions) else 1.0))
    cv = _Canvas(box)
    labels = list(labels)
    k = 0
    for i, j in bounded:
        cv.line(positions[i], positions[j], "edge")
        if k < len(labels):
            cv.text((positions[i] + positions[j]) / 2, labels[k])
        k += 1
    for i, d in rays:
        d = np.asarray(d, float)
        end = _clip_ray(positions[i], d / np.linalg.norm(d), box)
        cv.line(positions[i], end, "ray", arrow=True)
        if k < len(labels):
            cv.text(positions[i] + 0.3 * (end - positions[i]), labels[k])
        k += 1
    for p in positions:
        cv.dot(p, "vertex")
    return cv.render(title)


def overlay_svg(cloud: np.ndarray, segments, window: float, title: str = "amoeba and spine",
                max_points: int = 4000) -> str:
    box = (-window, window, -window, window)
    cv = _Canvas(box)
    pts = np.asarray(cloud, float).reshape(-1, 2)
    inside = pts[(np.abs(pts) <= window).all(axis=1)]
    step = max(1, len(inside) // max_points)
    for p in inside[::step]:
        cv.dot(p, "cloud", r=1.0)
    for a, b in segments:
        a, b = np.asarray(a, float), np.asarray(b, float)
        d = b - a
        if np.linalg.norm(d) == 0:
            continue
        cv.line(a, _clip_ray(a, d / np.linalg.norm(d), box) if np.abs(b).max() > window else b, "spine")
    return cv.render(title)
