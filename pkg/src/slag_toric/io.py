"""JSON documents: fans, polygons, curves and reports.

Exact quantities are written as "p/q" strings; parse(emit(report)) == report.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .cones import Cone, Fan, GorensteinData, Triangulation, fan_from_triangulation, \
    gorenstein_degree, star_subdivision
from .deformations import LatticePolygon
from .errors import DocumentError
from .lattice import LatticeSpec, frac, transpose, vec
from .moment import DivisorClass

SCHEMA_VERSION = 1


def q(x) -> str:
    return str(Fraction(x))


def to_json(obj: Any) -> Any:
    """Convert Fractions to strings and tuples/arrays to lists, recursively."""
    if isinstance(obj, Fraction):
        return q(obj)
    if isinstance(obj, bool) or obj is None or isinstance(obj, (str, int)):
        return obj
    if isinstance(obj, float):
        return obj
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return to_json(obj.tolist())
    if isinstance(obj, dict):
        return {str(k): to_json(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_json(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def emit(doc: dict) -> str:
    return json.dumps(to_json(doc), indent=2, sort_keys=True) + "\n"


def parse(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise DocumentError("document must be a JSON object")
    return doc


def load(path: str | Path) -> dict:
    """Read a document; a bare name that is not a file falls back to the bundled data."""
    if not Path(path).exists() and Path(path).name == str(path) and data_path(str(path)).exists():
        path = data_path(str(path))
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DocumentError(str(exc)) from exc
    doc = parse(text)
    doc.setdefault("_path", str(path))
    return doc


def report(command: str, inputs: dict, outputs: dict, timing: dict | None = None) -> dict:
    doc = {"schema_version": SCHEMA_VERSION, "command": command, "tool_version": __version__,
           "inputs": inputs, "outputs": outputs}
    if timing is not None:
        doc["timing"] = timing
    return to_json(doc)


def _rational_vector(v, what: str):
    try:
        return vec(str(x) if isinstance(x, (int, str)) else _no_float(x) for x in v)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise DocumentError(f"bad rational entry in {what}: {exc}") from exc


def _no_float(x):
    raise TypeError(f"{x!r} is not an exact rational (use a 'p/q' string)")


def _expect(doc: dict, key: str, kind: str):
    if key not in doc:
        raise DocumentError(f"{kind} document is missing {key!r}")
    return doc[key]


@dataclass(frozen=True)
class FanDocument:
    """A cone sigma (by its rays), a fan refining it, and optional class/basis data."""

    lattice: LatticeSpec
    rays: tuple
    cones: tuple
    triangulations: tuple
    divisor_class: DivisorClass | None
    basis: tuple | None
    display_frame: tuple | None
    name: str
    raw: dict

    def cone(self) -> Cone:
        return Cone.generated_by(self.lattice, self.rays)

    def gorenstein(self) -> GorensteinData:
        return gorenstein_degree(self.cone())

    def fans(self, g: GorensteinData | None = None) -> list[Fan]:
        """Fans of the listed triangulations, or the fan given by rays and cones."""
        g = g or self.gorenstein()
        if not self.triangulations:
            return [Fan.from_cones(self.lattice, self.rays, self.cones)]
        out = []
        for t in self.triangulations:
            if isinstance(t, tuple) and t and t[0] == "star":
                t = star_subdivision(g, t[1])
            out.append(fan_from_triangulation(g, t))
        return out


def parse_fan(doc: dict) -> FanDocument:
    if doc.get("kind", "fan") != "fan":
        raise DocumentError(f"expected a fan document, got kind {doc.get('kind')!r}")
    lat = _expect(doc, "lattice", "fan")
    try:
        rows = [_rational_vector(r, "lattice basis") for r in _expect(lat, "basis", "lattice")]
        if "rank" in lat and int(lat["rank"]) != len(rows):
            raise DocumentError("lattice rank does not match the basis")
        lattice = LatticeSpec(transpose(rows))
    except (ValueError, TypeError) as exc:
        raise DocumentError(f"bad lattice: {exc}") from exc
    except DocumentError:
        raise
    except Exception as exc:  # DimensionMismatch and friends
        raise DocumentError(f"bad lattice: {exc}") from exc
    rays = tuple(_rational_vector(r, "rays") for r in _expect(doc, "rays", "fan"))
    if any(len(r) != lattice.rank for r in rays):
        raise DocumentError("ray length differs from the lattice rank")
    cones = doc.get("cones", [list(range(len(rays)))])
    try:
        cones = tuple(tuple(int(i) for i in c) for c in cones)
    except (TypeError, ValueError) as exc:
        raise DocumentError(f"bad cone index list: {exc}") from exc
    if any(i < 0 or i >= len(rays) for c in cones for i in c):
        raise DocumentError("cone index out of range")
    tris = doc.get("triangulations")
    if tris is None:
        tris = [doc["triangulation"]] if "triangulation" in doc else []
    parsed = []
    for t in tris:
        if "star" in t:
            parsed.append(("star", _rational_vector(t["star"], "star point")))
        else:
            pts = [_rational_vector(p, "triangulation points") for p in _expect(t, "points", "triangulation")]
            parsed.append(Triangulation.of(pts, _expect(t, "simplices", "triangulation")))
    dc = None
    if "divisor_class" in doc:
        d = doc["divisor_class"]
        try:
            dc = DivisorClass(alpha=_rational_vector(d["alpha"], "alpha") if "alpha" in d else None,
                              x0=_rational_vector(d["x0"], "x0") if "x0" in d else None)
        except ValueError as exc:
            raise DocumentError(str(exc)) from exc
    basis = tuple(_rational_vector(e, "basis") for e in doc["basis"]) if "basis" in doc else None
    frame = (tuple(_rational_vector(e, "display_frame") for e in doc["display_frame"])
             if "display_frame" in doc else None)
    return FanDocument(lattice, rays, cones, tuple(parsed), dc, basis, frame,
                       str(doc.get("name", "")), doc)


@dataclass(frozen=True)
class PolygonDocument:
    polygon: LatticePolygon
    x: tuple | None
    n: int
    name: str


def parse_complex_list(items) -> tuple:
    out = []
    for it in items:
        if isinstance(it, (list, tuple)) and len(it) == 2:
            out.append((frac(str(it[0])), frac(str(it[1]))))
        else:
            out.append((frac(str(it)), Fraction(0)))
    return tuple(out)


def parse_polygon(doc: dict) -> PolygonDocument:
    if doc.get("kind") != "polygon":
        raise DocumentError(f"expected a polygon document, got kind {doc.get('kind')!r}")
    try:
        verts = [(int(v[0]), int(v[1])) for v in _expect(doc, "vertices", "polygon")]
        poly = LatticePolygon(tuple(verts))
    except (TypeError, ValueError, IndexError) as exc:
        raise DocumentError(f"bad polygon: {exc}") from exc
    try:
        x = parse_complex_list(doc["x"]) if "x" in doc else None
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise DocumentError(f"bad deformation parameters: {exc}") from exc
    return PolygonDocument(poly, x, int(doc.get("n", 3)), str(doc.get("name", "")))


@dataclass(frozen=True)
class CurveDocument:
    support: tuple
    phi: tuple
    coefficients: tuple
    t: float
    window_factor: float
    grid: int
    angles: int
    eps: float
    basis_change: tuple | None
    compare: dict | None
    name: str


def parse_curve(doc: dict) -> CurveDocument:
    if doc.get("kind") != "curve":
        raise DocumentError(f"expected a curve document, got kind {doc.get('kind')!r}")
    try:
        support = tuple((int(a), int(b)) for a, b in _expect(doc, "support", "curve"))
        phi = tuple(frac(str(p)) for p in _expect(doc, "phi", "curve"))
        coeffs = tuple(complex(float(Fraction(str(c[0]))), float(Fraction(str(c[1]))))
                       if isinstance(c, (list, tuple)) else complex(float(Fraction(str(c))))
                       for c in doc.get("coefficients", [1] * len(support)))
        if not (len(support) == len(phi) == len(coeffs)):
            raise DocumentError("support, phi and coefficients differ in length")
        bc = doc.get("basis_change")
        bc = tuple(tuple(int(x) for x in row) for row in bc) if bc is not None else None
        return CurveDocument(support, phi, coeffs, float(doc.get("t", 0.01)),
                             float(doc.get("window_factor", 3.0)), int(doc.get("grid", 200)),
                             int(doc.get("angles", 64)), float(doc.get("eps", 1.0)), bc,
                             doc.get("compare"), str(doc.get("name", "")))
    except DocumentError:
        raise
    except (TypeError, ValueError, ZeroDivisionError, KeyError) as exc:
        raise DocumentError(f"bad curve document: {exc}") from exc


def data_path(name: str) -> Path:
    return Path(__file__).parent / "data" / name
