"""Command-line entry point: ``slag-toric <command> [options]``.

Exit codes: 0 success, 1 bad input, 2 not Gorenstein, 3 not ample,
4 decomposition search too large, 5 degenerate heights, 6 verification failed.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import io
from .amoeba import amoeba_sample, curve_family, fattening_check, required_eps
from .cones import crepancy_check, is_smooth
from .deformations import (altmann_cone, minkowski_decompositions, polygon_chart,
                           smoothing_discriminant, verify_embedding)
from .errors import (DegenerateHeights, DocumentError, InvalidTriangulation, NotAmple, NotGorenstein,
                     SlagToricError, TooLarge)
from .fibration import AdaptedBasis, adapted_basis, discriminant_graph, vertex_consistency
from .moment import DivisorClass, find_ample_class, moment_polytope
from .slag import TorusInvariantPotential, certify, hamiltonian_check, random_seed_point
from .svg import graph_svg, overlay_svg
from .tropical import TropicalPolynomial, compare_spine_to_discriminant, tropical_curve

EXIT_OK, EXIT_PARSE, EXIT_GORENSTEIN, EXIT_AMPLE, EXIT_TOO_LARGE, EXIT_HEIGHTS, EXIT_VERIFY = range(7)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise DocumentError(message)


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k in sorted(obj):
            yield from _flatten(obj[k], f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}[{i}]")
    else:
        yield prefix, obj


def render(doc: dict, fmt: str) -> str:
    if fmt == "json":
        return io.emit(doc)
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["key", "value"])
    for k, v in _flatten(doc):
        w.writerow([k, "" if v is None else v])
    return buf.getvalue()


def _finish(args, command: str, inputs: dict, outputs: dict, t0: float) -> dict:
    timing = {"seconds": round(time.perf_counter() - t0, 3)} if args.timing else None
    doc = io.report(command, inputs, outputs, timing)
    text = render(doc, args.format)
    if args.out:
        _write(Path(args.out) / f"{command}.{args.format}", text)
    sys.stdout.write(text)
    return doc


def _load_fan(path: str) -> io.FanDocument:
    return io.parse_fan(io.load(path))


# gorenstein

def cmd_gorenstein(args) -> int:
    t0 = time.perf_counter()
    fd = _load_fan(args.fan)
    g = fd.gorenstein()
    fans = []
    for f in fd.fans(g):
        smooth, bad = is_smooth(f)
        fans.append({"rays": f.rays, "cones": f.max_cones, "smooth": smooth, "singular_cones": bad,
                     "crepant": crepancy_check(g, f)})
    outputs = {
        "m0": g.m0,
        "rays": g.cone.rays,
        "cross_section": {"vertices": g.cross_section.vertices,
                          "lattice_points": g.cross_section.lattice_points(),
                          "normalized_volume": g.cross_section.normalized_volume()},
        "fans": fans,
        "smooth": all(f["smooth"] for f in fans) if fans else None,
        "crepant": all(f["crepant"] for f in fans) if fans else None,
    }
    _finish(args, "gorenstein", {"fan": fd.name or args.fan}, outputs, t0)
    return EXIT_OK


# discriminant

def _divisor_class(fd: io.FanDocument, given: str | None) -> DivisorClass | None:
    if given is not None:
        try:
            return DivisorClass(alpha=tuple(Fraction(s) for s in given.split(",")))
        except (ValueError, ZeroDivisionError) as exc:
            raise DocumentError(f"bad --class value {given!r}") from exc
    return fd.divisor_class


def graph_payload(gr) -> dict:
    edges = []
    for e in gr.edges:
        edges.append({"start": e.start, "end": e.end, "direction": e.direction, "pair": e.pair,
                      "delta": e.delta, "monodromy": e.monodromy, "fiber_type": e.fiber_type})
    return {"vertices": gr.vertices, "vertex_types": gr.vertex_types, "vertex_rays": gr.vertex_rays,
            "edges": edges, "counts": [len(gr.vertices), len(gr.bounded_edges), len(gr.rays)],
            "generic_fiber": gr.generic_fiber, "basis": gr.basis.e, "warnings": list(gr.warnings)}


def build_graphs(fd: io.FanDocument, cls: DivisorClass | None = None):
    """Discriminant graphs, one per fan of the document, with their moment polytopes."""
    g = fd.gorenstein()
    b = AdaptedBasis(fd.lattice, g.m0, fd.basis) if fd.basis else adapted_basis(fd.lattice, g.m0)
    out = []
    for f in fd.fans(g):
        d = cls if cls is not None else find_ample_class(f)
        p = moment_polytope(f, d)
        out.append((f, p, discriminant_graph(p, b, fd.display_frame)))
    return g, out


def _mono_label(m) -> str:
    col = [str(row[-1]) for row in m[:-1]] if m is not None else []
    return "T: +(" + ",".join(col) + ")" if col else ""


def cmd_discriminant(args) -> int:
    t0 = time.perf_counter()
    fd = _load_fan(args.fan)
    g, results = build_graphs(fd, _divisor_class(fd, args.class_))
    graphs = []
    for k, (f, p, gr) in enumerate(results):
        ok, bad = vertex_consistency(gr)
        payload = graph_payload(gr)
        payload.update(x0=p.x0, polytope={"vertices": p.vertices, "rays": p.rays,
                                          "h_rep": p.h_rep},
                       consistent=ok, inconsistent_vertices=bad)
        graphs.append(payload)
        if args.svg:
            path = Path(args.svg)
            if len(results) > 1:
                path = path.with_name(f"{path.stem}_{k}{path.suffix or '.svg'}")
            bounded = [e for e in gr.edges if e.bounded]
            rays = [e for e in gr.edges if not e.bounded]
            labels = [_mono_label(e.monodromy) for e in bounded + rays]
            _write(path, graph_svg(np.array([[float(c) for c in v] for v in gr.vertices]),
                                   [(e.start, e.end) for e in bounded],
                                   [(e.start, e.direction) for e in rays], labels,
                                   title=fd.name or "discriminant graph"))
    _finish(args, "discriminant", {"fan": fd.name or args.fan, "class": args.class_},
            {"m0": g.m0, "graphs": graphs}, t0)
    return EXIT_OK


# smooth

def _polygon_input(path: str):
    doc = io.load(path)
    if doc.get("kind") == "polygon":
        pd = io.parse_polygon(doc)
        return pd.polygon, pd.x, pd.n, pd.name, None
    fd = io.parse_fan(doc)
    g = fd.gorenstein()
    poly, chart = polygon_chart(g)
    x = io.parse_complex_list(doc["x"]) if "x" in doc else None
    return poly, x, int(doc.get("n", 3)), fd.name, (g, chart)


def default_parameters(k: int) -> tuple:
    """x_j = j + j*i, generic for every n."""
    return tuple((Fraction(j), Fraction(j)) for j in range(k))


def cmd_smooth(args) -> int:
    t0 = time.perf_counter()
    poly, x, n, name, gor = _polygon_input(args.polygon)
    if args.x:
        try:
            x = io.parse_complex_list(io.parse(args.x if args.x.lstrip().startswith("{")
                                               else '{"x": ' + args.x + "}")["x"])
        except (ValueError, ZeroDivisionError) as exc:
            raise DocumentError(f"bad --x value: {exc}") from exc
    decs = minkowski_decompositions(poly, maximal_only=not args.all)
    items = []
    for d in decs:
        xs = x if x is not None and len(x) == d.p + 1 else default_parameters(d.p + 1)
        sd = smoothing_discriminant(d, xs, n)
        entry = {
            "summands": [s.vertices for s in d.summands],
            "x": xs,
            "components": [{"summand": c.k, "plane": c.plane_value, "direction": c.direction,
                            "edge": c.edge} for c in sd.components],
            "component_count": len(sd.components),
            "plane_values": sd.plane_values,
            "distinct_planes": sd.distinct_planes,
            "generic": sd.generic,
        }
        if gor is not None:
            a = altmann_cone(poly, d, gor[1])
            entry["altmann"] = {"rays": a.sigma_tilde.rays, "m0": a.m0_prime,
                                "embedding_ok": verify_embedding(gor[0], a, gor[1])}
        items.append(entry)
    _finish(args, "smooth", {"polygon": name or args.polygon, "n": n},
            {"polygon": poly.vertices, "decompositions": items, "count": len(items)}, t0)
    return EXIT_OK


# mirror

def spine_payload(tc) -> dict:
    return {
        "scale": tc.scale,
        "vertices": tc.vertices,
        "positions": [[float(x) * tc.scale, float(y) * tc.scale] for x, y in tc.vertices],
        "edges": [{"start": e.start, "end": e.end, "direction": e.direction,
                   "multiplicity": e.multiplicity, "dual": e.dual} for e in tc.edges],
        "lines": [{"point": ln.point, "direction": ln.direction, "multiplicity": ln.multiplicity}
                  for ln in tc.lines],
        "cells": tc.cells,
        "counts": [len(tc.vertices), len(tc.bounded_edges), len(tc.rays)],
        "balanced": tc.balanced(),
    }


def cloud_csv(points: np.ndarray) -> str:
    lines = ["x1,x2"] + [f"{a:.12e},{b:.12e}" for a, b in points]
    return "\n".join(lines) + "\n"


def _compare(cd: io.CurveDocument, doc_path: str, tc) -> dict | None:
    spec = cd.compare
    if not spec:
        return None
    fan_path = Path(doc_path).parent / spec["fan"]
    if not fan_path.exists():
        fan_path = io.data_path(spec["fan"])
    raw = io.load(fan_path)
    if "basis" in spec:
        raw = dict(raw, basis=spec["basis"])
    raw.pop("display_frame", None)
    fd = io.parse_fan(raw)
    _, results = build_graphs(fd, fd.divisor_class)
    rep = compare_spine_to_discriminant(tc, results[0][2], cd.basis_change)
    rep["fan"] = spec["fan"]
    return rep


def cmd_mirror(args) -> int:
    t0 = time.perf_counter()
    doc = io.load(args.curve)
    cd = io.parse_curve(doc)
    t = args.t if args.t is not None else cd.t
    if not 0 < t < 1:
        raise DocumentError("--t must lie in (0, 1)")
    big_l = -np.log(t)
    window = args.window if args.window is not None else cd.window_factor * big_l
    eps = args.eps if args.eps is not None else cd.eps
    grid = args.grid or cd.grid
    angles = args.angles or cd.angles
    tp = TropicalPolynomial.from_phi(cd.support, cd.phi)
    tc = tropical_curve(tp, scale=big_l)
    h = curve_family(cd.support, [float(p) for p in cd.phi], cd.coefficients, t)
    if h.degenerate:
        raise DegenerateHeights("the specialized curve has fewer than two terms")
    axis = np.linspace(-window, window, grid)
    cloud = amoeba_sample(h, axis, angles, x2_grid=axis, t=t)
    res = 2 * window / max(grid - 1, 1) * np.sqrt(2)
    contained, covers = fattening_check(cloud, tc, eps, window)
    req = required_eps(cloud, tc, window)
    spine = spine_payload(tc)
    outputs = {
        "spine": spine,
        "cloud": {"points": int(len(cloud.points)), "discarded": cloud.discarded,
                  "degenerate_slices": cloud.degenerate, "resolution": list(cloud.resolution),
                  "spacing": res},
        "fattening": {"eps": eps, "window": window, "contained": contained, "covers": covers,
                      "required_eps": req, "passed": contained >= 0.99 and covers >= 0.99},
        "comparison": _compare(cd, doc["_path"], tc),
    }
    if args.out:
        out = Path(args.out)
        _write(out / "spine.json", io.emit(io.to_json(spine)))
        _write(out / "cloud.csv", cloud_csv(cloud.points))
        _write(out / "overlay.svg", overlay_svg(cloud.points, tc.segments(window), window))
    if args.svg:
        _write(Path(args.svg), overlay_svg(cloud.points, tc.segments(window), window))
    _finish(args, "mirror", {"curve": cd.name or args.curve, "t": t, "grid": grid, "angles": angles},
            outputs, t0)
    return EXIT_OK


# verify

def cmd_verify(args) -> int:
    t0 = time.perf_counter()
    if args.n < 1:
        raise DocumentError("--n must be positive")
    p = TorusInvariantPotential.named(args.potential, args.n, args.lam)
    rep = certify(p, args.variant, fibers=args.fibers, points=args.samples, seed=args.seed,
                  tol=args.tol, corrupted=args.corrupt)
    rng = np.random.default_rng(args.seed)
    ham = max(hamiltonian_check(p, j, random_seed_point(args.n, rng)) for j in range(args.n)
              for _ in range(3))
    passed = rep.passed and ham < args.tol
    outputs = {"max_omega": rep.max_omega, "max_im_omega": rep.max_im_omega,
               "critical_points": rep.critical, "hamiltonian_residual": ham, "passed": passed}
    _finish(args, "verify", {"potential": args.potential, "n": args.n, "variant": args.variant,
                             "fibers": args.fibers, "samples": args.samples, "seed": args.seed,
                             "tol": args.tol, "lambda": args.lam, "corrupted": args.corrupt},
            outputs, t0)
    return EXIT_OK if passed else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="directory for the report and artifacts")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--timing", action="store_true", help="include wall-clock timing")
    common.add_argument("--svg", help="write an SVG picture to this path")

    ap = _Parser(prog="slag-toric", description="Toric SLag fibrations and their mirrors.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("gorenstein", parents=[common], help="Gorenstein degree and resolutions")
    s.add_argument("fan")
    s.set_defaults(func=cmd_gorenstein)

    s = sub.add_parser("discriminant", parents=[common], help="discriminant graph and monodromy")
    s.add_argument("fan")
    s.add_argument("--class", dest="class_", help="divisor class coordinates, comma separated")
    s.set_defaults(func=cmd_discriminant)

    s = sub.add_parser("smooth", parents=[common], help="Minkowski decompositions and smoothings")
    s.add_argument("polygon", help="polygon or fan document")
    s.add_argument("--x", help='deformation parameters, e.g. [["0","0"],["1","1"]]')
    s.add_argument("--all", action="store_true", help="list all decompositions, not only maximal")
    s.set_defaults(func=cmd_smooth)

    s = sub.add_parser("mirror", parents=[common], help="amoeba of the mirror curve and its spine")
    s.add_argument("curve")
    s.add_argument("--t", type=float)
    s.add_argument("--window", type=float, help="half-width of the square window")
    s.add_argument("--eps", type=float)
    s.add_argument("--grid", type=int)
    s.add_argument("--angles", type=int)
    s.set_defaults(func=cmd_mirror)

    s = sub.add_parser("verify", parents=[common], help="certify the SLag fibration numerically")
    s.add_argument("--potential", choices=("flat", "quadratic"), default="flat")
    s.add_argument("--n", type=int, default=3)
    s.add_argument("--variant", choices=("affine", "proper"), default="affine")
    s.add_argument("--samples", type=int, default=100, help="points per fiber")
    s.add_argument("--fibers", type=int, default=10)
    s.add_argument("--tol", type=float, default=1e-6)
    s.add_argument("--lambda", dest="lam", type=float, default=0.25)
    s.add_argument("--corrupt", action="store_true", help="negative control: break the fibration map")
    s.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except NotGorenstein as exc:
        code, msg = EXIT_GORENSTEIN, exc
    except NotAmple as exc:
        code, msg = EXIT_AMPLE, exc
    except TooLarge as exc:
        code, msg = EXIT_TOO_LARGE, exc
    except DegenerateHeights as exc:
        code, msg = EXIT_HEIGHTS, exc
    except (DocumentError, InvalidTriangulation, SlagToricError, ValueError, KeyError) as exc:
        code, msg = EXIT_PARSE, exc
    print(f"slag-toric: {type(msg).__name__}: {msg}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
