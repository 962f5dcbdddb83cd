"""One test per acceptance criterion; each prints a single PASS/FAIL line."""

import time
from fractions import Fraction

import numpy as np
import pytest

from slag_toric import io
from slag_toric.amoeba import amoeba_sample, curve_family, fattening_check, required_eps
from slag_toric.cli import build_graphs, main
from slag_toric.cones import Cone, fan_from_triangulation, gorenstein_degree, star_subdivision
from slag_toric.deformations import (LatticePolygon, altmann_cone, minkowski_decompositions, plane_values,
                                     polygon_chart, smoothing_discriminant, verify_embedding)
from slag_toric.fibration import GENERIC, NEGATIVE, dualize, is_unipotent_step, vertex_consistency
from slag_toric.lattice import LatticeSpec, primitive_int
from slag_toric.legendre import HessianPotentialGrid, dual_grid, legendre_dual, monge_ampere_residual
from slag_toric.moment import DivisorClass, build_ray_map, moment_polytope
from slag_toric.slag import AFFINE, PROPER, TorusInvariantPotential, certify, hamiltonian_check, \
    random_seed_point
from slag_toric.tropical import TropicalPolynomial, compare_spine_to_discriminant, tropical_curve

THIRD = Fraction(1, 3)
N_23 = LatticeSpec.from_generators([(THIRD,) * 3, (1, 0, 0), (0, 1, 0), (0, 0, 1)])
Z3 = LatticeSpec.standard(3)
HEXAGON = [(0, 0, 1), (1, 0, 1), (2, 1, 1), (2, 2, 1), (1, 2, 1), (0, 1, 1)]
SQUARE = [(0, 0, 1), (1, 0, 1), (1, 1, 1), (0, 1, 1)]


@pytest.fixture
def verdict(capsys):
    def check(number, name, ok, detail=""):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {name}  {detail}")
        assert ok, detail
    return check


def example_fan():
    g = gorenstein_degree(Cone.generated_by(N_23, [(1, 0, 0), (0, 1, 0), (0, 0, 1)]))
    return g, fan_from_triangulation(g, star_subdivision(g, (THIRD,) * 3))


def test_01_gorenstein_detection(verdict):
    t0 = time.perf_counter()
    m_ex = gorenstein_degree(Cone.generated_by(N_23, [(1, 0, 0), (0, 1, 0), (0, 0, 1)])).m0
    m_dp = gorenstein_degree(Cone.generated_by(Z3, HEXAGON)).m0
    dt = time.perf_counter() - t0
    ok = m_ex == (1, 1, 1) and m_dp == (0, 0, 1) and dt < 1.0
    shown = ", ".join("(" + ",".join(map(str, m)) + ")" for m in (m_ex, m_dp))
    verdict(1, "Gorenstein degree", ok, f"m0={shown}; {dt:.3f}s")


def test_02_ray_map_kernel(verdict):
    t0 = time.perf_counter()
    _, f = example_fan()
    kernel = build_ray_map(f).kernel
    dt = time.perf_counter() - t0
    ok = len(kernel) == 1 and kernel[0] in ((1, 1, 1, -3), (-1, -1, -1, 3)) and dt < 1.0
    verdict(2, "ray map kernel", ok, f"kernel={kernel}; {dt:.3f}s")


def test_03_moment_polytope(verdict):
    t0 = time.perf_counter()
    _, f = example_fan()
    ok, details = True, []
    for a in (Fraction(1, 2), 1, 3, Fraction(7, 2)):
        p = moment_polytope(f, DivisorClass(alpha=(a,)))
        # normalize each facet to a primitive integer normal with its offset
        facets = set()
        for n, b in p.h_rep:
            prim = primitive_int(n)
            scale = Fraction(prim[0] or prim[1] or prim[2]) / (n[0] or n[1] or n[2])
            facets.add((prim, b * scale))
        model = {((1, 0, 0), 0), ((0, 1, 0), 0), ((0, 0, 1), 0), ((1, 1, 1), -a)}
        rays = {primitive_int(r) for r in p.rays}
        good = (facets == model and len(p.vertices) == 3
                and set(p.vertices) == {(a, 0, 0), (0, a, 0), (0, 0, a)}
                and rays == {(1, 0, 0), (0, 1, 0), (0, 0, 1)})
        ok &= good
        details.append(f"a={a}:{'ok' if good else 'bad'}")
    dt = time.perf_counter() - t0
    verdict(3, "moment polytope", ok and dt < 1.0, f"{' '.join(details)}; {dt:.3f}s")


def test_04_discriminant_graph(verdict):
    t0 = time.perf_counter()
    fd = io.parse_fan(io.load(io.data_path("example_2_3.json")))
    _, [(f, p, gr)] = build_graphs(fd, DivisorClass(alpha=(3,)))
    trivalent = all(gr.valence(v) == 3 for v in range(len(gr.vertices)))
    unipotent = all(is_unipotent_step(e.monodromy) for e in gr.edges)
    consistent, bad = vertex_consistency(gr)
    counts = (len(gr.vertices), len(gr.bounded_edges), len(gr.rays))
    dt = time.perf_counter() - t0
    ok = counts == (3, 3, 3) and trivalent and unipotent and consistent and dt < 1.0
    verdict(4, "discriminant graph", ok, f"counts={counts}, unipotent={unipotent}, "
                                         f"vertex products trivial={consistent}; {dt:.3f}s")


def test_05_duality_involution(verdict):
    fd = io.parse_fan(io.load(io.data_path("example_2_3.json")))
    _, [(_, _, gr)] = build_graphs(fd, DivisorClass(alpha=(3,)))
    once, twice = dualize(gr), dualize(dualize(gr))
    restored = twice.monodromies == tuple(e.monodromy for e in gr.edges) and \
        twice.vertex_types == gr.vertex_types
    types = set(once.vertex_types) | set(once.edge_types)
    ok = restored and types <= {GENERIC, NEGATIVE}
    verdict(5, "duality involution", ok, f"restored={restored}, dual types={sorted(types)}")


def test_06_minkowski_census(verdict):
    t0 = time.perf_counter()
    hexagon = LatticePolygon.from_points([(0, 0), (1, 0), (2, 1), (2, 2), (1, 2), (0, 1)])
    square = LatticePolygon.from_points([(0, 0), (1, 0), (1, 1), (0, 1)])
    triangle = LatticePolygon.from_points([(0, 0), (1, 0), (0, 1)])
    counts = tuple(len(minkowski_decompositions(p)) for p in (hexagon, square, triangle))
    dt = time.perf_counter() - t0
    verdict(6, "Minkowski census", counts == (2, 1, 0) and dt < 5.0, f"counts={counts}; {dt:.3f}s")


def test_07_altmann_embedding(verdict):
    t0 = time.perf_counter()
    results = []
    for verts in (HEXAGON, SQUARE):
        g = gorenstein_degree(Cone.generated_by(Z3, verts))
        p, chart = polygon_chart(g)
        for d in minkowski_decompositions(p):
            a = altmann_cone(p, d, chart)
            degree = gorenstein_degree(a.sigma_tilde).m0
            results.append(verify_embedding(g, a) and degree == a.m0_prime
                           and a.m0_prime == (0, 0) + (1,) * len(d.summands))
    dt = time.perf_counter() - t0
    ok = len(results) == 3 and all(results) and dt < 1.0
    verdict(7, "Altmann embedding", ok, f"checks={results}; {dt:.3f}s")


def test_08_smoothing_discriminants(verdict):
    hexagon = LatticePolygon.from_points([(0, 0), (1, 0), (2, 1), (2, 2), (1, 2), (0, 1)])
    square = LatticePolygon.from_points([(0, 0), (1, 0), (1, 1), (0, 1)])
    x = [(Fraction(0), Fraction(0)), (Fraction(1), Fraction(2)), (Fraction(-2), Fraction(1, 3))]
    seen = {}
    for d in minkowski_decompositions(hexagon):
        sd = smoothing_discriminant(d, x[:d.p + 1])
        seen[f"hex/{len(d.summands)}"] = (len(sd.components), sd.distinct_planes)
    (d,) = minkowski_decompositions(square)
    sd = smoothing_discriminant(d, x[:2])
    seen["square"] = (len(sd.components), sd.distinct_planes)
    spreads = []
    for s in (1, Fraction(1, 10), Fraction(1, 1000), 0):
        vals = plane_values([(s * a, s * b) for a, b in x], 3)
        spreads.append(max(vals) - min(vals))
    converge = spreads[-1] == 0 and all(a > b for a, b in zip(spreads, spreads[1:]))
    ok = seen == {"hex/3": (3, 3), "hex/2": (6, 2), "square": (2, 2)} and converge
    verdict(8, "smoothing discriminants", ok, f"{seen}, spreads={[str(s) for s in spreads]}")


def test_09_tropical_amoeba(verdict):
    t0 = time.perf_counter()
    cd = io.parse_curve(io.load(io.data_path("example_4_2_curve.json")))
    fan = io.load(io.data_path("example_2_3.json"))
    fan["basis"] = cd.compare["basis"]
    fan.pop("display_frame")
    _, [(_, _, gr)] = build_graphs(io.parse_fan(fan), DivisorClass(alpha=(3,)))
    tp = TropicalPolynomial.from_phi(cd.support, cd.phi)
    req, fractions, iso = [], None, None
    for t in (0.1, 0.05, 0.01):
        big_l = -np.log(t)
        window = 3 * big_l
        tc = tropical_curve(tp, big_l)
        grid = np.linspace(-window, window, 200)
        cloud = amoeba_sample(curve_family(cd.support, [float(p) for p in cd.phi], cd.coefficients, t),
                              grid, 64, x2_grid=grid)
        req.append(required_eps(cloud, tc, window))
        if t == 0.01:
            fractions = fattening_check(cloud, tc, 1.0, window)
            counts = (len(tc.vertices), len(tc.bounded_edges), len(tc.rays))
            iso = compare_spine_to_discriminant(tc, gr, cd.basis_change)["isomorphic"]
    dt = time.perf_counter() - t0
    monotone = req[0] > req[1] > req[2]
    ok = (counts == (3, 3, 3) and iso and min(fractions) >= 0.99 and monotone and dt < 60.0)
    verdict(9, "tropical spine and amoeba", ok,
            f"counts={counts}, isomorphic={iso}, fractions={fractions}, "
            f"required eps={[round(r, 3) for r in req]}; {dt:.1f}s")


def test_10_slag_certification(verdict):
    t0 = time.perf_counter()
    worst, control, ham = 0.0, np.inf, 0.0
    for name in ("flat", "quadratic"):
        for n in (2, 3):
            p = TorusInvariantPotential.named(name, n)
            for variant in (AFFINE, PROPER):
                rep = certify(p, variant, fibers=10, points=100, seed=0, tol=1e-6)
                assert rep.critical == 0
                worst = max(worst, rep.max_omega, rep.max_im_omega)
            bad = certify(p, AFFINE, fibers=2, points=10, seed=0, corrupted=True)
            control = min(control, max(bad.max_omega, bad.max_im_omega))
            rng = np.random.default_rng(n)
            for _ in range(5):
                z = random_seed_point(n, rng)
                ham = max(ham, max(hamiltonian_check(p, j, z) for j in range(n)))
    dt = time.perf_counter() - t0
    ok = worst < 1e-6 and control >= 1e4 * worst and ham < 1e-6 and dt < 30.0
    verdict(10, "SLag certification", ok,
            f"max residual={worst:.2e}, control={control:.2e}, hamiltonian={ham:.2e}; {dt:.1f}s")


def test_11_legendre_monge_ampere(verdict):
    t0 = time.perf_counter()
    k = HessianPotentialGrid.sample(lambda a, b: (a * a + b * b) / 2, [-1, -1], [1, 1], 41)
    dual, kd = legendre_dual(k)
    fixed = max(np.abs(kd - k.values).max(), *(np.abs(y - d).max() for y, d in zip(k.mesh(), dual)))
    errs = []
    for n in (21, 41, 81):
        g = HessianPotentialGrid.sample(lambda y: np.exp(y) + y * y, [-1], [1], n)
        errs.append(float(np.abs(dual_grid(dual_grid(g)).values - g.values).max()))
    ratios = [errs[0] / errs[1], errs[1] / errs[2]]
    ma_quad = monge_ampere_residual(k)[1]
    ma_exp = monge_ampere_residual(HessianPotentialGrid.sample(
        lambda a, b: np.exp(a) + np.exp(b), [-1, -1], [1, 1], 41))[1]
    dt = time.perf_counter() - t0
    ok = (fixed < 1e-12 and min(ratios) >= 3.5 and ma_quad < 1e-10 and 0.1 <= ma_exp <= 10
          and dt < 5.0)
    verdict(11, "Legendre and Monge-Ampere", ok,
            f"fixed point={fixed:.1e}, halving ratios={[round(r, 2) for r in ratios]}, "
            f"MA quadratic={ma_quad:.1e}, MA exp={ma_exp:.2f}; {dt:.2f}s")


def test_12_determinism(verdict, tmp_path, capsys):
    data = io.data_path("")
    commands = [
        ["gorenstein", data / "delpezzo6.json"],
        ["discriminant", data / "example_2_3.json", "--class", "3"],
        ["smooth", data / "delpezzo6.json"],
        ["mirror", data / "example_4_2_curve.json"],
        ["verify", "--potential", "quadratic", "--n", "3", "--fibers", "2", "--samples", "20", "--seed", "5"],
    ]
    same = []
    for argv in commands:
        runs = []
        for k in range(2):
            out_dir = tmp_path / f"{argv[0]}{k}"
            code = main([str(a) for a in argv] + ["--out", str(out_dir)])
            stdout = capsys.readouterr().out
            files = {p.name: p.read_bytes() for p in sorted(out_dir.iterdir())
                     if p.suffix in (".json", ".csv")}
            runs.append((code, stdout, files))
        same.append(runs[0] == runs[1])
    verdict(12, "determinism", all(same), f"identical={dict(zip((c[0] for c in commands), same))}")
