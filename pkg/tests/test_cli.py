import json

import pytest

from slag_toric import io
from slag_toric.cli import main

DATA = io.data_path("")


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, out


def write(tmp_path, name, doc):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return p


def test_gorenstein(capsys):
    code, out = run(capsys, "gorenstein", DATA / "example_2_3.json")
    assert code == 0
    rep = io.parse(out)
    assert rep["outputs"]["m0"] == ["1", "1", "1"] and rep["outputs"]["smooth"] is True
    code, out = run(capsys, "gorenstein", DATA / "delpezzo6.json")
    assert io.parse(out)["outputs"]["m0"] == ["0", "0", "1"]


def test_exit_codes_for_bad_input(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{oops")
    assert run(capsys, "gorenstein", bad)[0] == 1
    assert run(capsys, "gorenstein", tmp_path / "missing.json")[0] == 1
    assert run(capsys, "nonsense")[0] == 1
    not_gor = write(tmp_path, "ng.json", {"kind": "fan", "lattice": {"basis": [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]]},
                                         "rays": [["1", "0", "0"], ["0", "1", "0"], ["1", "1", "2"]]})
    assert run(capsys, "gorenstein", not_gor)[0] == 2
    assert run(capsys, "discriminant", DATA / "example_2_3.json", "--class", "0")[0] == 3
    big = write(tmp_path, "big.json", {"kind": "polygon", "vertices": [[0, 0], [9, 0], [9, 9], [0, 9]]})
    assert run(capsys, "smooth", big)[0] == 4
    mono = write(tmp_path, "mono.json", {"kind": "curve", "support": [[0, 0]], "phi": ["0"]})
    assert run(capsys, "mirror", mono)[0] == 5


def test_discriminant_graphs_and_svg(capsys, tmp_path):
    svg = tmp_path / "g.svg"
    code, out = run(capsys, "discriminant", DATA / "example_2_3.json", "--class", "3", "--svg", svg)
    assert code == 0
    (g,) = io.parse(out)["outputs"]["graphs"]
    assert g["counts"] == [3, 3, 3] and g["consistent"]
    text = svg.read_text()
    assert text.startswith("<!-- slag-toric") and text.count("<circle") == 3
    assert text.count("marker-end") == 3 and text.count("<text") == 6
    code, out = run(capsys, "discriminant", DATA / "delpezzo6.json")
    assert io.parse(out)["outputs"]["graphs"][0]["counts"] == [6, 6, 6]


def test_smooth(capsys, tmp_path):
    code, out = run(capsys, "smooth", DATA / "delpezzo6.json")
    decs = io.parse(out)["outputs"]["decompositions"]
    assert sorted(d["component_count"] for d in decs) == [3, 6]
    assert all(d["altmann"]["embedding_ok"] for d in decs)
    code, out = run(capsys, "smooth", DATA / "square_odp.json")
    (d,) = io.parse(out)["outputs"]["decompositions"]
    assert (d["component_count"], d["distinct_planes"]) == (2, 2)
    tri = write(tmp_path, "tri.json", {"kind": "polygon", "vertices": [[0, 0], [1, 0], [0, 1]]})
    code, out = run(capsys, "smooth", tri)
    assert code == 0 and io.parse(out)["outputs"]["count"] == 0
    code, out = run(capsys, "smooth", DATA / "square_odp.json", "--x", '[["0","0"],["0","0"]]')
    assert io.parse(out)["outputs"]["decompositions"][0]["distinct_planes"] == 1


def test_mirror_binomial_is_a_line(capsys, tmp_path):
    doc = write(tmp_path, "bin.json", {"kind": "curve", "support": [[0, 0], [1, 1]], "phi": ["0", "0"],
                                       "grid": 41, "angles": 8})
    code, out = run(capsys, "mirror", doc, "--t", "0.5", "--out", tmp_path / "o")
    rep = io.parse(out)["outputs"]
    assert code == 0 and rep["spine"]["counts"] == [0, 0, 0] and len(rep["spine"]["lines"]) == 1
    assert rep["fattening"]["contained"] == 1.0
    assert (tmp_path / "o" / "cloud.csv").read_text().startswith("x1,x2\n")


def test_verify(capsys, tmp_path):
    code, out = run(capsys, "verify", "--n", 2, "--fibers", 2, "--samples", 10)
    assert code == 0 and io.parse(out)["outputs"]["passed"]
    code, out = run(capsys, "verify", "--n", 2, "--fibers", 2, "--samples", 10, "--corrupt",
                    "--out", tmp_path)
    assert code == 6
    assert io.parse((tmp_path / "verify.json").read_text())["outputs"]["passed"] is False


def test_csv_format(capsys):
    code, out = run(capsys, "gorenstein", DATA / "example_2_3.json", "--format", "csv")
    assert out.startswith("key,value\n") and "outputs.m0[0],1\n" in out


def test_timing_is_opt_in(capsys):
    _, out = run(capsys, "gorenstein", DATA / "example_2_3.json")
    assert "timing" not in io.parse(out)
    _, out = run(capsys, "gorenstein", DATA / "example_2_3.json", "--timing")
    assert "seconds" in io.parse(out)["timing"]


@pytest.mark.parametrize("argv", [
    ["discriminant", DATA / "square_odp.json"],
    ["smooth", DATA / "delpezzo6.json"],
    ["verify", "--n", 2, "--fibers", 1, "--samples", 5, "--seed", 11],
    ["mirror", DATA / "example_4_2_curve.json", "--grid", 40, "--angles", 16],
])
def test_outputs_are_byte_identical(capsys, tmp_path, argv):
    texts = []
    for k in range(2):
        out_dir = tmp_path / str(k)
        code, out = run(capsys, *argv, "--out", out_dir)
        assert code == 0
        files = {p.name: p.read_bytes() for p in sorted(out_dir.iterdir())}
        texts.append((out, files))
    assert texts[0] == texts[1]


def test_bundled_document_by_name(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    assert main(["gorenstein", "example_2_3.json"]) == 0
    assert "m0" in capsys.readouterr().out
