from __future__ import annotations

import json
import subprocess
import sys

import pytest

from wem.cli import main

T_JSON = {"dimension": 2, "halfspaces": [{"normal": [1, 0], "offset": 0}, {"normal": [0, 1], "offset": 0},
                                         {"normal": [-2, -1], "offset": 2}]}
SQUARE_JSON = {"dimension": 2, "halfspaces": [{"normal": [1, 0], "offset": 0}, {"normal": [0, 1], "offset": 0},
                                              {"normal": [-1, 0], "offset": 1}, {"normal": [0, -1], "offset": 1}]}


@pytest.fixture
def files(tmp_path):
    out = {}
    redundant = json.loads(json.dumps(SQUARE_JSON))
    redundant["halfspaces"].append({"normal": [-1, 0], "offset": 2})
    non_integral = {"dimension": 2, "halfspaces": [{"normal": [1, 0], "offset": 0}, {"normal": [0, 1], "offset": 0},
                                                   {"normal": [-2, -2], "offset": 1}]}
    for name, obj in [("T", T_JSON), ("square", SQUARE_JSON), ("redundant", redundant), ("frac", non_integral)]:
        path = tmp_path / f"{name}.json"
        path.write_text(json.dumps(obj))
        out[name] = str(path)
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    out["bad"] = str(bad)
    return out


def run(capsys, *argv):
    code = main(list(argv))
    doc = json.loads(capsys.readouterr().out)
    return code, doc["result"], doc["manifest"]


def test_verify(capsys, files):
    code, result, manifest = run(capsys, "verify", files["T"])
    assert code == 0
    assert len(result["vertices"]) == 3
    assert manifest["command"] == "verify" and manifest["polytope"] == T_JSON
    code, result, _ = run(capsys, "verify", files["redundant"])
    assert code == 1 and result["witness"] == {"facet": 4}
    code, result, _ = run(capsys, "verify", files["frac"])
    assert code == 1 and result["error"] == "non-primitive"
    code, result, _ = run(capsys, "verify", files["bad"])
    assert code == 2 and result["error"] == "input"


@pytest.mark.parametrize("name, q, expected", [("square", "1/2", "1"), ("T", "1", "4"), ("T", "0", "0")])
def test_sum(capsys, files, name, q, expected):
    code, result, _ = run(capsys, "sum", files[name], "--q", q)
    assert code == 0 and result["weightedSum"] == expected


def test_sum_with_polynomial(capsys, files):
    poly = json.dumps([{"exponents": [1, 0], "coefficient": "1/2"}, {"exponents": [0, 2], "coefficient": "3"}])
    code, result, _ = run(capsys, "sum", files["T"], "--q", "1/3", "--poly", poly)
    # points (0,0) q^2, (1,0) q^2, (0,2) q^2, (0,1) q: 1/2 q^2 + 12 q^2 + 3 q
    assert result["weightedSum"] == "43/18"
    code, result, _ = run(capsys, "sum", files["T"], "--q", "x/3")
    assert code == 2
    code, result, _ = run(capsys, "sum", files["T"], "--q", "1", "--poly", '[{"exponents": [1], "coefficient": 1}]')
    assert code == 2


def test_em_exact(capsys, files):
    poly = json.dumps([{"exponents": [2, 1], "coefficient": "1"}, {"exponents": [0, 0], "coefficient": "2"}])
    code, result, manifest = run(capsys, "em", files["T"], "--q", "1/3", "--poly", poly, "--compare-oracle")
    assert code == 0
    assert result["remainder"] == "0" and result["mainTerm"] == result["weightedSum"]
    assert manifest["ambientOrder"] == 2 and manifest["xi"] == ["1", "2"]
    twisted = [c for c in result["contributions"] if c["face"] == [1, 2]]
    assert len(twisted) == 1
    code, result, _ = run(capsys, "em", files["T"], "--q", "1/3", "--poly", poly, "--k", "2", "--compare-oracle")
    assert code == 1 and result["error"] == "mathematical"


def test_em_half_weight_and_fast_path(capsys, files):
    code, result, _ = run(capsys, "em", files["square"], "--q", "1/2", "--regular-fastpath", "--compare-oracle")
    assert code == 0
    assert result["lOperatorAgrees"] is True
    assert result["regularFastpath"] == result["mainTerm"] == "1"
    code, _, _ = run(capsys, "em", files["T"], "--q", "1/2", "--regular-fastpath")
    assert code == 1


def test_em_polarization_choice(capsys, files):
    _, a, _ = run(capsys, "em", files["T"], "--q", "2/5", "--xi", "1,2")
    _, b, _ = run(capsys, "em", files["T"], "--q", "2/5", "--xi=-3,1")
    assert a["mainTerm"] == b["mainTerm"]
    code, result, _ = run(capsys, "em", files["square"], "--q", "1", "--xi", "1,0")
    assert code == 1 and result["error"] == "polarization"


def test_em_bump(capsys, files):
    bump = json.dumps({"center": [0.5, 0.7], "radius": 1.2})
    code, result, manifest = run(capsys, "em", files["T"], "--q", "1/3", "--bump", bump, "--k", "2")
    assert code == 0
    assert abs(result["weightedSum"] - result["mainTerm"] - result["remainder"]) < 1e-15
    assert result["achievedTolerance"] < 1e-8
    assert abs(result["remainder"] - result["details"]["remainder_by_integral"]) < 1e-9
    assert manifest["tolerances"]["quadrature"] == 1e-9


def test_groups_and_decompose(capsys, files):
    code, result, _ = run(capsys, "groups", files["T"])
    nontrivial = [f for f in result["faces"] if f["order"] > 1]
    assert code == 0 and len(nontrivial) == 1 and nontrivial[0]["invariant_factors"] == [2]
    code, result, _ = run(capsys, "decompose", files["square"], "--xi", "1,2")
    assert len(result["cones"]) == 4 and sorted(result["flipCounts"]) == [0, 1, 1, 2]


def test_em1d(capsys):
    code, result, _ = run(capsys, "em1d", "--a", "0", "--b", "5", "--q", "1/3")
    assert code == 0 and result["weightedSum"] == result["mainTerm"] == "14/3"
    code, result, _ = run(capsys, "em1d", "--a", "0", "--b", "4", "--q", "1/2", "--function", "bump",
                          "--center", "1.5", "--radius", "2", "--m", "5")
    assert abs(result["remainderByDifference"] - result["remainderByIntegral"]) < 1e-8
    code, result, _ = run(capsys, "em1d", "--q", "1/3", "--function", "sin-bump", "--center", "1",
                          "--radius", "1.8", "--twist", "1/4", "--m", "3")
    diff = result["remainderByDifference"]
    integral = result["remainderByIntegral"]
    assert abs(complex(diff["re"], diff["im"]) - complex(integral["re"], integral["im"])) < 1e-8
    code, _, _ = run(capsys, "em1d", "--q", "1/3", "--m", "1", "--b", "2")
    assert code == 2


def test_output_file_and_exact_reproducibility(capsys, files, tmp_path):
    target = tmp_path / "out.json"
    poly = json.dumps([{"exponents": [1, 1], "coefficient": "5/3"}])
    assert main(["-o", str(target), "em", files["T"], "--q", "2", "--poly", poly]) == 0
    first = json.loads(target.read_text())
    # rerun from the manifest's input echo
    echo = first["manifest"]["input"]
    assert main(["em", echo["polytope"], "--q", echo["q"], "--poly", echo["poly"]]) == 0
    second = json.loads(capsys.readouterr().out)
    assert first["result"] == second["result"]


def test_console_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "wem.cli", "verify", files["redundant"]],
                          capture_output=True, text=True)
    assert proc.returncode == 1
    proc = subprocess.run([sys.executable, "-m", "wem.cli", "bogus"], capture_output=True, text=True)
    assert proc.returncode == 2
