import json
import subprocess
import sys

import numpy as np
import pytest

from schottky_kp.cli import fmt, run, to_json
from schottky_kp.degeneration import DegenerationScenario, SolitonData
from schottky_kp.graph import dumbbell_params, dumps_config, mcurve_params, one_vertex_graph, one_vertex_params


def cli(capsys, *argv):
    code = run([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def files(tmp_path):
    paths = {}
    for g in (1, 2):
        p = tmp_path / f"g{g}.json"
        p.write_text(dumps_config(*mcurve_params(g)))
        paths[f"g{g}"] = p
    bad = one_vertex_params([1, 1.5], [-1, 2.5], [0.5, 0.5], tails=[-4])
    paths["overlap"] = tmp_path / "overlap.json"
    paths["overlap"].write_text(dumps_config(one_vertex_graph(2), bad))
    paths["broken"] = tmp_path / "broken.json"
    paths["broken"].write_text("{not json")
    sol = SolitonData((1.0, 4.0), (-1.0, 2.5), -6.0)
    paths["soliton"] = tmp_path / "soliton.json"
    paths["soliton"].write_text(json.dumps(sol.to_dict()))
    graph, params = mcurve_params(2)
    for name, beta in (("half", (0.1, 0.5)), ("generic", (0.0, 0.0))):
        sc = DegenerationScenario(graph, params, "e2", beta=beta)
        paths[name] = tmp_path / f"{name}.json"
        paths[name].write_text(json.dumps(sc.to_dict()))
    sc = DegenerationScenario(*dumbbell_params(), "e", beta=(0.1, 0.2))
    paths["reducible"] = tmp_path / "reducible.json"
    paths["reducible"].write_text(json.dumps(sc.to_dict()))
    return paths


def test_mcurve_writes_loadable_config(capsys):
    code, out, _ = cli(capsys, "mcurve", "--genus", 3, "--tails", 2)
    assert code == 0
    data = json.loads(out)
    assert len(data["graph"]["edges"]) == 3 and len(data["graph"]["tails"]) == 2


def test_validate_passes_and_fails(capsys, files):
    code, out, _ = cli(capsys, "validate", files["g2"])
    assert code == 0 and json.loads(out)["passed"]
    code, out, _ = cli(capsys, "validate", files["overlap"])
    d = json.loads(out)
    assert code == 2 and d["error"] == "CirclesOverlap" and d["min_gap"] < 0


@pytest.mark.parametrize(
    "argv",
    [
        ("validate", "missing.json"),
        ("nonsense",),
        ("kp-check", "x.json", "--times", "17"),
        ("kp-check", "x.json", "--tol", "-1"),
        ("mcurve", "--genus", "0"),
    ],
)
def test_input_errors_exit_one(capsys, argv):
    assert cli(capsys, *argv)[0] == 1


def test_broken_json_exit_one(capsys, files):
    code, _, err = cli(capsys, "periods", files["broken"])
    assert code == 1 and "InputError" in err


def test_periods_json_genus_one(capsys, files):
    code, out, _ = cli(capsys, "periods", files["g1"])
    d = json.loads(out)
    assert code == 0
    assert abs(complex(*d["P"][0][0]) - 0.01) < 1e-14


def test_periods_csv(capsys, files):
    code, out, _ = cli(capsys, "periods", files["g2"], "--format", "csv")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "i,j,P_re,P_im,Z_re,Z_im" and len(lines) == 5


def test_kp_check_default_grid(capsys, files):
    code, out, err = cli(capsys, "kp-check", files["g2"])
    lines = out.strip().splitlines()
    assert code == 0
    assert lines[0] == "x,t2,t3,u_re,u_im,normalized_residual"
    assert len(lines) == 126
    assert err.startswith("max_normalized_residual")
    assert max(float(line.split(",")[-1]) for line in lines[1:]) < 1e-10


def test_kp_check_tolerance_unmet(capsys, files):
    assert cli(capsys, "kp-check", files["g2"], "--tol", "1e-15")[0] == 4


def test_kp_check_truncation_failure(capsys, files):
    code, _, err = cli(capsys, "kp-check", files["g2"], "--max-word-len", 0)
    assert code == 3 and "TruncationNotConverged" in err


def test_kp_check_with_characteristic_json(capsys, files):
    code, out, _ = cli(capsys, "kp-check", files["g2"], "--alpha", "0.1,0.2", "--beta", "0.5,0",
                       "--format", "json", "--grid", "0:0:1,0:0:1,0:0:2")
    d = json.loads(out)
    assert code == 0 and d["summary"]["points"] == 2 and d["summary"]["passed"]


def test_kp_check_characteristic_length_checked(capsys, files):
    assert cli(capsys, "kp-check", files["g2"], "--alpha", "0.1")[0] == 1


def test_empty_grid_gives_header_only(capsys, files):
    code, out, _ = cli(capsys, "kp-check", files["g1"], "--grid", "0:1:0,0:0:1,0:0:1")
    assert code == 0 and out == "x,t2,t3,u_re,u_im,normalized_residual\n"


def test_soliton(capsys, files):
    code, out, _ = cli(capsys, "soliton", files["soliton"])
    assert code == 0 and len(out.strip().splitlines()) == 126


@pytest.mark.parametrize("name, expected", [("half", 0), ("reducible", 0), ("generic", 4)])
def test_degenerate_exit_codes(capsys, files, name, expected):
    code, out, _ = cli(capsys, "degenerate", files[name])
    d = json.loads(out)
    assert code == expected
    assert d["monotone"] and len(d["rows"]) == 3


def test_degenerate_threads_do_not_change_output(capsys, files, monkeypatch):
    _, serial, _ = cli(capsys, "degenerate", files["half"])
    monkeypatch.setenv("SCHOTTKY_KP_THREADS", "3")
    _, parallel, _ = cli(capsys, "degenerate", files["half"])
    assert serial == parallel
    monkeypatch.setenv("SCHOTTKY_KP_THREADS", "zero")
    assert cli(capsys, "degenerate", files["half"])[0] == 1


def test_laurent(capsys, files):
    code, out, _ = cli(capsys, "laurent", files["g2"], "--times", 4)
    d = json.loads(out)
    assert code == 0 and d["M"] == 4 and d["symmetry_defect"] < 1e-8
    code, out, _ = cli(capsys, "laurent", files["g1"], "--format", "csv")
    assert out.splitlines()[0] == "kind,row,col,re,im"


def test_out_option_writes_file(capsys, files, tmp_path):
    target = tmp_path / "out.json"
    code, out, _ = cli(capsys, "periods", files["g1"], "--out", target)
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["genus"] == 1


@pytest.mark.parametrize("v", [0.1, 1 / 3, 1e-300, 2.5e17, -0.0])
def test_floats_round_trip_exactly(v):
    assert float(fmt(v)) == v
    assert json.loads(to_json({"x": v}))["x"] == v


def test_json_formatting_of_special_values():
    d = json.loads(to_json({"c": 1 + 2j, "nan": float("nan"), "a": np.arange(3), "b": np.bool_(True)}))
    assert d == {"c": [1.0, 2.0], "nan": None, "a": [0, 1, 2], "b": True}


def test_module_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "schottky_kp.cli", "validate", str(files["g1"])],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["passed"]
