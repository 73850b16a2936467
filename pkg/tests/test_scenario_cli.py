import json
import math
from pathlib import Path

import numpy as np
import pytest

import exitdecay as ed
from exitdecay.cli import main
from exitdecay.errors import ValidationError
from exitdecay.scenario import parse_scenario

BROWNIAN_HALFSPACE = {
    "horizon": 1.0,
    "kernels": [{"family": "fbm", "alpha": 1.0}],
    "shift": {"kind": "zero"},
    "exit": {"kind": "halfspace", "xi": [1.0], "x": 1.0},
    "model": {"mode": "shared", "scale": {"kind": "weibull", "d": 1.0, "theta": 2.0}},
}


def write_scenario(tmp_path, doc, name="scenario.json") -> str:
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def test_parse_roundtrip():
    sc = parse_scenario(BROWNIAN_HALFSPACE)
    assert sc.p == 1 and sc.geometry == "halfspace" and sc.mode == "shared"
    assert sc.laws()[0] == ed.ScaleLaw(1.0, 2.0)
    result = sc.compute_decay()
    assert result.w == pytest.approx(math.sqrt(2.0), rel=1e-9)


def test_parse_errors_name_fields():
    doc = {k: v for k, v in BROWNIAN_HALFSPACE.items() if k != "exit"}
    with pytest.raises(ValidationError, match="exit"):
        parse_scenario(doc)
    doc = json.loads(json.dumps(BROWNIAN_HALFSPACE))
    doc["kernels"][0]["alpha"] = 2.5
    with pytest.raises(ValidationError, match=r"kernels\[0\]"):
        parse_scenario(doc)
    doc = json.loads(json.dumps(BROWNIAN_HALFSPACE))
    doc["exit"]["xi"] = [1.0, 1.0]
    with pytest.raises(ValidationError, match="exit.xi"):
        parse_scenario(doc)
    doc = json.loads(json.dumps(BROWNIAN_HALFSPACE))
    doc["model"]["scale"] = {"kind": "weibull", "d": -1.0, "theta": 2.0}
    with pytest.raises(ValidationError, match="model.scale"):
        parse_scenario(doc)


def test_ggbm_source_resolves_law():
    doc = json.loads(json.dumps(BROWNIAN_HALFSPACE))
    doc["model"]["scale"] = {"kind": "ggbm", "beta": 0.5, "rho": 0.5}
    sc = parse_scenario(doc)
    law = sc.laws()[0]
    assert law.d == pytest.approx(0.25, rel=1e-13)
    assert law.theta == pytest.approx(4.0, rel=1e-13)


def test_fixed_scale_has_no_law():
    doc = json.loads(json.dumps(BROWNIAN_HALFSPACE))
    doc["model"]["scale"] = {"kind": "fixed", "a": 1.0}
    sc = parse_scenario(doc)
    with pytest.raises(ValidationError, match="fixed"):
        sc.compute_decay()
    assert sc.perturbation_model_for_simulation().mode == "shared"


def test_cli_decay_reports_values(tmp_path, capsys):
    path = write_scenario(tmp_path, BROWNIAN_HALFSPACE)
    assert main(["decay", path]) == 0
    out = capsys.readouterr().out
    fields = dict(line.split(": ") for line in out.strip().splitlines())
    assert fields["model"] == "halfspace/shared"
    assert float(fields["w"]) == pytest.approx(1.414214, abs=1e-6)
    assert float(fields["t_star"]) == pytest.approx(1.0)
    assert float(fields["d"]) == 1.0 and float(fields["theta"]) == 2.0


def test_cli_decay_reports_resolved_ggbm_law(tmp_path, capsys):
    doc = json.loads(json.dumps(BROWNIAN_HALFSPACE))
    doc["model"]["scale"] = {"kind": "ggbm", "beta": 0.5, "rho": 0.5}
    path = write_scenario(tmp_path, doc)
    assert main(["decay", path]) == 0
    fields = dict(
        line.split(": ") for line in capsys.readouterr().out.strip().splitlines()
    )
    assert float(fields["d"]) == pytest.approx(0.25)
    assert float(fields["theta"]) == pytest.approx(4.0)


def test_cli_decay_rejects_theta_two_hadamard_quadrant(tmp_path, capsys):
    doc = {
        "horizon": 1.0,
        "kernels": [{"alpha": 1.0}, {"alpha": 1.0}],
        "exit": {"kind": "quadrant", "levels": [1.0, 1.0]},
        "model": {
            "mode": "hadamard",
            "scales": [
                {"kind": "weibull", "d": 1.0, "theta": 2.0},
                {"kind": "weibull", "d": 1.0, "theta": 2.0},
            ],
        },
    }
    path = write_scenario(tmp_path, doc)
    assert main(["decay", path]) == 2
    assert "theta > 2" in capsys.readouterr().err


def test_cli_decay_validation_failure_exit_code(tmp_path, capsys):
    doc = json.loads(json.dumps(BROWNIAN_HALFSPACE))
    doc["exit"]["x"] = -3.0
    path = write_scenario(tmp_path, doc)
    assert main(["decay", path]) == 2
    assert "error:" in capsys.readouterr().err
    assert main(["decay", str(tmp_path / "missing.json")]) == 2


def test_cli_mlp_brownian_ramp(tmp_path, capsys):
    path = write_scenario(tmp_path, BROWNIAN_HALFSPACE)
    assert main(["mlp", path, "--grid-points", "5"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "u,z_1,residual"
    rows = [line.split(",") for line in lines[1:]]
    # first row is the shift value at u = 0
    assert float(rows[0][0]) == 0.0 and float(rows[0][1]) == 0.0
    for cells in rows:
        assert float(cells[1]) == pytest.approx(float(cells[0]), abs=1e-12)
    # constraint residual vanishes at the exit time
    at_tstar = [c for c in rows if float(c[0]) == pytest.approx(1.0)]
    assert abs(float(at_tstar[0][2])) <= 1e-9


def test_cli_mlp_quadrant_residual_columns(tmp_path, capsys):
    doc = {
        "horizon": 1.0,
        "kernels": [{"alpha": 0.8}, {"alpha": 1.2}],
        "shift": {"kind": "constant", "values": [0.1, -0.1]},
        "exit": {"kind": "quadrant", "levels": [1.0, 1.5]},
        "model": {"mode": "shared", "scale": {"kind": "weibull", "d": 1.0, "theta": 2.0}},
    }
    path = write_scenario(tmp_path, doc)
    assert main(["mlp", path, "--grid-points", "11"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "u,z_1,z_2,residual_1,residual_2"
    rows = [[float(v) for v in line.split(",")] for line in lines[1:]]
    sc = parse_scenario(doc)
    result = sc.compute_decay()
    for i, t in enumerate(result.t_star):
        match = [r for r in rows if r[0] == pytest.approx(float(t), abs=1e-12)]
        assert match and abs(match[0][3 + i]) <= 1e-9


def test_cli_oracle_check_passes_and_fails_honestly(tmp_path, capsys):
    path = write_scenario(tmp_path, BROWNIAN_HALFSPACE)
    assert main(["oracle-check", path, "--m", "40"]) == 0
    out = capsys.readouterr().out
    assert "status: PASS" in out
    # interior minimizer on a coarse grid: the gap is reported, flag honest
    doc = json.loads(json.dumps(BROWNIAN_HALFSPACE))
    doc["shift"] = {"kind": "affine", "intercept": [0.0], "slope": [-3.0]}
    path = write_scenario(tmp_path, doc, "interior.json")
    assert main(["oracle-check", path, "--m", "5"]) == 1
    out = capsys.readouterr().out
    assert "status: FAIL" in out
    gap = float(dict(l.split(": ") for l in out.strip().splitlines())["rel_gap"])
    assert gap > 1e-3
    assert main(["oracle-check", path, "--m", "40"]) == 0


def test_cli_oracle_check_malformed_scenario(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert main(["oracle-check", str(path)]) == 2


def test_cli_simulate_deterministic_bytes(tmp_path, capsys):
    doc = json.loads(json.dumps(BROWNIAN_HALFSPACE))
    doc["simulation"] = {"grid_points": 128, "gammas": [1, 2], "samples": 20000, "seed": 11}
    path = write_scenario(tmp_path, doc)
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    assert main(["simulate", path, "--out", str(out1), "--no-plot"]) == 0
    assert main(["simulate", path, "--out", str(out2), "--no-plot"]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    report = capsys.readouterr().out
    assert "w_ref: 1.41421356" in report


def test_cli_simulate_fixed_scale_skips_curve(tmp_path, capsys):
    doc = json.loads(json.dumps(BROWNIAN_HALFSPACE))
    doc["model"]["scale"] = {"kind": "fixed", "a": 1.0}
    doc["simulation"] = {"grid_points": 128, "gammas": [1], "samples": 20000, "seed": 2}
    path = write_scenario(tmp_path, doc)
    assert main(["simulate", path]) == 0
    out = capsys.readouterr().out
    assert "decay-curve report skipped" in out
    first_row = out.splitlines()[1].split(",")
    # continuum value 0.3173 minus the 128-point grid-supremum bias (~0.025)
    assert 0.28 <= float(first_row[3]) <= 0.318


def test_cli_simulate_renders_figure(tmp_path):
    doc = json.loads(json.dumps(BROWNIAN_HALFSPACE))
    doc["simulation"] = {"grid_points": 64, "gammas": [1, 2], "samples": 5000, "seed": 3}
    path = write_scenario(tmp_path, doc)
    out = tmp_path / "run.csv"
    assert main(["simulate", path, "--out", str(out)]) == 0
    assert (tmp_path / "run.png").exists()
    out2 = tmp_path / "bare.csv"
    assert main(["simulate", path, "--out", str(out2), "--no-plot"]) == 0
    assert not (tmp_path / "bare.png").exists()


def test_cli_mlp_renders_figure(tmp_path):
    path = write_scenario(tmp_path, BROWNIAN_HALFSPACE)
    out = tmp_path / "path.csv"
    assert main(["mlp", path, "--out", str(out)]) == 0
    assert out.exists() and (tmp_path / "path.png").exists()


def test_cli_mlf_values_and_domains(capsys):
    assert main(["mlf", "--beta", "1", "--z", "1"]) == 0
    assert float(capsys.readouterr().out) == pytest.approx(2.718282, abs=1e-6)
    assert main(["mlf", "--beta", "0.5", "--tau", "0"]) == 0
    assert float(capsys.readouterr().out) == pytest.approx(0.564190, abs=1e-6)
    assert main(["mlf", "--beta", "1.5", "--z", "1"]) == 2
    capsys.readouterr()
    assert main(["mlf", "--beta", "1.0", "--tau", "1"]) == 2  # density needs beta < 1
    capsys.readouterr()
    assert main(["mlf", "--beta", "0.5"]) == 2  # exactly one of --z / --tau
    capsys.readouterr()
    assert main(["mlf", "--beta", "0.5", "--z", "1", "--tau", "1"]) == 2


def test_cli_decay_writes_json(tmp_path):
    path = write_scenario(tmp_path, BROWNIAN_HALFSPACE)
    out = tmp_path / "decay.json"
    assert main(["decay", path, "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert payload["w"] == pytest.approx(math.sqrt(2.0), rel=1e-9)
    assert payload["model"] == "halfspace/shared"


def test_repo_scenarios_parse_and_pass_oracle():
    root = Path(__file__).resolve().parents[1] / "scenarios"
    for name in ("brownian_halfspace.json", "ggbm_quadrant.json", "fixed_anchor.json"):
        sc = ed.load_scenario(root / name)
        assert sc.p >= 1
