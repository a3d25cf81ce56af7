"""
Command-line interface tests.
"""

import json

import pandas as pd
import pytest
from typer.testing import CliRunner

from spinbath.cli import app
from spinbath.core.models import DecayCurve
from spinbath.io import read_decay_csv, render_csv
from spinbath.pipelines import verify as verify_module

runner = CliRunner()


def _write_config(tmp_path, **overrides):
    data = {
        "modes": [{"omega": 10.0, "cutoff": 6}],
        "g": 4.0,
        "dt": 0.1,
        "beta": "inf",
        "depths": [0, 1, 2, 3],
    }
    data.update(overrides)
    path = tmp_path / "run.json"
    path.write_text(json.dumps(data))
    return path


def test_presets_command():
    result = runner.invoke(app, ["presets"])
    assert result.exit_code == 0


def test_decay_writes_parseable_csv(tmp_path):
    out = tmp_path / "decay.csv"
    result = runner.invoke(app, ["decay", "--preset", "reference_markovian", "--out", str(out)])
    assert result.exit_code == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# spinbath-rb")
    assert lines[1] == "# command: decay"
    assert lines[2].startswith("# config: ")
    curve, meta = read_decay_csv(out)
    assert len(curve) == 101
    assert curve.stderr is None
    assert meta["config"].mode == "markovian"


def test_decay_is_byte_identical(tmp_path):
    config = _write_config(tmp_path, method="montecarlo", samples=3)
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (first, second):
        result = runner.invoke(app, ["decay", "--config", str(config), "--seed", "5", "--out", str(out)])
        assert result.exit_code == 0
    assert first.read_bytes() == second.read_bytes()


def test_decay_always_starts_at_depth_zero(tmp_path):
    config = _write_config(tmp_path, depths=[1, 2, 3])
    out = tmp_path / "decay.csv"
    result = runner.invoke(app, ["decay", "--config", str(config), "--out", str(out)])
    assert result.exit_code == 0
    curve, _ = read_decay_csv(out)
    assert curve.depths.tolist() == [0, 1, 2, 3]
    assert curve.values[0] == pytest.approx(1.0)


@pytest.mark.parametrize(
    "args",
    [
        ["decay"],
        ["decay", "--preset", "reference_markovian", "--config", "run.json"],
        ["decay", "--preset", "no_such_preset"],
        ["decay", "--config", "missing.json"],
        ["decay", "--preset", "reference_markovian", "--mode", "bogus"],
    ],
)
def test_configuration_errors_exit_2(args):
    result = runner.invoke(app, args)
    assert result.exit_code == 2


@pytest.mark.parametrize(
    "args",
    [
        ["decay", "--preset", "reference_xi", "--method", "trajectory"],
        ["decay", "--preset", "reference_nonmarkovian", "--method", "trajectory"],
        ["decay", "--preset", "reference_nonmarkovian", "--method", "closed"],
        ["witness", "--preset", "reference_xi"],
    ],
)
def test_compatibility_errors_exit_3(args):
    result = runner.invoke(app, args)
    assert result.exit_code == 3


def test_witness_command(tmp_path):
    config = _write_config(tmp_path, depths=[1, 2], n_circuits=2)
    out = tmp_path / "witness.csv"
    result = runner.invoke(app, ["witness", "--config", str(config), "--out", str(out)])
    assert result.exit_code == 0
    text = out.read_text()
    assert "# summary\n" in text
    frame = pd.read_csv(out, comment="#")
    assert list(frame.columns) == ["circuit_id", "depth", "D", "deltaD"]
    assert len(frame) == 4


def test_photon_command(tmp_path):
    config = _write_config(tmp_path, cutoffs=[2, 3])
    out = tmp_path / "photon.csv"
    result = runner.invoke(app, ["photon", "--config", str(config), "--out", str(out)])
    assert result.exit_code == 0
    frame = pd.read_csv(out, comment="#")
    assert list(frame.columns) == ["cutoff", "depth", "n_avg", "n_var"]
    assert len(frame) == 8


def test_fit_compare(tmp_path):
    depths = list(range(0, 31))
    curve = DecayCurve(depths=depths, values=[0.5 + 0.5 * 0.85 ** k for k in depths])
    data = tmp_path / "curve.csv"
    data.write_text(render_csv(curve.to_frame(), "decay"))
    report = tmp_path / "fit.json"
    result = runner.invoke(app, ["fit", str(data), "--json", str(report)])
    assert result.exit_code == 0
    payload = json.loads(report.read_text())
    assert payload["classification"] == "exponential"
    assert payload["exponential"]["params"]["p"] == pytest.approx(0.85, abs=1e-6)


def test_fit_single_model(tmp_path):
    depths = list(range(0, 20))
    curve = DecayCurve(depths=depths, values=[0.5 + 0.5 * 0.9 ** k for k in depths])
    data = tmp_path / "curve.csv"
    data.write_text(render_csv(curve.to_frame(), "decay"))
    report = tmp_path / "fit.json"
    result = runner.invoke(app, ["fit", str(data), "--model", "exp", "--json", str(report)])
    assert result.exit_code == 0
    assert json.loads(report.read_text())["model"] == "exp_offset"


def test_fit_errors(tmp_path):
    assert runner.invoke(app, ["fit", str(tmp_path / "absent.csv")]).exit_code == 4
    bad = tmp_path / "bad.csv"
    bad.write_text("depth,survival\n0,1\n")
    assert runner.invoke(app, ["fit", str(bad)]).exit_code == 4
    good = tmp_path / "good.csv"
    good.write_text("depth,value\n0,1\n1,0.9\n2,0.8\n")
    assert runner.invoke(app, ["fit", str(good), "--model", "quadratic"]).exit_code == 2


def test_fit_too_few_points_is_a_data_error(tmp_path):
    short = tmp_path / "short.csv"
    short.write_text("depth,value\n0,1\n1,0.9\n2,0.8\n")
    assert runner.invoke(app, ["fit", str(short)]).exit_code == 4
    assert runner.invoke(app, ["fit", str(short), "--model", "powexp"]).exit_code == 4


def test_verify_exit_codes(monkeypatch, tmp_path):
    monkeypatch.setattr(verify_module, "CHECKS", [verify_module.check_twirl_coefficients])
    out = tmp_path / "verify.csv"
    result = runner.invoke(app, ["verify", "--out", str(out)])
    assert result.exit_code == 0
    assert pd.read_csv(out, comment="#")["passed"].all()

    def failing():
        return verify_module.CheckResult("always fails", 1.0, "<= 0", False)

    monkeypatch.setattr(verify_module, "CHECKS", [failing])
    assert runner.invoke(app, ["verify"]).exit_code == 1
