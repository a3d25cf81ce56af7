"""
Experiment runner, compatibility matrix and the verification battery.
"""

import json

import numpy as np
import pytest

from spinbath.channel import TwirlCoeffs, markovian_fidelity_closed, rb_decay
from spinbath.core.exceptions import CompatibilityError, ConfigurationError, DepthLimitError
from spinbath.core.schemas import load_config
from spinbath.pipelines import EXPERIMENT_PRESETS, RBExperiment, run_verify
from spinbath.pipelines import verify as verify_module


def _experiment(**overrides):
    data = {
        "modes": [{"omega": 10.0, "cutoff": 8}],
        "g": 4.0,
        "dt": 0.1,
        "beta": "inf",
        "depths": [0, 1, 2, 3],
    }
    data.update(overrides)
    return RBExperiment(load_config(data))


# ============================================================================
# Presets
# ============================================================================

def test_presets_listed():
    names = RBExperiment.list_presets()
    assert set(names) == {
        "reference_nonmarkovian", "reference_markovian", "reference_xi", "reference_photon", "reference_witness",
    }
    for name in names:
        experiment = RBExperiment.from_preset(name)
        experiment.check_compatibility()
        assert experiment.config.coupling_matrix().tolist() == [[4.0]]


def test_unknown_preset():
    with pytest.raises(ConfigurationError):
        RBExperiment.from_preset("reference_thermal")


def test_from_config_file(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps(EXPERIMENT_PRESETS["reference_markovian"]))
    experiment = RBExperiment.from_config(path)
    assert experiment.config.mode == "markovian"
    assert "mode='markovian'" in repr(experiment)
    assert "beta=inf" in repr(experiment)


# ============================================================================
# Compatibility matrix
# ============================================================================

@pytest.mark.parametrize(
    "overrides",
    [
        {"method": "closed", "mode": "nonmarkovian"},
        {"method": "closed", "mode": "markovian", "n_qubits": 2},
        {"mode": "xi", "n_qubits": 2},
        {"method": "trajectory", "mode": "markovian"},
        {"method": "montecarlo", "mode": "xi", "gateset": "clifford1q"},
        {"method": "montecarlo", "mode": "nonmarkovian", "gateset": "xi"},
        {"method": "montecarlo", "n_qubits": 2, "gateset": "clifford1q"},
    ],
)
def test_incompatible_combinations(overrides):
    with pytest.raises(CompatibilityError):
        _experiment(**overrides).run_decay()


def test_trajectory_depth_guard():
    with pytest.raises(DepthLimitError):
        _experiment(method="trajectory", depths=[0, 7]).check_compatibility()
    with pytest.raises(DepthLimitError):
        _experiment(method="trajectory", n_qubits=2, depths=[4]).check_compatibility()


def test_multiqubit_averaged_accepts_default_gateset():
    curve = _experiment(n_qubits=2, modes=[{"omega": 10.0, "cutoff": 4}]).run_decay()
    assert curve.dimension == 4
    assert curve.values[0] == pytest.approx(1.0)


# ============================================================================
# Runs
# ============================================================================

def test_trajectory_method_matches_averaged():
    traj = _experiment(method="trajectory", depths=[0, 1, 2, 3, 4]).run_decay()
    avg = _experiment(depths=[0, 1, 2, 3, 4]).run_decay()
    np.testing.assert_allclose(traj.values, avg.values, atol=1e-9)
    assert traj.label == "trajectory-nonmarkovian"


def test_closed_markovian_run():
    experiment = _experiment(method="closed", mode="markovian")
    curve = experiment.run_decay()
    expected = [markovian_fidelity_closed(experiment.model, experiment.env_state, k) for k in range(4)]
    np.testing.assert_allclose(curve.values, expected, atol=1e-14)


def test_averaged_run_matches_engine():
    experiment = _experiment(mode="markovian", depths=[0, 5, 10])
    curve = experiment.run_decay()
    direct = rb_decay(experiment.model, None, experiment.env_state, [0, 5, 10], mode="markovian")
    np.testing.assert_array_equal(curve.values, direct.values)


def test_montecarlo_run_is_seeded():
    a = _experiment(method="montecarlo", samples=4, seed=9, workers=1).run_decay()
    b = _experiment(method="montecarlo", samples=4, seed=9, workers=2).run_decay()
    np.testing.assert_array_equal(a.values, b.values)
    assert a.stderr is not None


def test_montecarlo_xi_run():
    curve = _experiment(method="montecarlo", mode="xi", gateset="xi", samples=4).run_decay()
    assert curve.values[0] == pytest.approx(1.0)


@pytest.mark.parametrize("method", ["averaged", "closed", "montecarlo"])
def test_decay_prepends_depth_zero(method):
    mode = "markovian" if method == "closed" else "nonmarkovian"
    curve = _experiment(method=method, mode=mode, depths=[1, 2, 3], samples=3).run_decay()
    assert curve.depths.tolist() == [0, 1, 2, 3]
    assert curve.values[0] == 1.0
    if method == "montecarlo":
        assert curve.stderr[0] == 0.0
    else:
        assert curve.stderr is None


def test_witness_run():
    frame, summary = _experiment(depths=[1, 2, 3], n_circuits=3).run_witness()
    assert len(frame) == 9
    assert list(summary.columns) == ["depth", "positive_fraction"]
    with pytest.raises(CompatibilityError):
        _experiment(mode="xi").run_witness()


def test_photon_sweep():
    frame = _experiment(cutoffs=[3, 4], depths=[0, 1, 2]).run_photon()
    assert list(frame.columns) == ["cutoff", "depth", "n_avg", "n_var"]
    assert frame["cutoff"].tolist() == [3, 3, 3, 4, 4, 4]
    assert frame.loc[frame["depth"] == 0, "n_avg"].abs().max() < 1e-12
    with pytest.raises(CompatibilityError):
        _experiment(mode="markovian").run_photon()


def test_photon_plateau_grows_with_cutoff():
    frame = _experiment(
        modes=[{"omega": 10.0, "cutoff": 10}],
        cutoffs=[5, 10, 15],
        depths=list(range(50, 101)),
    ).run_photon()
    plateau = frame.groupby("cutoff")["n_avg"].mean()
    assert plateau.index.tolist() == [5, 10, 15]
    assert plateau[5] < plateau[10] < plateau[15]
    assert abs(plateau[10] - 4.5) / 4.5 <= 0.15


# ============================================================================
# Verification battery
# ============================================================================

FAST_CHECKS = [
    verify_module.check_twirl_coefficients,
    verify_module.check_clifford_two_design,
    verify_module.check_trajectory_oracle,
    verify_module.check_markovian_rate,
    verify_module.check_xi_commuting,
    verify_module.check_photon_oracle,
    verify_module.check_fuchs_van_de_graaff,
]


def test_fast_checks_pass():
    report = run_verify(FAST_CHECKS)
    assert report.passed, report.failures
    assert len(report.to_frame()) == len(FAST_CHECKS)


def test_verify_is_deterministic():
    first = run_verify(FAST_CHECKS).to_frame()
    second = run_verify(FAST_CHECKS).to_frame()
    assert first.equals(second)


def test_verify_catches_sign_error(monkeypatch):
    """A sign flip in the twirl coefficients must fail the trajectory check."""
    original = verify_module.twirl_coeffs

    def flipped(delta, d):
        c = original(delta, d)
        return TwirlCoeffs(c_id=-c.c_id, c_keep=c.c_keep)

    monkeypatch.setattr("spinbath.channel.propagation.twirl_coeffs", flipped)
    result = verify_module.check_trajectory_oracle()
    assert not result.passed


def test_raising_check_counts_as_failure():
    def broken():
        raise RuntimeError("boom")

    report = run_verify([broken])
    assert not report.passed
    assert report.failures == ["broken"]


@pytest.mark.slow
def test_full_battery_passes():
    report = run_verify()
    assert report.passed, report.failures


@pytest.mark.parametrize("suffix", ["yaml", "json"])
def test_shipped_configs_load(project_root, suffix):
    paths = sorted((project_root / "configs" / "experiments").glob(f"*.{suffix}"))
    assert len(paths) == 6
    for path in paths:
        experiment = RBExperiment.from_config(path)
        experiment.check_compatibility()


def test_json_configs_mirror_yaml(project_root):
    for path in sorted((project_root / "configs" / "experiments").glob("*.json")):
        twin = path.with_suffix(".yaml")
        assert twin.exists(), twin.name
        assert load_config(path.read_text()) == RBExperiment.from_config(twin).config
