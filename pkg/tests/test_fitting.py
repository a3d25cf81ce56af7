"""
Simplex minimiser and decay-curve fits.
"""

import math

import numpy as np
import pytest

from spinbath.channel import rb_decay
from spinbath.core.exceptions import FitError, ValidationError
from spinbath.core.models import DecayCurve
from spinbath.evaluation import (
    NelderMeadOptions,
    compare_models,
    fit_exponential,
    fit_power_exponential,
    nelder_mead,
)
from spinbath.physics import thermal_env_state


def _exp_curve(A=0.5, p=0.8, B=0.5, depths=range(0, 21), **kwargs):
    k = np.asarray(list(depths), dtype=float)
    return DecayCurve(depths=k.astype(int), values=A * p ** k + B, **kwargs)


def _powexp_curve(A=0.4, alpha=0.7, beta=0.05, B=0.5, depths=range(1, 41)):
    k = np.asarray(list(depths), dtype=float)
    return DecayCurve(depths=k.astype(int), values=A * k ** (-alpha) * np.exp(-beta * k) + B)


# ============================================================================
# Nelder-Mead
# ============================================================================

def test_nelder_mead_parabola():
    res = nelder_mead(lambda x: (x[0] - 2.0) ** 2, [0.0])
    assert res.x[0] == pytest.approx(2.0, abs=1e-8)
    assert res.converged


def test_nelder_mead_rosenbrock():
    def rosen(x):
        return (1 - x[0]) ** 2 + 100 * (x[1] - x[0] ** 2) ** 2

    res = nelder_mead(rosen, [-1.2, 1.0])
    np.testing.assert_allclose(res.x, [1.0, 1.0], atol=1e-5)
    assert res.fun < 1e-10


def test_nelder_mead_bowl():
    target = np.array([0.3, -1.0, 2.5])
    res = nelder_mead(lambda x: float(np.sum((x - target) ** 2)), np.zeros(3))
    np.testing.assert_allclose(res.x, target, atol=1e-7)


def test_nelder_mead_trace_is_monotone():
    res = nelder_mead(lambda x: (x[0] - 1.0) ** 2 + (x[1] + 3.0) ** 4, [5.0, 5.0])
    assert len(res.trace) == res.n_iter + 1
    assert np.all(np.diff(res.trace) <= 0)
    assert res.trace[-1] == pytest.approx(res.fun)


def test_nelder_mead_respects_iteration_cap():
    res = nelder_mead(lambda x: float(np.sum(x ** 2)), [3.0, 4.0], NelderMeadOptions(max_iter=5))
    assert res.n_iter <= 5
    assert not res.converged


def test_nelder_mead_rejects_nan():
    with pytest.raises(FitError):
        nelder_mead(lambda x: float("nan"), [1.0])
    with pytest.raises(FitError):
        nelder_mead(lambda x: (x[0] - 2.0) ** 2 if x[0] < 0.5 else float("nan"), [0.0])


def test_nelder_mead_is_deterministic():
    f = lambda x: (x[0] - 0.1) ** 2 + 3 * (x[1] - 0.2) ** 2  # noqa: E731
    a, b = nelder_mead(f, [1.0, 1.0]), nelder_mead(f, [1.0, 1.0])
    np.testing.assert_array_equal(a.x, b.x)
    assert a.trace == b.trace


# ============================================================================
# Exponential fits
# ============================================================================

def test_exponential_recovery():
    fit = fit_exponential(_exp_curve())
    assert fit.model == "exp_offset"
    assert fit.offset == 0.5
    assert fit.offset_fixed
    assert fit.params["A"] == pytest.approx(0.5, abs=1e-6)
    assert fit.params["p"] == pytest.approx(0.8, abs=1e-6)
    assert fit.sse < 1e-12
    assert not fit.flags["degenerate"]
    np.testing.assert_allclose(fit.predict([0, 5]), [1.0, 0.5 + 0.5 * 0.8 ** 5], atol=1e-6)


def test_exponential_free_offset():
    fit = fit_exponential(_exp_curve(A=0.6, p=0.7, B=0.3, depths=range(0, 30)), offset=None)
    assert not fit.offset_fixed
    assert fit.offset == pytest.approx(0.3, abs=1e-3)
    assert fit.params["p"] == pytest.approx(0.7, abs=1e-3)


def test_exponential_order_invariance():
    curve = _exp_curve(A=0.45, p=0.9)
    perm = np.random.default_rng(0).permutation(len(curve))
    shuffled = DecayCurve(depths=curve.depths[perm], values=curve.values[perm])
    a, b = fit_exponential(curve), fit_exponential(shuffled)
    assert a.params == b.params
    assert a.sse == b.sse


def test_flat_curve_is_degenerate():
    curve = DecayCurve(depths=[0, 1, 2, 3, 4], values=[0.9] * 5)
    fit = fit_exponential(curve)
    assert fit.flags["degenerate"]
    assert fit.params["p"] == 1.0
    assert fit.params["A"] == pytest.approx(0.4)


def test_values_below_offset_use_nonlinear_start():
    curve = _exp_curve(A=0.5, p=-0.5, B=0.5, depths=range(0, 10))
    fit = fit_exponential(curve)
    assert fit.flags["nonlinear_fallback"]
    assert math.isfinite(fit.sse)


def test_weighted_fit_floors_zero_errors():
    curve = _exp_curve(stderr=np.r_[0.0, np.full(20, 0.01)])
    fit = fit_exponential(curve)
    assert fit.metadata["weighted"]
    assert fit.params["p"] == pytest.approx(0.8, abs=1e-6)


def test_exponential_validation():
    with pytest.raises(ValidationError):
        fit_exponential(DecayCurve(depths=[0, 1], values=[1.0, 0.8]))
    with pytest.raises(ValidationError):
        fit_exponential(_exp_curve(), offset="asymptote")


# ============================================================================
# Power-exponential fits
# ============================================================================

def test_power_exponential_recovery():
    fit = fit_power_exponential(_powexp_curve())
    assert fit.model == "powexp_offset"
    assert fit.params["A"] == pytest.approx(0.4, abs=1e-4)
    assert fit.params["alpha"] == pytest.approx(0.7, abs=1e-4)
    assert fit.params["beta"] == pytest.approx(0.05, abs=1e-4)
    assert not fit.flags["not_converged"]
    assert fit.metadata["alpha_starts"] == [0.1, 0.5, 1.0, 2.0]


def test_power_exponential_drops_depth_zero():
    curve = _powexp_curve(depths=range(1, 30))
    with_zero = DecayCurve(depths=np.r_[0, curve.depths], values=np.r_[1.0, curve.values])
    a, b = fit_power_exponential(curve), fit_power_exponential(with_zero)
    assert a.params == b.params
    assert b.metadata["n_points"] == 29


def test_power_exponential_needs_four_points():
    with pytest.raises(ValidationError):
        fit_power_exponential(_powexp_curve(depths=[1, 2, 3]))


def test_power_exponential_order_invariance():
    curve = _powexp_curve(depths=range(1, 31))
    order = np.random.default_rng(3).permutation(len(curve))
    shuffled = DecayCurve(depths=curve.depths[order], values=curve.values[order])
    a, b = fit_power_exponential(curve), fit_power_exponential(shuffled)
    for name in ("A", "alpha", "beta"):
        assert b.params[name] == pytest.approx(a.params[name], abs=1e-12)
    assert b.sse == pytest.approx(a.sse, abs=1e-15)


def test_power_exponential_keeps_beta_non_negative():
    k = np.arange(1, 61, dtype=float)
    rising_tail = DecayCurve(depths=k.astype(int), values=0.5 + 0.3 * k ** -0.5 * np.exp(0.005 * k))
    fit = fit_power_exponential(rising_tail)
    assert fit.params["beta"] >= 0.0
    assert fit.metadata["beta_min"] == 0.0


# ============================================================================
# Model comparison
# ============================================================================

def test_exponential_curve_classified_exponential():
    comparison = compare_models(_exp_curve(depths=range(0, 31)))
    assert comparison.classification == "exponential"
    assert comparison.threshold == 10.0


def test_power_curve_classified_non_exponential():
    comparison = compare_models(_powexp_curve())
    assert comparison.sse_ratio > 10.0
    assert comparison.classification == "non-exponential"
    payload = comparison.to_dict()
    assert payload["classification"] == "non-exponential"
    assert payload["power_exponential"]["model"] == "powexp_offset"


def test_markovian_engine_curve_is_exponential(reference_model, bath):
    curve = rb_decay(reference_model, None, bath(reference_model), list(range(0, 41)), mode="markovian")
    comparison = compare_models(curve)
    assert comparison.classification == "exponential"
    assert comparison.exponential.params["p"] == pytest.approx(
        (curve.values[1] - 0.5) / 0.5, abs=1e-6
    )


def test_threshold_override():
    comparison = compare_models(_powexp_curve(), threshold=1e30)
    assert comparison.classification == "exponential"


@pytest.fixture(scope="module")
def engine_curves(reference_model):
    env = thermal_env_state(reference_model.env, math.inf)
    depths = list(range(1, 101))
    return {
        mode: rb_decay(reference_model, None, env, depths, mode=mode)
        for mode in ("nonmarkovian", "markovian", "xi")
    }


def test_nonmarkovian_engine_curve_is_non_exponential(engine_curves):
    comparison = compare_models(engine_curves["nonmarkovian"])
    assert comparison.sse_ratio > 10.0
    assert comparison.classification == "non-exponential"


def test_markovian_engine_curve_ratio_near_one(engine_curves):
    comparison = compare_models(engine_curves["markovian"])
    assert comparison.sse_ratio < 2.0


def test_xi_engine_curve_is_exponential_compatible(engine_curves):
    comparison = compare_models(engine_curves["xi"])
    assert comparison.power_exponential.params["beta"] >= 0.0
    assert comparison.classification == "exponential"
