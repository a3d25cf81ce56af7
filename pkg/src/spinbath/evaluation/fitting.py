"""
Decay-curve fitting.

Two model families, both with an additive offset B (default: the asymptote
1/d of the curve):

    exp_offset      A * p**k + B
    powexp_offset   A * k**(-alpha) * exp(-beta * k) + B

The simplex minimiser is scipy's Nelder-Mead, wrapped so that every run is
deterministic given x0, stops on simplex diameter alone, and records the
best objective value after each iteration.
"""

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Union

import numpy as np
from scipy.optimize import OptimizeResult, minimize

from spinbath.core.config import settings
from spinbath.core.exceptions import FitError, ValidationError
from spinbath.core.logging import get_logger
from spinbath.core.models import DecayCurve, FitResult

logger = get_logger(__name__)

OffsetSpec = Union[float, str, None]

EXP_FORM = "A * p**k + B"
POWEXP_FORM = "A * k**(-alpha) * exp(-beta * k) + B"
ALPHA_STARTS = (0.1, 0.5, 1.0, 2.0)
SSE_FLOOR = 1e-20
FLAT_TOL = 1e-12


@dataclass
class NelderMeadOptions:
    max_iter: int = 10000
    tol: float = 1e-10


@dataclass
class NelderMeadResult:
    x: np.ndarray
    fun: float
    n_iter: int
    converged: bool
    message: str = ""
    trace: List[float] = field(default_factory=list)


def nelder_mead(
    objective: Callable[[np.ndarray], float],
    x0: Sequence[float],
    options: Optional[NelderMeadOptions] = None,
) -> NelderMeadResult:
    """
    Derivative-free minimisation with the reflect/expand/contract/shrink
    simplex.

    Args:
        objective: Scalar function of a parameter vector.
        x0: Starting point; the initial simplex is derived from it.
        options: Iteration cap and simplex-diameter tolerance.

    Returns:
        NelderMeadResult with the best vertex and the per-iteration trace of
        best objective values.

    Raises:
        FitError: If the objective is not finite at x0 or returns NaN.

    Example:
        >>> res = nelder_mead(lambda x: (x[0] - 2.0) ** 2, [0.0])
        >>> round(float(res.x[0]), 6)
        2.0
    """
    options = options or NelderMeadOptions()
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    f0 = objective(x0)
    if not np.isfinite(f0):
        raise FitError(f"objective is not finite at the starting point {x0.tolist()}: {f0}")

    def guarded(x: np.ndarray) -> float:
        value = objective(x)
        if np.isnan(value):
            raise FitError(f"objective returned NaN at {np.asarray(x).tolist()}")
        return value

    trace: List[float] = [float(f0)]

    def record(intermediate_result: OptimizeResult) -> None:
        trace.append(float(intermediate_result.fun))

    res = minimize(
        guarded,
        x0,
        method="Nelder-Mead",
        callback=record,
        options={"maxiter": options.max_iter, "xatol": options.tol, "fatol": np.inf},
    )
    return NelderMeadResult(
        x=np.asarray(res.x, dtype=float),
        fun=float(res.fun),
        n_iter=int(res.nit),
        converged=bool(res.success),
        message=str(res.message),
        trace=trace,
    )


def _prepare(curve: DecayCurve):
    order = np.argsort(curve.depths, kind="stable")
    k = curve.depths[order].astype(float)
    y = curve.values[order]
    weights = None
    if curve.stderr is not None:
        sigma = curve.stderr[order].astype(float)
        positive = sigma[sigma > 0]
        if positive.size:
            sigma = np.where(sigma > 0, sigma, positive.min())
            weights = 1.0 / sigma ** 2
    return k, y, weights


def _resolve_offset(curve: DecayCurve, offset: OffsetSpec) -> Optional[float]:
    if offset == "auto":
        return curve.asymptote
    if offset is None:
        return None
    if isinstance(offset, str):
        raise ValidationError(f"offset must be a number, 'auto' or None, got '{offset}'")
    return float(offset)


def _sse(residual: np.ndarray, weights: Optional[np.ndarray]) -> float:
    if weights is None:
        return float(np.sum(residual ** 2))
    return float(np.sum(weights * residual ** 2))


def _exp_model(k, A, p, B):
    return A * np.power(p, k) + B


def _powexp_model(k, A, alpha, beta, B):
    return A * np.power(k, -alpha) * np.exp(-beta * k) + B


def _safe_objective(model, k, y, weights, fixed_offset):
    def objective(theta: np.ndarray) -> float:
        if fixed_offset is None:
            *params, B = theta
        else:
            params, B = theta, fixed_offset
        with np.errstate(all="ignore"):
            value = _sse(model(k, *params, B) - y, weights)
        return value if np.isfinite(value) else np.inf
    return objective


def fit_exponential(
    curve: DecayCurve,
    offset: OffsetSpec = "auto",
    options: Optional[NelderMeadOptions] = None,
) -> FitResult:
    """
    Fit A * p**k + B by least squares.

    With a fixed offset the starting estimate comes from a linear regression
    of log(values - B) on k, then the linear-space residual is polished with
    the simplex. If any value sits at or below the offset the log step is
    skipped and the fit is flagged ``nonlinear_fallback``. A flat curve
    returns p = 1 flagged ``degenerate``. ``offset=None`` fits B as well.

    Args:
        curve: Decay curve with at least 3 points.
        offset: ``"auto"`` (1/d), a number, or None for a free offset.
        options: Simplex options.
    """
    if len(curve) < 3:
        raise ValidationError(f"exponential fit needs at least 3 points, got {len(curve)}")
    k, y, weights = _prepare(curve)
    B = _resolve_offset(curve, offset)
    flags = {"degenerate": False, "nonlinear_fallback": False}
    metadata = {"form": EXP_FORM, "n_points": int(len(k)), "weighted": weights is not None}

    if np.ptp(y) < FLAT_TOL:
        B_used = B if B is not None else curve.asymptote
        flags["degenerate"] = True
        logger.warning("Flat decay curve; returning p = 1")
        return FitResult(
            model="exp_offset",
            params={"A": float(y[0] - B_used), "p": 1.0},
            offset=float(B_used),
            offset_fixed=B is not None,
            sse=0.0,
            converged=True,
            flags=flags,
            metadata=metadata,
        )

    guess_B = B if B is not None else curve.asymptote
    shifted = y - guess_B
    if np.all(shifted > 0):
        w_log = None if weights is None else shifted * np.sqrt(weights)
        slope, intercept = np.polyfit(k, np.log(shifted), 1, w=w_log)
        A0, p0 = float(np.exp(intercept)), float(np.exp(slope))
    else:
        if B is not None:
            flags["nonlinear_fallback"] = True
            logger.info("Values at or below the offset; using a nonlinear exponential fit")
        A0, p0 = float(y[0] - guess_B), 0.9

    objective = _safe_objective(_exp_model, k, y, weights, B)
    x0 = [A0, p0] if B is not None else [A0, p0, guess_B]
    start_sse = objective(np.asarray(x0))
    result = nelder_mead(objective, x0, options)
    if result.fun <= start_sse:
        theta, sse, converged = result.x, result.fun, result.converged
    else:
        theta, sse, converged = np.asarray(x0), start_sse, True

    return FitResult(
        model="exp_offset",
        params={"A": float(theta[0]), "p": float(theta[1])},
        offset=float(B if B is not None else theta[2]),
        offset_fixed=B is not None,
        sse=float(sse),
        converged=converged,
        flags=flags,
        metadata=metadata,
    )


def fit_power_exponential(
    curve: DecayCurve,
    offset: OffsetSpec = "auto",
    options: Optional[NelderMeadOptions] = None,
) -> FitResult:
    """
    Fit A * k**(-alpha) * exp(-beta * k) + B with a fixed multi-start grid.

    Depths below 1 are dropped. Starts use alpha in (0.1, 0.5, 1, 2) and beta
    from the exponential fit's rate; the winner is the lowest SSE, ties broken
    by the parameter tuple. beta is held non-negative.
    """
    mask = curve.depths >= 1
    if not np.all(mask):
        logger.info(f"Dropping {int((~mask).sum())} point(s) with depth < 1 from the power fit")
        curve = curve.subset(mask)
    if len(curve) < 4:
        raise ValidationError(f"power-exponential fit needs at least 4 points with k >= 1, got {len(curve)}")

    k, y, weights = _prepare(curve)
    B = _resolve_offset(curve, offset)
    guess_B = B if B is not None else curve.asymptote

    exp_fit = fit_exponential(curve, offset=offset, options=options)
    p = exp_fit.params["p"]
    beta0 = float(-np.log(p)) if 0 < p < 1 else 0.01
    powexp_sse = _safe_objective(_powexp_model, k, y, weights, B)

    def objective(theta: np.ndarray) -> float:
        # beta >= 0
        return np.inf if theta[2] < 0 else powexp_sse(theta)

    candidates = []
    for alpha0 in ALPHA_STARTS:
        A0 = float((y[0] - guess_B) * k[0] ** alpha0 * np.exp(beta0 * k[0]))
        x0 = [A0, alpha0, beta0] if B is not None else [A0, alpha0, beta0, guess_B]
        result = nelder_mead(objective, x0, options)
        candidates.append(result)
        logger.debug(f"powexp start alpha={alpha0}: sse={result.fun:.3e} converged={result.converged}")

    best = min(candidates, key=lambda r: (r.fun, tuple(r.x)))
    if not best.converged:
        logger.warning("Power-exponential fit did not converge; returning the best candidate")
    return FitResult(
        model="powexp_offset",
        params={"A": float(best.x[0]), "alpha": float(best.x[1]), "beta": float(best.x[2])},
        offset=float(B if B is not None else best.x[3]),
        offset_fixed=B is not None,
        sse=float(best.fun),
        converged=best.converged,
        flags={"not_converged": not best.converged},
        metadata={
            "form": POWEXP_FORM,
            "n_points": int(len(k)),
            "weighted": weights is not None,
            "alpha_starts": list(ALPHA_STARTS),
            "beta_start": beta0,
            "beta_min": 0.0,
        },
    )


@dataclass
class ModelComparison:
    exponential: FitResult
    power_exponential: FitResult
    sse_ratio: float
    threshold: float

    @property
    def classification(self) -> str:
        return "non-exponential" if self.sse_ratio > self.threshold else "exponential"

    def to_dict(self) -> dict:
        return {
            "classification": self.classification,
            "sse_ratio": self.sse_ratio,
            "threshold": self.threshold,
            "exponential": self.exponential.to_dict(),
            "power_exponential": self.power_exponential.to_dict(),
        }


def compare_models(
    curve: DecayCurve,
    threshold: Optional[float] = None,
    options: Optional[NelderMeadOptions] = None,
) -> ModelComparison:
    """
    Fit both families with the offset fixed at 1/d and compare residuals.

    Depth 0 is excluded from both fits. SSEs are floored at 1e-20 before the
    ratio sse(exp) / sse(powexp) is taken, so two machine-precision fits
    classify as exponential.
    """
    threshold = settings.NONEXP_SSE_RATIO if threshold is None else float(threshold)
    curve = curve.subset(curve.depths >= 1)
    exp_fit = fit_exponential(curve, offset="auto", options=options)
    pow_fit = fit_power_exponential(curve, offset="auto", options=options)
    ratio = max(exp_fit.sse, SSE_FLOOR) / max(pow_fit.sse, SSE_FLOOR)
    comparison = ModelComparison(exp_fit, pow_fit, float(ratio), threshold)
    logger.info(f"Model comparison: sse ratio {ratio:.3g} -> {comparison.classification}")
    return comparison
