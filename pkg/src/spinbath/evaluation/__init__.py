# Evaluation Module

"""
Decay-curve fitting and model comparison.
"""

from spinbath.evaluation.fitting import (
    NelderMeadOptions,
    NelderMeadResult,
    nelder_mead,
    fit_exponential,
    fit_power_exponential,
    ModelComparison,
    compare_models,
)

__all__ = [
    "NelderMeadOptions",
    "NelderMeadResult",
    "nelder_mead",
    "fit_exponential",
    "fit_power_exponential",
    "ModelComparison",
    "compare_models",
]
