# Pipelines Module

"""
End-to-end experiment runners and the self-verification battery.
"""

from spinbath.pipelines.experiments import EXPERIMENT_PRESETS, RBExperiment, build_model
from spinbath.pipelines.verify import CheckResult, VerifyReport, run_verify

__all__ = [
    "EXPERIMENT_PRESETS",
    "RBExperiment",
    "build_model",
    "CheckResult",
    "VerifyReport",
    "run_verify",
]
