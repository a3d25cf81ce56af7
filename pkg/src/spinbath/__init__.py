# spinbath - Randomized benchmarking in a persistent bosonic bath
# Main package initialization

"""
spinbath simulates randomized-benchmarking (RB) decays of qubits coupled
through sigma_z to a truncated multimode bosonic bath, with and without bath
memory, and fits the resulting curves.

Distribution Name: spinbath-rb
Import Namespace: spinbath

Quick Start:
    >>> import math
    >>> from spinbath import SpinBosonModel, thermal_env_state, rb_decay, compare_models
    >>>
    >>> model = SpinBosonModel.with_scalar_coupling(g=4.0, omega=10.0, cutoff=10, dt=0.1)
    >>> bath = thermal_env_state(model.env, math.inf)
    >>> curve = rb_decay(model, None, bath, range(0, 101), mode="nonmarkovian")
    >>> print(compare_models(curve).classification)
"""

__version__ = "1.0.0"

# -----------------------------------------------------------------------------
# Core utilities
# -----------------------------------------------------------------------------
from spinbath.core.config import settings, get_settings
from spinbath.core.logging import get_logger
from spinbath.core.models import DecayCurve, FitResult
from spinbath.core.schemas import ExperimentConfig

# -----------------------------------------------------------------------------
# Physics: truncated Fock space and the spin-boson model
# -----------------------------------------------------------------------------
from spinbath.physics import (
    EnvSpace,
    EnvState,
    ModeSpec,
    SpinBosonModel,
    thermal_state,
    thermal_env_state,
)

# -----------------------------------------------------------------------------
# Exactly-averaged channel and closed forms
# -----------------------------------------------------------------------------
from spinbath.channel import (
    rb_decay,
    markovian_fidelity_closed,
    xi_fidelity_closed,
    trajectory_sum_fidelity,
    photon_statistics,
)

# -----------------------------------------------------------------------------
# Sampled circuits and witnesses
# -----------------------------------------------------------------------------
from spinbath.montecarlo import (
    SimConfig,
    estimate_decay,
    witness_series,
    witness_histogram,
)

# -----------------------------------------------------------------------------
# Fitting and pipelines
# -----------------------------------------------------------------------------
from spinbath.evaluation import fit_exponential, fit_power_exponential, compare_models
from spinbath.pipelines import RBExperiment, run_verify

__all__ = [
    "__version__",
    "settings",
    "get_settings",
    "get_logger",
    "DecayCurve",
    "FitResult",
    "ExperimentConfig",
    "EnvSpace",
    "EnvState",
    "ModeSpec",
    "SpinBosonModel",
    "thermal_state",
    "thermal_env_state",
    "rb_decay",
    "markovian_fidelity_closed",
    "xi_fidelity_closed",
    "trajectory_sum_fidelity",
    "photon_statistics",
    "SimConfig",
    "estimate_decay",
    "witness_series",
    "witness_histogram",
    "fit_exponential",
    "fit_power_exponential",
    "compare_models",
    "RBExperiment",
    "run_verify",
]
