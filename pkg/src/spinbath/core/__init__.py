# spinbath core module

"""
Core utilities including configuration management, exception hierarchy,
structured logging and the shared result containers.
"""

from spinbath.core.config import settings, get_settings
from spinbath.core.logging import get_logger
from spinbath.core.exceptions import SpinBathError
from spinbath.core.models import DecayCurve, FitResult
from spinbath.core.schemas import ExperimentConfig, load_config

__all__ = [
    "settings",
    "get_settings",
    "get_logger",
    "SpinBathError",
    "DecayCurve",
    "FitResult",
    "ExperimentConfig",
    "load_config",
]
