"""
Configuration module backed by pydantic-settings.

Process-level knobs (worker count, exponential-cost guards, log level) are read
from environment variables prefixed ``SPINBATH_`` and an optional ``.env`` file.
Per-experiment parameters live in :class:`spinbath.core.schemas.ExperimentConfig`.
"""

import os
from functools import lru_cache

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """
    Centralized application configuration.
    Reads from environment variables and .env file.
    """
    APP_NAME: str = "spinbath-rb"
    APP_VERSION: str = "1.0.0"
    DEBUG: bool = False
    LOG_LEVEL: str = "INFO"

    # Parallelism
    WORKERS: int = Field(default_factory=lambda: os.cpu_count() or 1, ge=1)

    # Guards for the exponential-cost oracles
    TRAJECTORY_MAX_BITS: int = 6  # n_qubits * depth
    PHOTON_BRUTEFORCE_MAX_DEPTH: int = 10
    XI_ENUMERATION_MAX_DEPTH: int = 14

    # Analysis thresholds
    WITNESS_THRESHOLD: float = 1e-10
    NONEXP_SSE_RATIO: float = 10.0

    model_config = SettingsConfigDict(
        env_prefix="SPINBATH_",
        env_file=".env",
        case_sensitive=True,
        extra="ignore",
    )


@lru_cache
def get_settings() -> Settings:
    return Settings()

# Module-level settings instance
settings = get_settings()
