"""
RB Experiment Pipeline

Turns a validated ExperimentConfig into decay curves, witness histograms and
photon statistics, enforcing the method/mode compatibility matrix before any
computation starts.
"""

import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from spinbath.channel import (
    markovian_fidelity_closed,
    photon_statistics,
    rb_decay,
    trajectory_sum_fidelity,
    xi_fidelity_closed,
)
from spinbath.core.config import get_settings
from spinbath.core.exceptions import CompatibilityError, ConfigurationError, DepthLimitError
from spinbath.core.logging import get_logger
from spinbath.core.models import DecayCurve
from spinbath.core.schemas import ExperimentConfig, load_config
from spinbath.montecarlo import SimConfig, estimate_decay, positive_fraction, witness_histogram
from spinbath.physics import EnvSpace, EnvState, ModeSpec, SpinBosonModel, thermal_env_state

logger = get_logger(__name__)
settings = get_settings()

# Parameter set g = 4, omega = 10, t = 0.1 with a ground-state bath
_REFERENCE_BATH: Dict[str, Any] = {
    "n_qubits": 1,
    "modes": [{"omega": 10.0, "cutoff": 10}],
    "g": 4.0,
    "dt": 0.1,
    "beta": "inf",
}

EXPERIMENT_PRESETS: Dict[str, Dict[str, Any]] = {
    "reference_nonmarkovian": {
        **_REFERENCE_BATH,
        "depths": list(range(0, 101)),
        "mode": "nonmarkovian",
        "method": "averaged",
    },
    "reference_markovian": {
        **_REFERENCE_BATH,
        "depths": list(range(0, 101)),
        "mode": "markovian",
        "method": "averaged",
    },
    "reference_xi": {
        **_REFERENCE_BATH,
        "depths": list(range(0, 51)),
        "mode": "xi",
        "method": "closed",
        "gateset": "xi",
    },
    "reference_photon": {
        **_REFERENCE_BATH,
        "depths": list(range(0, 101)),
        "mode": "nonmarkovian",
        "method": "averaged",
        "cutoffs": [5, 10, 15],
    },
    "reference_witness": {
        **_REFERENCE_BATH,
        "depths": list(range(1, 31)),
        "mode": "nonmarkovian",
        "method": "montecarlo",
        "gateset": "clifford1q",
        "n_circuits": 1000,
    },
}


class RBExperiment:
    """
    High-level runner for one experiment configuration.

    Example:
        >>> experiment = RBExperiment.from_preset("reference_markovian")
        >>> curve = experiment.run_decay()
        >>> curve.values[0]
        1.0
    """

    def __init__(self, config: ExperimentConfig):
        self.config = config
        self._model: Optional[SpinBosonModel] = None
        self._env_state: Optional[EnvState] = None
        logger.info(
            f"Initialized RBExperiment: n={config.n_qubits}, modes={len(config.modes)}, "
            f"mode={config.mode}, method={config.method}"
        )

    @classmethod
    def from_config(cls, config_path: Union[str, Path]) -> "RBExperiment":
        """Create an experiment from a JSON (or YAML) configuration file."""
        return cls(ExperimentConfig.from_file(config_path))

    @classmethod
    def from_preset(cls, preset_name: str) -> "RBExperiment":
        """
        Create an experiment from a built-in preset.

        Raises:
            ConfigurationError: If preset_name is not recognized.
        """
        if preset_name not in EXPERIMENT_PRESETS:
            available = ", ".join(EXPERIMENT_PRESETS.keys())
            raise ConfigurationError(
                f"Unknown preset '{preset_name}'. Available presets: {available}"
            )
        return cls(load_config(EXPERIMENT_PRESETS[preset_name]))

    @classmethod
    def list_presets(cls) -> List[str]:
        return list(EXPERIMENT_PRESETS.keys())

    @property
    def model(self) -> SpinBosonModel:
        if self._model is None:
            self._model = build_model(self.config)
        return self._model

    @property
    def env_state(self) -> EnvState:
        if self._env_state is None:
            self._env_state = thermal_env_state(self.model.env, self.config.beta)
        return self._env_state

    def check_compatibility(self) -> None:
        """
        Validate the method/mode matrix.

        Raises:
            CompatibilityError: For unsupported combinations.
            DepthLimitError: When the trajectory sum would exceed its guard.
        """
        cfg = self.config
        if cfg.mode == "xi" and cfg.n_qubits != 1:
            raise CompatibilityError("the XI model is single-qubit only")
        if cfg.method == "montecarlo" and cfg.gateset in ("clifford1q", "xi") and cfg.n_qubits != 1:
            raise CompatibilityError(f"gateset '{cfg.gateset}' is single-qubit only; use 'haar'")
        if cfg.method == "closed":
            if cfg.n_qubits != 1:
                raise CompatibilityError("method 'closed' requires n_qubits = 1")
            if cfg.mode == "nonmarkovian":
                raise CompatibilityError(
                    "no closed form exists for the non-Markovian decay; use 'averaged' or 'trajectory'"
                )
        if cfg.method == "trajectory":
            if cfg.mode != "nonmarkovian":
                raise CompatibilityError("method 'trajectory' requires mode 'nonmarkovian'")
            bits = cfg.n_qubits * max(cfg.depths)
            if bits > settings.TRAJECTORY_MAX_BITS:
                raise DepthLimitError(
                    f"trajectory sum at n*k={bits} exceeds the limit {settings.TRAJECTORY_MAX_BITS}"
                )
        if cfg.method == "montecarlo" and (cfg.mode == "xi") != (cfg.gateset == "xi"):
            raise CompatibilityError("sampled XI runs need mode 'xi' together with gateset 'xi'")

    def run_decay(self) -> DecayCurve:
        """Decay curve for the configured method and mode, always starting at depth 0."""
        return self._decay_curve().with_depth_zero()

    def _decay_curve(self) -> DecayCurve:
        self.check_compatibility()
        cfg = self.config
        depths = np.asarray(cfg.depths, dtype=int)
        if cfg.method == "averaged":
            return rb_decay(self.model, None, self.env_state, depths, mode=cfg.mode)
        if cfg.method == "montecarlo":
            sim = SimConfig(
                samples=cfg.samples,
                depths=cfg.depths,
                seed=cfg.seed,
                markovian=cfg.mode == "markovian",
                gateset=cfg.gateset,
                workers=cfg.workers,
            )
            return estimate_decay(self.model, None, self.env_state, sim)
        if cfg.method == "closed":
            closed = markovian_fidelity_closed if cfg.mode == "markovian" else xi_fidelity_closed
            values = [closed(self.model, self.env_state, int(k)) for k in depths]
        else:
            values = [trajectory_sum_fidelity(self.model, self.env_state, int(k)) for k in depths]
        return DecayCurve(
            depths=depths,
            values=np.clip(values, 0.0, 1.0),
            dimension=self.model.d,
            label=f"{cfg.method}-{cfg.mode}",
        )

    def run_witness(self) -> Tuple[pd.DataFrame, pd.DataFrame]:
        """Per-circuit witness rows and the per-depth positive-increment fraction."""
        cfg = self.config
        if cfg.mode == "xi":
            raise CompatibilityError("the witness sweep needs mode 'nonmarkovian' or 'markovian'")
        frame = witness_histogram(
            self.model,
            self.env_state,
            n_circuits=cfg.n_circuits,
            depths=cfg.depths,
            gateset=cfg.gateset,
            seed=cfg.seed,
            markovian=cfg.mode == "markovian",
            workers=cfg.workers,
        )
        return frame, positive_fraction(frame)

    def run_photon(self) -> pd.DataFrame:
        """Mean and variance of the bath occupation, swept over the configured cutoffs."""
        cfg = self.config
        if cfg.mode != "nonmarkovian":
            raise CompatibilityError("photon statistics need mode 'nonmarkovian'")
        cutoffs = cfg.cutoffs or [cfg.modes[0].cutoff]
        frames = []
        for cutoff in cutoffs:
            swept = cfg.with_overrides(
                modes=[{"omega": m.omega, "cutoff": cutoff} for m in cfg.modes]
            )
            model = build_model(swept)
            env = thermal_env_state(model.env, swept.beta)
            stats = photon_statistics(model, env, swept.depths)
            frame = stats.to_frame()
            if "cutoff" not in frame.columns:
                frame.insert(0, "cutoff", cutoff)
            frames.append(frame)
            logger.info(f"Photon statistics at cutoff {cutoff}: final <n> = {stats.mean[-1]:.4f}")
        return pd.concat(frames, ignore_index=True)

    def __repr__(self) -> str:
        cfg = self.config
        beta = "inf" if math.isinf(cfg.beta) else cfg.beta
        return (
            f"RBExperiment(n_qubits={cfg.n_qubits}, modes={len(cfg.modes)}, "
            f"mode='{cfg.mode}', method='{cfg.method}', beta={beta})"
        )


def build_model(config: ExperimentConfig) -> SpinBosonModel:
    env = EnvSpace(tuple(ModeSpec(m.omega, m.cutoff) for m in config.modes))
    return SpinBosonModel(
        n_qubits=config.n_qubits,
        env=env,
        couplings=config.coupling_matrix(),
        dt=config.dt,
    )
