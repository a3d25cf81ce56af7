"""
Non-Markovianity witnesses: trace-distance backflow and mixed-state fidelity
between the evolutions of |0...0> and |0...01> under a shared circuit.
"""

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from spinbath.core.config import settings
from spinbath.core.exceptions import ValidationError
from spinbath.core.logging import get_logger
from spinbath.montecarlo.gates import GateSequence, check_gateset, sample_sequence
from spinbath.montecarlo.simulation import evolve_layers, system_state
from spinbath.physics.fock import EnvState, as_matrix, mixed_fidelity, pure_state, trace_distance
from spinbath.physics.spin_boson import SpinBosonModel
from spinbath.utils.parallel import parallel_map
from spinbath.utils.reproducibility import make_stream

logger = get_logger(__name__)


@dataclass(frozen=True, eq=False)
class WitnessSeries:
    """Trace distance D_k after each layer and its increments."""
    depths: np.ndarray
    D: np.ndarray

    @property
    def deltaD(self) -> np.ndarray:
        """D_k - D_{k-1} for k >= 1."""
        return np.diff(self.D)

    def backflow_steps(self, threshold: Optional[float] = None) -> np.ndarray:
        """Depths at which D increased by more than ``threshold``."""
        threshold = settings.WITNESS_THRESHOLD if threshold is None else threshold
        return self.depths[1:][self.deltaD > threshold]


def orthogonal_inputs(d: int) -> Tuple[np.ndarray, np.ndarray]:
    """|0> and |1> of the computational basis (last qubit flipped)."""
    zero, one = np.zeros(d), np.zeros(d)
    zero[0], one[1] = 1.0, 1.0
    return pure_state(zero), pure_state(one)


def _paired_system_states(model, rho_env, seq, markovian):
    rho0, rho1 = orthogonal_inputs(model.d)
    for j0, j1 in zip(
        evolve_layers(model, rho0, rho_env, seq, markovian=markovian),
        evolve_layers(model, rho1, rho_env, seq, markovian=markovian),
    ):
        yield system_state(j0), system_state(j1)


def witness_series(
    model: SpinBosonModel,
    rho_env: Union[EnvState, np.ndarray],
    seq: GateSequence,
    markovian: bool = False,
) -> WitnessSeries:
    """
    Trace distance between the two evolutions after every layer.

    Gates and steps only; no inverse. D_0 = 1.
    """
    distances = [
        trace_distance(s0, s1)
        for s0, s1 in _paired_system_states(model, rho_env, seq, markovian)
    ]
    return WitnessSeries(depths=np.arange(len(seq) + 1), D=np.clip(distances, 0.0, 1.0))


def mixed_fidelity_series(
    model: SpinBosonModel,
    rho_env: Union[EnvState, np.ndarray],
    seq: GateSequence,
    markovian: bool = False,
) -> np.ndarray:
    """Uhlmann fidelity F_k between the two evolutions, F_0 = 0."""
    return np.array([
        mixed_fidelity(s0, s1)
        for s0, s1 in _paired_system_states(model, rho_env, seq, markovian)
    ])


def fuchs_van_de_graaff_violation(F: np.ndarray, D: np.ndarray) -> float:
    """
    Largest violation of 1 - sqrt(F) <= D <= sqrt(1 - F) along a series;
    zero or negative means both bounds hold.
    """
    F, D = np.asarray(F, dtype=float), np.asarray(D, dtype=float)
    if F.shape != D.shape:
        raise ValidationError(f"series lengths differ: {F.shape} vs {D.shape}")
    lower = (1.0 - np.sqrt(F)) - D
    upper = D - np.sqrt(np.clip(1.0 - F, 0.0, None))
    return float(max(lower.max(initial=-np.inf), upper.max(initial=-np.inf)))


def witness_histogram(
    model: SpinBosonModel,
    rho_env: Union[EnvState, np.ndarray],
    n_circuits: int,
    depths: Sequence[int],
    gateset: str = "clifford1q",
    seed: int = 0,
    markovian: bool = False,
    workers: Optional[int] = None,
) -> pd.DataFrame:
    """
    Per-step increments Delta D over many random circuits.

    Circuit c draws its gates from the stream (seed, c) and is run to
    max(depths); rows are kept for the requested depths >= 1.

    Returns:
        Long-format frame with columns circuit_id, depth, D, deltaD.
    """
    if n_circuits < 1:
        raise ValidationError(f"n_circuits must be >= 1, got {n_circuits}")
    keep = np.unique(np.asarray(depths, dtype=int))
    if keep.size == 0 or keep.min() < 0:
        raise ValidationError("depths must be non-empty and non-negative")
    keep = keep[keep >= 1]
    k_max = int(keep.max()) if keep.size else 0
    check_gateset(gateset, model.d)
    rho_env = as_matrix(rho_env)
    _ = model.blocks
    logger.info(f"Witness sweep: {n_circuits} circuits to depth {k_max} ({gateset})")

    def run(c: int) -> pd.DataFrame:
        seq = sample_sequence(gateset, model.d, k_max, make_stream(seed, c))
        series = witness_series(model, rho_env, seq, markovian=markovian)
        return pd.DataFrame({
            "circuit_id": c,
            "depth": keep,
            "D": series.D[keep],
            "deltaD": series.deltaD[keep - 1],
        })

    frames = parallel_map(run, range(n_circuits), workers=workers)
    if not frames or not keep.size:
        return pd.DataFrame(columns=["circuit_id", "depth", "D", "deltaD"])
    return pd.concat(frames, ignore_index=True)


def positive_fraction(frame: pd.DataFrame, threshold: Optional[float] = None) -> pd.DataFrame:
    """Fraction of circuits with deltaD > threshold at each depth."""
    threshold = settings.WITNESS_THRESHOLD if threshold is None else threshold
    flagged = frame.assign(positive=frame["deltaD"] > threshold)
    summary = flagged.groupby("depth", sort=True)["positive"].mean()
    return summary.rename("positive_fraction").reset_index()
