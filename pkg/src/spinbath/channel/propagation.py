"""
Exactly-averaged layer propagation.

The averaged joint state after any number of twirled layers stays in
span{I/d, rho_s} on the system, so it is carried as two environment
operators: I/d (x) B_id + rho_s (x) B_rho. One layer costs a (p, q) double
sum over the 2^n evolution blocks, evaluated as a single contraction in fixed
label order.
"""

from dataclasses import dataclass
from typing import Iterator, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from spinbath.channel.closed_form import xi_fidelity_closed
from spinbath.channel.twirl import twirl_coeffs
from spinbath.core.exceptions import CompatibilityError, ValidationError
from spinbath.core.logging import get_logger
from spinbath.core.models import DecayCurve
from spinbath.physics.fock import EnvState, as_matrix, pure_state
from spinbath.physics.spin_boson import EvolutionBlocks, SpinBosonModel

logger = get_logger(__name__)

MODES = ("nonmarkovian", "markovian", "xi")
TRACE_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class AveragedState:
    """Averaged joint state I/d (x) B_id + rho_s (x) B_rho."""
    B_id: np.ndarray
    B_rho: np.ndarray
    d: int

    def __post_init__(self):
        B_id = np.asarray(self.B_id, dtype=complex)
        B_rho = np.asarray(self.B_rho, dtype=complex)
        object.__setattr__(self, "B_id", B_id)
        object.__setattr__(self, "B_rho", B_rho)
        if B_id.ndim != 2 or B_id.shape != B_rho.shape or B_id.shape[0] != B_id.shape[1]:
            raise ValidationError(
                f"environment operators must be square and equal in shape, "
                f"got {B_id.shape} and {B_rho.shape}"
            )
        if self.d < 2:
            raise ValidationError(f"system dimension must be >= 2, got {self.d}")

    @classmethod
    def initial(cls, rho_env: Union[EnvState, np.ndarray], d: int) -> "AveragedState":
        """Depth-0 state rho_s (x) rho_env."""
        rho = as_matrix(rho_env)
        return cls(B_id=np.zeros_like(rho), B_rho=rho.copy(), d=d)

    @property
    def env_dim(self) -> int:
        return self.B_id.shape[0]

    @property
    def env_state(self) -> np.ndarray:
        """Reduced environment state B_id + B_rho."""
        return self.B_id + self.B_rho

    @property
    def total_trace(self) -> float:
        return float(np.real(np.trace(self.B_id) + np.trace(self.B_rho)))


def _twirled_sum(weights: np.ndarray, E: np.ndarray, B: np.ndarray) -> np.ndarray:
    """sum_{p,q} weights[p, q] E_p B E_q^dagger."""
    left = E @ B
    return np.einsum("pq,pij,qkj->ik", weights, left, E.conj(), optimize=True)


def _layer_weights(d: int, n_labels: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    same = twirl_coeffs(True, d)
    diff = twirl_coeffs(False, d)
    eye = np.eye(n_labels, dtype=bool)
    c_id = np.where(eye, same.c_id, diff.c_id)
    c_keep = np.where(eye, same.c_keep, diff.c_keep)
    return c_id + c_keep, c_id, c_keep


def propagate_layer(state: AveragedState, blocks: EvolutionBlocks) -> AveragedState:
    """
    Apply one twirled gate plus one system-bath interaction step.

    Args:
        state: Averaged state before the layer.
        blocks: Evolution blocks E_p of the model, one per projector label.

    Returns:
        The averaged state after the layer.

    Raises:
        ValidationError: If the state and blocks disagree in dimension.
    """
    if len(blocks) != state.d:
        raise ValidationError(
            f"{len(blocks)} evolution blocks do not match system dimension {state.d}"
        )
    if blocks.env_dim != state.env_dim:
        raise ValidationError(
            f"evolution blocks act on dimension {blocks.env_dim}, state has {state.env_dim}"
        )
    w_total, w_id, w_keep = _layer_weights(state.d, len(blocks))
    E = blocks.operators
    B_id = _twirled_sum(w_total, E, state.B_id) + _twirled_sum(w_id, E, state.B_rho)
    B_rho = _twirled_sum(w_keep, E, state.B_rho)
    return AveragedState(B_id=B_id, B_rho=B_rho, d=state.d)


def refresh_env(state: AveragedState, rho_env: Union[EnvState, np.ndarray]) -> AveragedState:
    """Reset the bath to rho_env while keeping the weight on each system shape."""
    rho = as_matrix(rho_env)
    if rho.shape[0] != state.env_dim:
        raise ValidationError(
            f"environment state has dimension {rho.shape[0]}, expected {state.env_dim}"
        )
    return AveragedState(
        B_id=np.trace(state.B_id) * rho,
        B_rho=np.trace(state.B_rho) * rho,
        d=state.d,
    )


def rb_output(state: AveragedState, rho_s: np.ndarray) -> float:
    """
    Average survival tr(E[rho_sys] rho_s) = tr(B_id)/d + tr(B_rho) tr(rho_s^2).

    Raises:
        ValidationError: If rho_s is not a normalised pure state of dimension d.
    """
    rho_s = np.asarray(rho_s, dtype=complex)
    if rho_s.shape != (state.d, state.d):
        raise ValidationError(f"system state has shape {rho_s.shape}, expected ({state.d}, {state.d})")
    if abs(np.trace(rho_s) - 1) > TRACE_TOL:
        raise ValidationError(f"system state has trace {np.trace(rho_s).real:.3e}, expected 1")
    purity = np.real(np.trace(rho_s @ rho_s))
    if abs(purity - 1) > TRACE_TOL:
        raise ValidationError(f"system state must be pure, got purity {purity:.6f}")
    value = np.trace(state.B_id) / state.d + np.trace(state.B_rho) * purity
    return float(np.real(value))


def ground_state(d: int) -> np.ndarray:
    """Computational ground state |0...0><0...0|."""
    psi = np.zeros(d)
    psi[0] = 1.0
    return pure_state(psi)


def _check_depths(depths: Sequence[int]) -> np.ndarray:
    arr = np.asarray(depths)
    if arr.ndim != 1 or arr.size == 0:
        raise ValidationError("depths must be a non-empty one-dimensional sequence")
    if not np.all(np.equal(np.mod(arr, 1), 0)) or arr.min() < 0:
        raise ValidationError("depths must be non-negative integers")
    arr = arr.astype(int)
    if np.any(np.diff(arr) <= 0):
        raise ValidationError("depths must be strictly increasing")
    return arr


def propagate(
    model: SpinBosonModel,
    rho_env: Union[EnvState, np.ndarray],
    depths: Sequence[int],
    markovian: bool = False,
) -> Iterator[Tuple[int, AveragedState]]:
    """
    Yield (depth, averaged state) for every requested depth, in order.

    In Markovian mode the bath is refreshed after every layer.
    """
    depths = _check_depths(depths)
    rho = as_matrix(rho_env)
    blocks = model.blocks
    state = AveragedState.initial(rho, model.d)
    current = 0
    for k in depths:
        while current < k:
            state = propagate_layer(state, blocks)
            if markovian:
                state = refresh_env(state, rho)
            current += 1
            drift = abs(state.total_trace - 1.0)
            if drift > TRACE_TOL:
                logger.warning(f"Trace ledger drift {drift:.2e} at depth {current}")
        yield int(k), state


def rb_decay(
    model: SpinBosonModel,
    rho_s: Optional[np.ndarray],
    rho_env: Union[EnvState, np.ndarray],
    depths: Sequence[int],
    mode: str = "nonmarkovian",
) -> DecayCurve:
    """
    Exact averaged RB curve.

    Args:
        model: Spin-boson model.
        rho_s: Pure initial system state; None selects |0...0>. Ignored in
            ``xi`` mode, which starts from |+>.
        rho_env: Initial bath state.
        depths: Strictly increasing sequence depths.
        mode: ``nonmarkovian``, ``markovian`` or ``xi``.

    Returns:
        DecayCurve without standard errors.
    """
    if mode not in MODES:
        raise CompatibilityError(f"unknown mode '{mode}', expected one of {MODES}")
    depths = _check_depths(depths)
    logger.info(f"Averaged {mode} decay: n={model.n_qubits}, D={model.env.dim}, k_max={depths[-1]}")

    if mode == "xi":
        values = [xi_fidelity_closed(model, rho_env, int(k)) for k in depths]
    else:
        if rho_s is None:
            rho_s = ground_state(model.d)
        values = [
            rb_output(state, rho_s)
            for _, state in propagate(model, rho_env, depths, markovian=(mode == "markovian"))
        ]
    return DecayCurve(
        depths=depths,
        values=np.clip(values, 0.0, 1.0),
        dimension=model.d,
        label=f"averaged-{mode}",
    )


def avg_photon_efficient(
    model: SpinBosonModel,
    rho_env: Union[EnvState, np.ndarray],
    k: int,
) -> float:
    """Mean total bath occupation tr(N (B_id + B_rho)) after k averaged layers."""
    number = model.env.number_operator()
    (_, state), = propagate(model, rho_env, [k])
    return float(np.real(np.trace(number @ state.env_state)))


@dataclass(frozen=True)
class PhotonStatistics:
    depths: np.ndarray
    mean: np.ndarray
    variance: np.ndarray
    cutoff: Optional[int] = None

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame({"depth": self.depths, "n_avg": self.mean, "n_var": self.variance})
        if self.cutoff is not None:
            frame.insert(0, "cutoff", self.cutoff)
        return frame


def photon_statistics(
    model: SpinBosonModel,
    rho_env: Union[EnvState, np.ndarray],
    depths: Sequence[int],
) -> PhotonStatistics:
    """Mean and variance of the total bath occupation along one propagation pass."""
    number = model.env.number_operator()
    number_sq = number @ number
    depths = _check_depths(depths)
    mean, var = [], []
    for _, state in propagate(model, rho_env, depths):
        env = state.env_state
        n1 = float(np.real(np.trace(number @ env)))
        n2 = float(np.real(np.trace(number_sq @ env)))
        mean.append(n1)
        var.append(max(n2 - n1 * n1, 0.0))
    cutoff = model.env.modes[0].cutoff if model.env.n_modes == 1 else None
    return PhotonStatistics(depths=depths, mean=np.array(mean), variance=np.array(var), cutoff=cutoff)
