"""
Sampled-circuit simulation of the joint system-bath state.

The joint state is held as a tensor of shape (d, D, d, D); the interaction
step acts blockwise, J[p, :, q, :] -> E_p J[p, :, q, :] E_q^dagger, so the
full d*D unitary is never formed.
"""

from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from spinbath.core.config import settings
from spinbath.core.exceptions import DepthLimitError, ValidationError
from spinbath.core.logging import get_logger
from spinbath.core.models import DecayCurve
from spinbath.montecarlo.gates import GATESETS, GateSequence, check_gateset, sample_sequence
from spinbath.physics.fock import EnvState, as_matrix, pure_state
from spinbath.physics.spin_boson import SpinBosonModel
from spinbath.utils.parallel import parallel_map
from spinbath.utils.reproducibility import make_stream

logger = get_logger(__name__)


@dataclass
class SimConfig:
    """Sampling parameters for estimate_decay."""
    samples: int
    depths: Sequence[int]
    seed: int = 0
    markovian: bool = False
    gateset: str = "clifford1q"
    workers: Optional[int] = None

    def __post_init__(self):
        self.depths = [int(k) for k in self.depths]
        if self.samples < 1:
            raise ValidationError(f"samples must be >= 1, got {self.samples}")
        if not self.depths:
            raise ValidationError("depths must be non-empty")
        if any(k < 0 for k in self.depths) or any(
            b <= a for a, b in zip(self.depths, self.depths[1:])
        ):
            raise ValidationError("depths must be non-negative and strictly increasing")
        if self.gateset not in GATESETS:
            raise ValidationError(f"unknown gateset '{self.gateset}', expected one of {GATESETS}")


def _as_joint(rho_s: np.ndarray, rho_env: np.ndarray) -> np.ndarray:
    d, D = rho_s.shape[0], rho_env.shape[0]
    return np.kron(rho_s, rho_env).reshape(d, D, d, D)


def _apply_gate(joint: np.ndarray, U: np.ndarray) -> np.ndarray:
    return np.einsum("ij,jakb,lk->ialb", U, joint, U.conj(), optimize=True)


def _apply_step(joint: np.ndarray, E: np.ndarray) -> np.ndarray:
    return np.einsum("pac,pcqe,qbe->paqb", E, joint, E.conj(), optimize=True)


def system_state(joint: np.ndarray) -> np.ndarray:
    return np.einsum("iaja->ij", joint)


def env_state(joint: np.ndarray) -> np.ndarray:
    return np.einsum("iaib->ab", joint)


def _check_inputs(model: SpinBosonModel, rho_s: np.ndarray, rho_env: np.ndarray, seq: GateSequence):
    if rho_s.shape != (model.d, model.d):
        raise ValidationError(f"system state has shape {rho_s.shape}, expected ({model.d}, {model.d})")
    if rho_env.shape != (model.env.dim, model.env.dim):
        raise ValidationError(
            f"environment state has shape {rho_env.shape}, expected dimension {model.env.dim}"
        )
    if seq.d != model.d:
        raise ValidationError(f"gate dimension {seq.d} does not match system dimension {model.d}")


def evolve_layers(
    model: SpinBosonModel,
    rho_s: np.ndarray,
    rho_env: Union[EnvState, np.ndarray],
    seq: GateSequence,
    markovian: bool = False,
) -> Iterator[np.ndarray]:
    """
    Yield the joint state (d, D, d, D) before any layer and after each
    gate-plus-step layer of ``seq``; no inverse is applied.

    In Markovian mode the bath is replaced by rho_env after every step.
    """
    rho_s = np.asarray(rho_s, dtype=complex)
    rho_env = as_matrix(rho_env)
    _check_inputs(model, rho_s, rho_env, seq)
    E = model.blocks.operators
    joint = _as_joint(rho_s, rho_env)
    yield joint
    for U in seq.gates:
        joint = _apply_step(_apply_gate(joint, U), E)
        if markovian:
            joint = _as_joint(system_state(joint), rho_env)
        yield joint


def simulate_sequence(
    model: SpinBosonModel,
    rho_s: np.ndarray,
    rho_env: Union[EnvState, np.ndarray],
    seq: GateSequence,
    markovian: bool = False,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Run one RB circuit: U_1, step, ..., U_k, step, then the global inverse.

    Args:
        model: Spin-boson model.
        rho_s: Initial system state (mixed states are accepted).
        rho_env: Initial bath state.
        seq: Gate sequence.
        markovian: Replace the bath by rho_env after every step.

    Returns:
        (final system state, final bath state).
    """
    joint = None
    for joint in evolve_layers(model, rho_s, rho_env, seq, markovian=markovian):
        pass
    joint = _apply_gate(joint, seq.inverse)
    return system_state(joint), env_state(joint)


def survival(rho_final: np.ndarray, rho_s: np.ndarray) -> float:
    return float(np.real(np.trace(rho_final @ rho_s)))


def default_initial_state(gateset: str, d: int) -> np.ndarray:
    """|+> for the XI gateset, |0...0> otherwise."""
    if gateset == "xi":
        return pure_state([1.0, 1.0])
    psi = np.zeros(d)
    psi[0] = 1.0
    return pure_state(psi)


def estimate_decay(
    model: SpinBosonModel,
    rho_s: Optional[np.ndarray],
    rho_env: Union[EnvState, np.ndarray],
    cfg: SimConfig,
) -> DecayCurve:
    """
    Mean survival and standard error of the mean per depth.

    Sample j at depth index i draws its gates from the stream
    (cfg.seed, i, j), so the curve does not depend on the worker count.
    """
    check_gateset(cfg.gateset, model.d)
    if rho_s is None:
        rho_s = default_initial_state(cfg.gateset, model.d)
    rho_env = as_matrix(rho_env)
    _ = model.blocks  # build once before threads share the model

    jobs = [(i, j) for i in range(len(cfg.depths)) for j in range(cfg.samples)]
    logger.info(
        f"Sampling {len(jobs)} circuits ({cfg.gateset}, "
        f"{'markovian' if cfg.markovian else 'nonmarkovian'}) over {len(cfg.depths)} depths"
    )

    def run(job: Tuple[int, int]) -> float:
        i, j = job
        rng = make_stream(cfg.seed, i, j)
        seq = sample_sequence(cfg.gateset, model.d, cfg.depths[i], rng)
        rho_final, _ = simulate_sequence(model, rho_s, rho_env, seq, markovian=cfg.markovian)
        return survival(rho_final, rho_s)

    values = np.array(parallel_map(run, jobs, workers=cfg.workers)).reshape(
        len(cfg.depths), cfg.samples
    )
    means = values.mean(axis=1)
    if cfg.samples > 1:
        stderr = values.std(axis=1, ddof=1) / np.sqrt(cfg.samples)
    else:
        stderr = np.zeros(len(cfg.depths))
    mode = "markovian" if cfg.markovian else "nonmarkovian"
    return DecayCurve(
        depths=cfg.depths,
        values=np.clip(means, 0.0, 1.0),
        stderr=stderr,
        dimension=model.d,
        label=f"montecarlo-{mode}-{cfg.gateset}",
    )


def xi_phase_factor(u: Sequence[int]) -> int:
    """f(u) = sum_j (-1)^(u_1 + ... + u_j) for an X/I pattern u (1 marks X)."""
    parity = np.cumsum(np.asarray(u, dtype=int) % 2) % 2
    return int(np.sum(1 - 2 * parity))


def xi_exact_average(
    model: SpinBosonModel,
    rho_env: Union[EnvState, np.ndarray],
    k: int,
) -> float:
    """
    Exact survival of |+> averaged uniformly over all 2^k X/I strings.

    Enumerates every string depth-first on the 2 x 2 block form
    R[a][b] = <a| rho_joint |b>; X swaps (a, b) -> (1-a, 1-b) and the step
    maps R[a][b] -> E_a R[a][b] E_b^dagger. X|+> = |+>, so the inverse leaves
    the survival 1/2 sum_ab tr R[a][b] unchanged.

    Raises:
        DepthLimitError: If k exceeds XI_ENUMERATION_MAX_DEPTH.
    """
    if model.n_qubits != 1:
        raise ValidationError("the XI model is single-qubit only")
    if int(k) != k or k < 0:
        raise ValidationError(f"depth must be a non-negative integer, got {k}")
    if k > settings.XI_ENUMERATION_MAX_DEPTH:
        raise DepthLimitError(
            f"XI enumeration of 2^{k} strings exceeds the limit "
            f"{settings.XI_ENUMERATION_MAX_DEPTH} (SPINBATH_XI_ENUMERATION_MAX_DEPTH)"
        )
    rho = as_matrix(rho_env)
    E = model.blocks.operators
    start = np.broadcast_to(rho / 2.0, (2, 2) + rho.shape).copy()

    def step(R: np.ndarray) -> np.ndarray:
        return np.einsum("aij,abjk,blk->abil", E, R, E.conj(), optimize=True)

    total = 0.0
    stack: List[Tuple[np.ndarray, int]] = [(start, 0)]
    while stack:
        R, depth = stack.pop()
        if depth == k:
            total += 0.5 * float(np.real(np.einsum("abii->", R)))
            continue
        stack.append((step(R[::-1, ::-1]), depth + 1))
        stack.append((step(R), depth + 1))
    return total / 2 ** k
