"""
Closed forms and exponential-cost enumeration oracles for single-layer
averaged RB.

None of the functions here use the regrouped propagation engine, so they
serve as independent references for it.
"""

from typing import Union

import numpy as np

from spinbath.channel.twirl import trajectory_weight
from spinbath.core.config import settings
from spinbath.core.exceptions import CompatibilityError, DepthLimitError, ValidationError
from spinbath.core.logging import get_logger
from spinbath.physics.fock import EnvState, as_matrix, herm_func
from spinbath.physics.spin_boson import SpinBosonModel, coupling_difference, delta_cos_op

logger = get_logger(__name__)


def _check_depth(k: int) -> int:
    if int(k) != k or k < 0:
        raise ValidationError(f"depth must be a non-negative integer, got {k}")
    return int(k)


def _require_single_qubit(model: SpinBosonModel) -> None:
    if model.n_qubits != 1:
        raise CompatibilityError(
            f"closed forms are single-qubit only, got n_qubits={model.n_qubits}"
        )


def markovian_rate(
    model: SpinBosonModel,
    rho_env: Union[EnvState, np.ndarray],
    exact: bool = False,
) -> float:
    """
    Per-layer decay rate of the Markovian (refreshed-bath) model.

    The default is (1 + 2 tr(cos(2 g x t) rho_env)) / 3, which assumes the two
    block Hamiltonians commute. ``exact=True`` uses the overlap of the actual
    evolution blocks, (1 + 2 Re tr(E_1^dagger E_0 rho_env)) / 3; the two agree
    at omega = 0.
    """
    _require_single_qubit(model)
    rho = as_matrix(rho_env)
    if exact:
        E0, E1 = model.blocks.operators
        overlap = np.real(np.trace(E1.conj().T @ E0 @ rho))
    else:
        overlap = np.real(np.trace(delta_cos_op(model) @ rho))
    return float((1.0 + 2.0 * overlap) / 3.0)


def markovian_fidelity_closed(
    model: SpinBosonModel,
    rho_env: Union[EnvState, np.ndarray],
    k: int,
    exact: bool = False,
) -> float:
    """1/2 + 1/2 lambda^k with lambda from markovian_rate."""
    k = _check_depth(k)
    return 0.5 + 0.5 * markovian_rate(model, rho_env, exact=exact) ** k


def xi_fidelity_closed(
    model: SpinBosonModel,
    rho_env: Union[EnvState, np.ndarray],
    k: int,
) -> float:
    """
    Survival of |+> under uniformly random X/I layers.

    1/2 + 1/2 tr(C^k rho_env) with C = cos((H_0 - H_1) t) taken as a matrix
    power.
    """
    _require_single_qubit(model)
    k = _check_depth(k)
    rho = as_matrix(rho_env)
    power = herm_func(coupling_difference(model), lambda ev: np.cos(model.dt * ev) ** k)
    return float(0.5 + 0.5 * np.real(np.trace(power @ rho)))


def trajectory_operators(model: SpinBosonModel, k: int) -> np.ndarray:
    """
    H(x) = E_{x_k} ... E_{x_1} for every label string x of length k.

    Strings are ordered with the first layer as the most significant digit.
    Shape (d^k, D, D).
    """
    E = model.blocks.operators
    D = E.shape[-1]
    strings = np.eye(D, dtype=complex)[None]
    for _ in range(k):
        strings = np.einsum("xij,ojk->oxik", E, strings).reshape(-1, D, D)
    return strings


def _layer_digits(n_labels: int, k: int) -> np.ndarray:
    if k == 0:
        return np.zeros((1, 0), dtype=int)
    return np.array(np.unravel_index(np.arange(n_labels ** k), (n_labels,) * k)).T


def trajectory_sum_fidelity(
    model: SpinBosonModel,
    rho_env: Union[EnvState, np.ndarray],
    k: int,
) -> float:
    """
    Average survival from the explicit sum over trajectory pairs (p, q).

    1/d + sum_{p,q} w(h(p, q)) tr(H(p) rho_env H^dagger(q)), with the weight
    from trajectory_weight. Costs d^(2k) traces.

    Raises:
        DepthLimitError: If n * k exceeds TRAJECTORY_MAX_BITS.
    """
    k = _check_depth(k)
    bits = model.n_qubits * k
    if bits > settings.TRAJECTORY_MAX_BITS:
        raise DepthLimitError(
            f"trajectory sum needs 2^{2 * bits} terms; n*k={bits} exceeds the limit "
            f"{settings.TRAJECTORY_MAX_BITS} (SPINBATH_TRAJECTORY_MAX_BITS)"
        )
    rho = as_matrix(rho_env)
    d = model.d
    H = trajectory_operators(model, k)
    overlaps = np.einsum("pij,qij->pq", H @ rho, H.conj())
    digits = _layer_digits(d, k)
    hamming = (digits[:, None, :] != digits[None, :, :]).sum(axis=-1)
    total = np.sum(trajectory_weight(hamming, k, d) * overlaps)
    logger.debug(f"Trajectory sum over {len(H) ** 2} pairs at depth {k}")
    return float(1.0 / d + np.real(total))


def avg_photon_bruteforce(
    model: SpinBosonModel,
    rho_env: Union[EnvState, np.ndarray],
    k: int,
) -> float:
    """
    Mean bath occupation from diagonal trajectories only:
    sum_p d^-k tr(N H(p) rho_env H^dagger(p)).

    Raises:
        DepthLimitError: If n * k exceeds PHOTON_BRUTEFORCE_MAX_DEPTH.
    """
    k = _check_depth(k)
    if model.n_qubits * k > settings.PHOTON_BRUTEFORCE_MAX_DEPTH:
        raise DepthLimitError(
            f"brute-force photon average at n*k={model.n_qubits * k} exceeds the limit "
            f"{settings.PHOTON_BRUTEFORCE_MAX_DEPTH} (SPINBATH_PHOTON_BRUTEFORCE_MAX_DEPTH)"
        )
    rho = as_matrix(rho_env)
    number = model.env.number_operator()
    H = trajectory_operators(model, k)
    evolved = H @ rho @ H.conj().transpose(0, 2, 1)
    values = np.einsum("ij,pji->p", number, evolved)
    return float(np.real(values.mean()))
