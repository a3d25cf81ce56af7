"""
Truncated bosonic Fock-space algebra.

Operators are dense complex matrices built directly on the truncated space
(project, then exponentiate). The position operator follows the ladder
convention x = a + a^dagger; zero-point offsets are dropped because they are
proportional to the identity and cancel in every traced quantity.

Mode 0 is the leftmost Kronecker factor of a multimode space.
"""

from dataclasses import dataclass
from functools import reduce
from typing import Callable, Literal, Sequence, Tuple, Union

import numpy as np
from scipy import linalg

from spinbath.core.exceptions import ValidationError

# Dense complex matrix over an EnvSpace
EnvOperator = np.ndarray

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-8
ROUNDOFF_EIG = 64 * np.finfo(float).eps


@dataclass(frozen=True)
class ModeSpec:
    """A single bosonic mode: angular frequency and occupation cutoff N."""
    omega: float
    cutoff: int

    def __post_init__(self):
        if self.omega < 0:
            raise ValidationError(f"mode frequency must be non-negative, got {self.omega}")
        if int(self.cutoff) != self.cutoff or self.cutoff < 1:
            raise ValidationError(f"occupation cutoff must be an integer >= 1, got {self.cutoff}")

    @property
    def dim(self) -> int:
        return self.cutoff + 1


@dataclass(frozen=True)
class EnvSpace:
    """Ordered collection of modes; dim is the product of per-mode dimensions."""
    modes: Tuple[ModeSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "modes", tuple(self.modes))
        if not self.modes:
            raise ValidationError("an environment needs at least one mode")

    @classmethod
    def single(cls, omega: float, cutoff: int) -> "EnvSpace":
        return cls((ModeSpec(omega, cutoff),))

    @property
    def dims(self) -> Tuple[int, ...]:
        return tuple(m.dim for m in self.modes)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    @property
    def n_modes(self) -> int:
        return len(self.modes)

    def identity(self) -> EnvOperator:
        return np.eye(self.dim, dtype=complex)

    def number_operator(self) -> EnvOperator:
        """Total occupation sum_i n_i over all modes."""
        return sum(
            tensor_embed(build_mode_ops(m.cutoff)[1], i, self)
            for i, m in enumerate(self.modes)
        )


@dataclass(frozen=True, eq=False)
class EnvState:
    """
    Density matrix of the environment.

    Validated on construction: Hermitian to 1e-12, eigenvalues >= -1e-10 and
    unit trace to 1e-12.
    """
    matrix: np.ndarray
    space: EnvSpace

    def __post_init__(self):
        rho = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", rho)
        if rho.shape != (self.space.dim, self.space.dim):
            raise ValidationError(
                f"state shape {rho.shape} does not match environment dimension {self.space.dim}"
            )
        if not np.allclose(rho, rho.conj().T, atol=1e-12, rtol=0):
            raise ValidationError("environment state is not Hermitian")
        if abs(np.trace(rho) - 1) > 1e-12:
            raise ValidationError(f"environment state has trace {np.trace(rho).real:.3e}, expected 1")
        if linalg.eigvalsh(rho).min() < -1e-10:
            raise ValidationError("environment state is not positive semidefinite")

    def expectation(self, op: EnvOperator) -> float:
        return float(np.real(np.trace(op @ self.matrix)))


def _check_square(op: np.ndarray, name: str = "operator") -> np.ndarray:
    op = np.asarray(op)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise ValidationError(f"{name} must be a square matrix, got shape {op.shape}")
    return op


def build_mode_ops(cutoff: int) -> Tuple[EnvOperator, EnvOperator, EnvOperator]:
    """
    Ladder operators on a single truncated mode.

    Args:
        cutoff: Maximum occupation N; the mode dimension is N + 1.

    Returns:
        (a, n, x) with a[k-1, k] = sqrt(k), n = a^dagger a and x = a + a^dagger.

    Example:
        >>> a, n, x = build_mode_ops(1)
        >>> x.real.tolist()
        [[0.0, 1.0], [1.0, 0.0]]
    """
    if int(cutoff) != cutoff or cutoff < 1:
        raise ValidationError(f"occupation cutoff must be an integer >= 1, got {cutoff}")
    a = np.diag(np.sqrt(np.arange(1, cutoff + 1)), k=1).astype(complex)
    n = a.conj().T @ a
    x = a + a.conj().T
    return a, n, x


def thermal_state(mode: ModeSpec, beta: float) -> EnvState:
    """
    Gibbs state of a single truncated mode, renormalised after truncation.

    ``beta = inf`` gives the vacuum |0><0|.
    """
    if not beta > 0:
        raise ValidationError(f"inverse temperature must be positive, got {beta}")
    space = EnvSpace((mode,))
    populations = np.zeros(mode.dim)
    if np.isinf(beta):
        populations[0] = 1.0
    else:
        if mode.omega == 0:
            raise ValidationError("a finite-temperature thermal state needs omega > 0")
        populations = np.exp(-beta * mode.omega * np.arange(mode.dim))
        populations /= populations.sum()
    return EnvState(np.diag(populations).astype(complex), space)


def thermal_env_state(space: EnvSpace, beta: float) -> EnvState:
    """Product of per-mode thermal states at a common inverse temperature."""
    factors = [thermal_state(m, beta).matrix for m in space.modes]
    rho = reduce(np.kron, factors)
    return EnvState(rho, space)


def tensor_embed(op: EnvOperator, mode_index: int, space: EnvSpace) -> EnvOperator:
    """Lift a single-mode operator onto ``space``, identity on every other mode."""
    op = _check_square(op)
    if not 0 <= mode_index < space.n_modes:
        raise ValidationError(f"mode index {mode_index} out of range for {space.n_modes} modes")
    if op.shape[0] != space.dims[mode_index]:
        raise ValidationError(
            f"operator dimension {op.shape[0]} does not match mode {mode_index} "
            f"dimension {space.dims[mode_index]}"
        )
    factors = [
        op if i == mode_index else np.eye(d, dtype=complex)
        for i, d in enumerate(space.dims)
    ]
    return reduce(np.kron, factors)


def herm_func(H: EnvOperator, f: Callable[[np.ndarray], np.ndarray]) -> EnvOperator:
    """
    Apply a scalar function to a Hermitian matrix through its eigendecomposition.

    Args:
        H: Hermitian matrix (checked to 1e-10).
        f: Vectorised scalar function applied to the eigenvalues.

    Returns:
        V f(Lambda) V^dagger.

    Raises:
        ValidationError: If H is not Hermitian.
    """
    H = _check_square(H)
    scale = max(1.0, float(np.abs(H).max(initial=0.0)))
    if np.abs(H - H.conj().T).max(initial=0.0) > HERMITIAN_TOL * scale:
        raise ValidationError("herm_func requires a Hermitian matrix")
    evals, evecs = linalg.eigh(H)
    fvals = np.asarray(f(evals))
    return (evecs * fvals) @ evecs.conj().T


def partial_trace(
    joint: np.ndarray,
    dims: Tuple[int, int],
    keep: Literal["system", "env"] = "system",
) -> np.ndarray:
    """
    Partial trace of an operator on system (x) env.

    Args:
        joint: Operator of shape (d_sys * d_env, d_sys * d_env).
        dims: (d_sys, d_env).
        keep: Which factor survives.
    """
    joint = _check_square(joint, "joint operator")
    d_sys, d_env = dims
    if joint.shape[0] != d_sys * d_env:
        raise ValidationError(
            f"joint dimension {joint.shape[0]} does not factor as {d_sys} x {d_env}"
        )
    blocks = joint.reshape(d_sys, d_env, d_sys, d_env)
    if keep == "system":
        return np.einsum("iaja->ij", blocks)
    if keep == "env":
        return np.einsum("iaib->ab", blocks)
    raise ValidationError(f"keep must be 'system' or 'env', got '{keep}'")


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """D(rho, sigma) = 1/2 sum |eigenvalues(rho - sigma)|."""
    rho, sigma = _check_square(rho), _check_square(sigma)
    if rho.shape != sigma.shape:
        raise ValidationError(f"shape mismatch: {rho.shape} vs {sigma.shape}")
    diff = rho - sigma
    return float(0.5 * np.abs(linalg.eigvalsh(0.5 * (diff + diff.conj().T))).sum())


def _psd_sqrt(rho: np.ndarray) -> np.ndarray:
    evals, evecs = linalg.eigh(0.5 * (rho + rho.conj().T))
    if evals.min() < -PSD_TOL:
        raise ValidationError(f"state has negative eigenvalue {evals.min():.3e}")
    evals = np.where(evals > ROUNDOFF_EIG * max(evals.max(), 0.0), evals, 0.0)
    return (evecs * np.sqrt(evals)) @ evecs.conj().T


def mixed_fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """
    Uhlmann fidelity (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.

    Evaluated as the squared nuclear norm of sqrt(rho) sqrt(sigma), which is
    symmetric in its arguments and stays accurate for rank-deficient states.
    """
    rho, sigma = _check_square(rho), _check_square(sigma)
    if rho.shape != sigma.shape:
        raise ValidationError(f"shape mismatch: {rho.shape} vs {sigma.shape}")
    value = float(linalg.svdvals(_psd_sqrt(rho) @ _psd_sqrt(sigma)).sum() ** 2)
    return min(max(value, 0.0), 1.0)


def pure_state(vector: Union[Sequence[complex], np.ndarray]) -> np.ndarray:
    """Density matrix |psi><psi| of a (normalised) state vector."""
    psi = np.asarray(vector, dtype=complex).ravel()
    norm = np.linalg.norm(psi)
    if norm == 0:
        raise ValidationError("cannot build a state from the zero vector")
    psi = psi / norm
    return np.outer(psi, psi.conj())


def as_matrix(state: Union[EnvState, np.ndarray]) -> np.ndarray:
    """Accept either an EnvState or a raw density matrix."""
    if isinstance(state, EnvState):
        return state.matrix
    return _check_square(np.asarray(state, dtype=complex), "density matrix")
