"""
Block-diagonal spin-boson model.

The qubits couple to the bath through sigma_z, so the joint Hamiltonian splits
into one bath Hamiltonian H_p per computational basis pattern p:

    H_p = sum_i omega_i n_i + sum_i (sum_j g_ij (-1)^{p_j}) x_i

System-only terms are omitted; they can be absorbed into the applied gates.
"""

from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Dict, Iterator, List, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import block_diag

from spinbath.core.exceptions import CompatibilityError, ValidationError
from spinbath.core.logging import get_logger
from spinbath.physics.fock import (
    EnvOperator,
    EnvSpace,
    ModeSpec,
    build_mode_ops,
    herm_func,
    tensor_embed,
)

logger = get_logger(__name__)

ProjectorLabel = Tuple[int, ...]


def projector_labels(n_qubits: int) -> List[ProjectorLabel]:
    """All bit strings of length n in lexicographic (computational-index) order."""
    return [tuple(bits) for bits in product((0, 1), repeat=n_qubits)]


def weight(p: Sequence[int]) -> int:
    """w(p) = sum_j (-1)^{p_j}."""
    return int(sum(1 - 2 * int(bit) for bit in p))


@dataclass(frozen=True, eq=False)
class SpinBosonModel:
    """
    n qubits coupled to a truncated multimode bath for one interaction step.

    Attributes:
        n_qubits: Number of qubits n (system dimension d = 2^n).
        env: Truncated bath space with m modes.
        couplings: Real matrix g[i][j] of shape (m, n), mode i and qubit j.
        dt: Duration t of one system-bath interaction.
    """
    n_qubits: int
    env: EnvSpace
    couplings: np.ndarray
    dt: float

    def __post_init__(self):
        g = np.asarray(self.couplings)
        if np.iscomplexobj(g):
            if np.abs(g.imag).max(initial=0.0) > 0:
                raise ValidationError("couplings must be real")
            g = g.real
        g = np.array(g, dtype=float)
        object.__setattr__(self, "couplings", g)

        if self.n_qubits < 1:
            raise ValidationError(f"n_qubits must be >= 1, got {self.n_qubits}")
        if g.shape != (self.env.n_modes, self.n_qubits):
            raise ValidationError(
                f"coupling matrix has shape {g.shape}, expected "
                f"({self.env.n_modes}, {self.n_qubits}) for modes x qubits"
            )
        if not self.dt > 0:
            raise ValidationError(f"step duration must be positive, got {self.dt}")

    @classmethod
    def with_scalar_coupling(
        cls,
        g: float,
        omega: Union[float, Sequence[float]],
        cutoff: Union[int, Sequence[int]],
        dt: float,
        n_qubits: int = 1,
    ) -> "SpinBosonModel":
        """
        Build a model where every qubit couples to every mode with the same g.

        Example:
            >>> model = SpinBosonModel.with_scalar_coupling(g=4.0, omega=10.0, cutoff=10, dt=0.1)
            >>> model.d
            2
        """
        omegas = np.atleast_1d(omega).astype(float)
        cutoffs = np.atleast_1d(cutoff).astype(int)
        if omegas.shape != cutoffs.shape:
            omegas, cutoffs = np.broadcast_arrays(omegas, cutoffs)
        env = EnvSpace(tuple(ModeSpec(float(w), int(c)) for w, c in zip(omegas, cutoffs)))
        couplings = np.full((env.n_modes, n_qubits), float(g))
        return cls(n_qubits=n_qubits, env=env, couplings=couplings, dt=dt)

    @property
    def d(self) -> int:
        return 2 ** self.n_qubits

    @property
    def labels(self) -> List[ProjectorLabel]:
        return projector_labels(self.n_qubits)

    @cached_property
    def mode_operators(self) -> List[Tuple[EnvOperator, EnvOperator]]:
        """Embedded (n_i, x_i) for every mode."""
        ops = []
        for i, mode in enumerate(self.env.modes):
            _, n, x = build_mode_ops(mode.cutoff)
            ops.append((tensor_embed(n, i, self.env), tensor_embed(x, i, self.env)))
        return ops

    @cached_property
    def free_hamiltonian(self) -> EnvOperator:
        return sum(
            mode.omega * n for mode, (n, _) in zip(self.env.modes, self.mode_operators)
        )

    @cached_property
    def blocks(self) -> "EvolutionBlocks":
        """Evolution blocks, computed once and shared by every consumer."""
        return evolution_blocks(self)


@dataclass(frozen=True, eq=False)
class EvolutionBlocks:
    """E_p = exp(-i H_p t) for every projector label, stacked in label order."""
    labels: Tuple[ProjectorLabel, ...]
    operators: np.ndarray  # shape (2^n, D, D)

    def __getitem__(self, p: Sequence[int]) -> EnvOperator:
        return self.operators[self.labels.index(tuple(p))]

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self) -> Iterator[ProjectorLabel]:
        return iter(self.labels)

    def as_dict(self) -> Dict[ProjectorLabel, EnvOperator]:
        return dict(zip(self.labels, self.operators))

    @property
    def env_dim(self) -> int:
        return self.operators.shape[-1]


def _check_label(model: SpinBosonModel, p: Sequence[int]) -> ProjectorLabel:
    p = tuple(int(b) for b in p)
    if len(p) != model.n_qubits or any(b not in (0, 1) for b in p):
        raise ValidationError(f"projector label {p} is not a bit string of length {model.n_qubits}")
    return p


def displacement_weights(model: SpinBosonModel, p: Sequence[int]) -> np.ndarray:
    """Per-mode coupling sum_j g_ij (-1)^{p_j}."""
    signs = np.array([1 - 2 * b for b in _check_label(model, p)], dtype=float)
    return model.couplings @ signs


def block_hamiltonian(model: SpinBosonModel, p: Sequence[int]) -> EnvOperator:
    """Bath Hamiltonian H_p attached to the computational pattern p."""
    weights = displacement_weights(model, p)
    H = model.free_hamiltonian.copy()
    for w, (_, x) in zip(weights, model.mode_operators):
        H = H + w * x
    return H


def evolution_blocks(model: SpinBosonModel) -> EvolutionBlocks:
    """Diagonalise every H_p once and exponentiate over one step."""
    labels = tuple(model.labels)
    ops = np.stack([
        herm_func(block_hamiltonian(model, p), lambda ev: np.exp(-1j * model.dt * ev))
        for p in labels
    ])
    logger.debug(f"Built {len(labels)} evolution blocks of dimension {model.env.dim}")
    return EvolutionBlocks(labels=labels, operators=ops)


def joint_step_unitary(model: SpinBosonModel) -> np.ndarray:
    """sum_p |p><p| (x) E_p on system (x) env."""
    return block_diag(*model.blocks.operators)


def joint_hamiltonian(model: SpinBosonModel) -> np.ndarray:
    """
    Full H = I (x) sum_i omega_i n_i + sum_ij g_ij Z_j (x) x_i on system (x) env.

    Built without the block decomposition; used to cross-check joint_step_unitary.
    """
    d = model.d
    H = np.kron(np.eye(d), model.free_hamiltonian)
    z = np.diag([1.0, -1.0])
    for j in range(model.n_qubits):
        factors = [z if q == j else np.eye(2) for q in range(model.n_qubits)]
        zj = factors[0]
        for f in factors[1:]:
            zj = np.kron(zj, f)
        for i, (_, x) in enumerate(model.mode_operators):
            H = H + model.couplings[i, j] * np.kron(zj, x)
    return H


def coupling_difference(model: SpinBosonModel) -> EnvOperator:
    """H_0 - H_1 = 2 sum_i g_i x_i for a single qubit."""
    if model.n_qubits != 1:
        raise CompatibilityError(
            "closed-form expressions are only available for a single qubit, "
            f"got n_qubits={model.n_qubits}"
        )
    return block_hamiltonian(model, (0,)) - block_hamiltonian(model, (1,))


def delta_cos_op(model: SpinBosonModel) -> EnvOperator:
    """cos((H_0 - H_1) t) = cos(2 g x t) for a single qubit."""
    return herm_func(coupling_difference(model), lambda ev: np.cos(model.dt * ev))
