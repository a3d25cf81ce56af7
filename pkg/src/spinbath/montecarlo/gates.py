"""
Gate sets for sampled RB sequences.

``haar`` works for any system dimension; ``clifford1q`` (uniform over the
24-element single-qubit Clifford group) and ``xi`` (uniform over {X, I})
are single-qubit only.
"""

from collections import deque
from dataclasses import dataclass
from functools import lru_cache, reduce
from typing import List, Tuple

import numpy as np
from scipy.stats import unitary_group

from spinbath.core.exceptions import CompatibilityError, ValidationError
from spinbath.core.logging import get_logger

logger = get_logger(__name__)

GATESETS = ("haar", "clifford1q", "xi")
CLIFFORD_1Q_ORDER = 24
UNITARY_TOL = 1e-10

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
PHASE_S = np.array([[1, 0], [0, 1j]], dtype=complex)


@dataclass(frozen=True, eq=False)
class GateSequence:
    """
    Gates U_1..U_k of one RB circuit plus the global inverse.

    Attributes:
        gates: Array of shape (k, d, d), U_1 first.
        d: System dimension.
    """
    gates: np.ndarray
    d: int

    def __post_init__(self):
        gates = np.asarray(self.gates, dtype=complex).reshape(-1, self.d, self.d)
        object.__setattr__(self, "gates", gates)

    def __len__(self) -> int:
        return len(self.gates)

    @property
    def product(self) -> np.ndarray:
        """U_k ... U_1."""
        return reduce(lambda acc, u: u @ acc, self.gates, np.eye(self.d, dtype=complex))

    @property
    def inverse(self) -> np.ndarray:
        """(U_k ... U_1)^{-1}."""
        return self.product.conj().T

    def prefix(self, k: int) -> "GateSequence":
        return GateSequence(self.gates[:k], self.d)


def _canonical_key(u: np.ndarray) -> bytes:
    """Hashable key identifying a unitary up to global phase."""
    flat = np.asarray(u, dtype=complex).ravel()
    pivot = flat[np.argmax(np.abs(flat) > 1e-9)]
    normed = flat * (abs(pivot) / pivot)
    # + 0.0 clears negative zeros
    parts = np.stack([np.round(normed.real, 8) + 0.0, np.round(normed.imag, 8) + 0.0])
    return parts.tobytes()


@lru_cache(maxsize=1)
def _clifford_1q_cached() -> Tuple[np.ndarray, ...]:
    identity = np.eye(2, dtype=complex)
    found = {_canonical_key(identity): identity}
    queue = deque([identity])
    while queue:
        u = queue.popleft()
        for gen in (HADAMARD, PHASE_S):
            v = gen @ u
            key = _canonical_key(v)
            if key not in found:
                found[key] = v
                queue.append(v)
    if len(found) != CLIFFORD_1Q_ORDER:
        raise RuntimeError(
            f"Clifford generation produced {len(found)} elements, expected {CLIFFORD_1Q_ORDER}"
        )
    logger.debug(f"Generated single-qubit Clifford table with {len(found)} elements")
    return tuple(found.values())


def clifford_1q_table() -> List[np.ndarray]:
    """
    The single-qubit Clifford group generated from H and S, one
    representative per global-phase class.
    """
    return [u.copy() for u in _clifford_1q_cached()]


def clifford_index(u: np.ndarray) -> int:
    """Position of ``u`` in clifford_1q_table (up to global phase)."""
    key = _canonical_key(np.asarray(u, dtype=complex))
    for i, c in enumerate(_clifford_1q_cached()):
        if _canonical_key(c) == key:
            return i
    raise ValidationError("matrix is not a single-qubit Clifford")


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """
    Haar-random d x d unitary.

    Ginibre matrix, QR decomposition and phase correction of R's diagonal,
    as implemented by scipy's unitary_group.
    """
    if d < 2:
        raise ValidationError(f"unitary dimension must be >= 2, got {d}")
    return np.asarray(unitary_group.rvs(d, random_state=rng), dtype=complex)


def xi_gates() -> Tuple[np.ndarray, np.ndarray]:
    return np.eye(2, dtype=complex), PAULI_X.copy()


def check_gateset(gateset: str, d: int) -> None:
    if gateset not in GATESETS:
        raise CompatibilityError(f"unknown gateset '{gateset}', expected one of {GATESETS}")
    if gateset in ("clifford1q", "xi") and d != 2:
        raise CompatibilityError(f"gateset '{gateset}' is single-qubit only, got d={d}")


def sample_sequence(gateset: str, d: int, k: int, rng: np.random.Generator) -> GateSequence:
    """Draw k independent gates from ``gateset``."""
    check_gateset(gateset, d)
    if k < 0:
        raise ValidationError(f"sequence depth must be non-negative, got {k}")
    if gateset == "haar":
        gates = [haar_unitary(d, rng) for _ in range(k)]
    elif gateset == "clifford1q":
        table = _clifford_1q_cached()
        gates = [table[i] for i in rng.integers(CLIFFORD_1Q_ORDER, size=k)]
    else:
        pool = xi_gates()
        gates = [pool[i] for i in rng.integers(2, size=k)]
    return GateSequence(np.array(gates).reshape(k, d, d), d)
