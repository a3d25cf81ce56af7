"""
Twirl coefficients for a single averaged layer.

Averaging P_p U M U^dagger P_q over a unitary 2-design collapses any system
operator M onto span{I/d, M}:

    c_id(delta) tr(M) I/d + c_keep(delta) M,   delta = [p == q]
"""

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from spinbath.core.exceptions import ValidationError


@dataclass(frozen=True)
class TwirlCoeffs:
    c_id: float
    c_keep: float

    @property
    def total(self) -> float:
        """c_id + c_keep, the trace carried by a unit-trace input."""
        return self.c_id + self.c_keep


def twirl_coeffs(delta: bool, d: int) -> TwirlCoeffs:
    """
    Coefficients of the twirled projector pair (P_p, P_q).

    Args:
        delta: Whether the two projector labels coincide.
        d: System dimension.

    Returns:
        c_id = (d delta - 1)/(d^2 - 1), c_keep = (1 - delta/d)/(d^2 - 1).

    Example:
        >>> twirl_coeffs(True, 2)
        TwirlCoeffs(c_id=0.3333333333333333, c_keep=0.16666666666666666)
    """
    if d < 2:
        raise ValidationError(f"system dimension must be >= 2, got {d}")
    dl = 1.0 if delta else 0.0
    norm = d * d - 1.0
    return TwirlCoeffs(c_id=(d * dl - 1.0) / norm, c_keep=(1.0 - dl / d) / norm)


def haar_twirl_reference(A: np.ndarray, B: np.ndarray, rho: np.ndarray, d: int) -> np.ndarray:
    """
    Closed-form Haar average of U^dagger A U rho U^dagger B U.

    Used as an oracle for the twirl coefficients and for sampled moments.
    """
    A, B, rho = (np.asarray(m, dtype=complex) for m in (A, B, rho))
    for name, m in (("A", A), ("B", B), ("rho", rho)):
        if m.shape != (d, d):
            raise ValidationError(f"{name} has shape {m.shape}, expected ({d}, {d})")
    identity = np.eye(d, dtype=complex)
    tr_ab = np.trace(A @ B)
    tr_rho = np.trace(rho)
    scale = (d * np.trace(A) * np.trace(B) - tr_ab) / (d * (d * d - 1.0))
    return (tr_ab * tr_rho / d) * identity / d + scale * (rho - tr_rho * identity / d)


@dataclass(frozen=True)
class TrajectoryPair:
    """Two projector-label strings of equal length k."""
    p: Tuple[Tuple[int, ...], ...]
    q: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "p", tuple(tuple(x) for x in self.p))
        object.__setattr__(self, "q", tuple(tuple(x) for x in self.q))
        if len(self.p) != len(self.q):
            raise ValidationError(f"trajectory lengths differ: {len(self.p)} vs {len(self.q)}")

    @property
    def depth(self) -> int:
        return len(self.p)

    @property
    def hamming(self) -> int:
        return hamming_distance(self.p, self.q)


def hamming_distance(p: Sequence, q: Sequence) -> int:
    """Number of layers whose labels differ."""
    if len(p) != len(q):
        raise ValidationError(f"trajectory lengths differ: {len(p)} vs {len(q)}")
    return sum(1 for a, b in zip(p, q) if tuple(np.atleast_1d(a)) != tuple(np.atleast_1d(b)))


def trajectory_weight(hamming, k: int, d: int):
    """
    Coefficient of tr(H(p) rho_env H^dagger(q)) in the averaged survival.

    (1 - 1/d)^(1 + k - h) / (d^2 - 1)^k; for d = 2 this is 2^h / (2 * 6^k).
    Accepts an array of Hamming distances.
    """
    if d < 2:
        raise ValidationError(f"system dimension must be >= 2, got {d}")
    h = np.asarray(hamming, dtype=float)
    if np.any(h < 0) or np.any(h > k):
        raise ValidationError(f"Hamming distance must lie in [0, {k}]")
    return (1.0 - 1.0 / d) ** (1.0 + k - h) / (d * d - 1.0) ** k
