"""
Reproducibility utilities: counter-based RNG streams.

Every stochastic quantity draws from a stream keyed by the experiment seed
plus a tuple of integer indices, e.g. (seed, depth_index, sample_index), so
results do not depend on evaluation order or worker count.
"""

from typing import Sequence

import numpy as np

from spinbath.core.exceptions import ValidationError

SEED_BITS = 64


def _check_seed(seed: int) -> int:
    if int(seed) != seed or not 0 <= seed < 2 ** SEED_BITS:
        raise ValidationError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return int(seed)


def make_stream(seed: int, *keys: int) -> np.random.Generator:
    """
    Deterministic, independent generator for a (seed, *keys) coordinate.

    Args:
        seed: Master experiment seed (u64).
        keys: Non-negative stream indices.

    Returns:
        A Philox-backed numpy Generator.

    Example:
        >>> rng = make_stream(7, 0, 3)
        >>> rng.random() == make_stream(7, 0, 3).random()
        True
    """
    seed = _check_seed(seed)
    if any(int(k) != k or k < 0 for k in keys):
        raise ValidationError(f"stream keys must be non-negative integers, got {keys}")
    entropy = [seed, *(int(k) for k in keys)]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def make_streams(seed: int, prefix: Sequence[int], count: int) -> list:
    """Streams for (seed, *prefix, i) with i in range(count)."""
    return [make_stream(seed, *prefix, i) for i in range(count)]
