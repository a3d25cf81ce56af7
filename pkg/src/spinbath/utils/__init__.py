# Utils Module

"""
Reproducible RNG streams and order-preserving parallel mapping.
"""

from spinbath.utils.reproducibility import make_stream, make_streams
from spinbath.utils.parallel import parallel_map, resolve_workers

__all__ = [
    "make_stream",
    "make_streams",
    "parallel_map",
    "resolve_workers",
]
