# I/O Module

"""
CSV readers and writers with '#'-prefixed metadata headers.
"""

from spinbath.io.readers import read_decay_csv, read_metadata
from spinbath.io.writers import render_csv, write_text, metadata_lines

__all__ = [
    "read_decay_csv",
    "read_metadata",
    "render_csv",
    "write_text",
    "metadata_lines",
]
