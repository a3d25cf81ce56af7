"""
Readers for decay-curve CSV files.
"""

from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np
import pandas as pd

from spinbath.core.exceptions import ConfigurationError, DataFormatError, ValidationError
from spinbath.core.logging import get_logger
from spinbath.core.models import DecayCurve
from spinbath.core.schemas import ExperimentConfig, load_config

logger = get_logger(__name__)

REQUIRED_COLUMNS = ("depth", "value")


def read_metadata(path: Union[str, Path]) -> Dict[str, Any]:
    """
    Parse the leading '#' header lines.

    Returns:
        Dict with ``version``, ``command`` and ``config`` (ExperimentConfig or
        None) when present.
    """
    meta: Dict[str, Any] = {"version": None, "command": None, "config": None}
    with open(path, "r", encoding="utf-8") as f:
        for index, line in enumerate(f):
            if not line.startswith("#"):
                break
            content = line[1:].strip()
            if content.startswith("config:"):
                try:
                    meta["config"] = load_config(content[len("config:"):].strip())
                except ConfigurationError as exc:
                    raise DataFormatError(f"{path}: malformed config header: {exc}") from exc
            elif content.startswith("command:"):
                meta["command"] = content[len("command:"):].strip()
            elif index == 0:
                meta["version"] = content
    return meta


def read_decay_csv(
    path: Union[str, Path],
    dimension: Optional[int] = None,
) -> Tuple[DecayCurve, Dict[str, Any]]:
    """
    Read a ``depth,value[,stderr]`` CSV into a DecayCurve.

    Args:
        path: CSV file, as written by the decay command.
        dimension: System dimension; defaults to 2^n_qubits from the config
            header, else 2.

    Raises:
        DataFormatError: On a missing file, missing columns, non-numeric or
            out-of-range values.
    """
    path = Path(path)
    if not path.exists():
        raise DataFormatError(f"Input file not found: {path}")
    meta = read_metadata(path)
    try:
        frame = pd.read_csv(path, comment="#")
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as exc:
        raise DataFormatError(f"{path}: cannot parse CSV: {exc}") from exc

    missing = [c for c in REQUIRED_COLUMNS if c not in frame.columns]
    if missing:
        raise DataFormatError(f"{path}: missing column(s) {missing}; found {list(frame.columns)}")
    if frame.empty:
        raise DataFormatError(f"{path}: no data rows")

    try:
        depths = pd.to_numeric(frame["depth"], errors="raise").to_numpy()
        values = pd.to_numeric(frame["value"], errors="raise").to_numpy(dtype=float)
        stderr = None
        if "stderr" in frame.columns:
            column = pd.to_numeric(frame["stderr"], errors="raise").to_numpy(dtype=float)
            if not np.all(np.isnan(column)):
                stderr = np.nan_to_num(column, nan=0.0)
    except (ValueError, TypeError) as exc:
        raise DataFormatError(f"{path}: non-numeric entries: {exc}") from exc

    if np.any(np.isnan(values)) or np.any(np.mod(depths, 1) != 0):
        raise DataFormatError(f"{path}: depths must be integers and values present")

    if dimension is None:
        config: Optional[ExperimentConfig] = meta["config"]
        dimension = 2 ** config.n_qubits if config is not None else 2
    try:
        curve = DecayCurve(
            depths=depths.astype(int),
            values=values,
            stderr=stderr,
            dimension=dimension,
            label=meta.get("command") or path.stem,
        )
    except ValidationError as exc:
        raise DataFormatError(f"{path}: {exc}") from exc
    logger.info(f"Read {len(curve)} points from {path}")
    return curve, meta
