"""
CSV emission with '#'-prefixed metadata headers.

Every file starts with the artifact version, the producing command and the
full experiment configuration as JSON, so a result can be regenerated from
its own header. Numbers are written with 12 significant digits and a '.'
decimal point independent of locale.
"""

import sys
from pathlib import Path
from typing import Iterable, Optional, Union

import pandas as pd

from spinbath.core.config import settings
from spinbath.core.logging import get_logger
from spinbath.core.schemas import ExperimentConfig

logger = get_logger(__name__)

FLOAT_FORMAT = "%.12g"


def metadata_lines(command: str, config: Optional[ExperimentConfig] = None) -> list:
    lines = [
        f"# {settings.APP_NAME} {settings.APP_VERSION}",
        f"# command: {command}",
    ]
    if config is not None:
        lines.append(f"# config: {config.to_json()}")
    return lines


def render_csv(
    frame: pd.DataFrame,
    command: str,
    config: Optional[ExperimentConfig] = None,
    trailer: Optional[pd.DataFrame] = None,
    trailer_name: str = "summary",
) -> str:
    """
    Render a result table as CSV text.

    Args:
        frame: Main table; its columns are the CSV header.
        command: Name of the producing command.
        config: Experiment configuration recorded in the header.
        trailer: Optional summary table appended as '#'-prefixed lines so
            the main table still parses on its own.
        trailer_name: Label of the trailer block.
    """
    head = "\n".join(metadata_lines(command, config)) + "\n"
    body = frame.to_csv(index=False, float_format=FLOAT_FORMAT, na_rep="", lineterminator="\n")
    text = head + body
    if trailer is not None:
        block = trailer.to_csv(index=False, float_format=FLOAT_FORMAT, na_rep="", lineterminator="\n")
        text += f"# {trailer_name}\n" + "".join(f"# {line}\n" for line in block.splitlines())
    return text


def write_text(text: str, path: Optional[Union[str, Path]] = None) -> None:
    """Write to ``path`` (parents created) or to stdout when path is None or '-'."""
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(text)
    logger.info(f"Written {path}")
