"""
Table Exporters
===============

CSV and JSON writers shared by every command. Floats are written with 15
significant digits so repeated runs give byte-identical files; exact values
travel alongside as ``m+n*t`` text where a table has them.
"""

import json
import logging
from pathlib import Path
from typing import Optional, Union

import pandas as pd

from .diffraction import Spectrum

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.15g"

PathLike = Union[str, Path]


def frame_to_csv(frame: pd.DataFrame, path: Optional[PathLike] = None) -> str:
    """CSV text of the frame; also written to ``path`` when given."""
    text = frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
        logger.debug("wrote %d rows to %s", len(frame), path)
    return text


def spectrum_to_json(spectrum: Spectrum, path: Optional[PathLike] = None) -> str:
    text = json.dumps(spectrum.to_records(), indent=1) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
        logger.debug("wrote %d peaks to %s", len(spectrum), path)
    return text


def write_text(text: str, path: Optional[PathLike] = None) -> str:
    if path is not None:
        Path(path).write_text(text + "\n", encoding="utf-8")
    return text
