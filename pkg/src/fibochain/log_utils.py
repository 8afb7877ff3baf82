"""
Console Logging
===============

Timestamped console logging with level glyphs:

    [14:02:11] ✅ spectrum written to out/spectrum.json

All library modules log through ``logging.getLogger(__name__)`` under the
``fibochain`` hierarchy; the CLI calls ``configure_logging`` once.
"""

import logging
import sys
from typing import Optional, TextIO

SUCCESS = 25
logging.addLevelName(SUCCESS, "SUCCESS")

LEVEL_GLYPHS = {
    logging.DEBUG: "🔧",
    logging.INFO: "ℹ️",
    SUCCESS: "✅",
    logging.WARNING: "⚠️",
    logging.ERROR: "❌",
    logging.CRITICAL: "❌",
}


class GlyphFormatter(logging.Formatter):
    """Formats records as ``[HH:MM:SS] <glyph> message``."""

    def __init__(self):
        super().__init__(datefmt="%H:%M:%S")

    def format(self, record: logging.LogRecord) -> str:
        timestamp = self.formatTime(record, self.datefmt)
        glyph = LEVEL_GLYPHS.get(record.levelno, "ℹ️")
        message = record.getMessage()
        if record.exc_info:
            message = f"{message}\n{self.formatException(record.exc_info)}"
        return f"[{timestamp}] {glyph} {message}"


def configure_logging(
    verbose: bool = False, quiet: bool = False, stream: Optional[TextIO] = None
) -> logging.Logger:
    """Attach one stderr handler to the package logger."""
    logger = logging.getLogger("fibochain")
    for handler in list(logger.handlers):
        logger.removeHandler(handler)

    handler = logging.StreamHandler(stream or sys.stderr)
    handler.setFormatter(GlyphFormatter())
    logger.addHandler(handler)
    logger.propagate = False

    if quiet:
        logger.setLevel(SUCCESS)
    elif verbose:
        logger.setLevel(logging.DEBUG)
    else:
        logger.setLevel(logging.INFO)
    return logger


def log_success(logger: logging.Logger, message: str, *args) -> None:
    logger.log(SUCCESS, message, *args)
