"""Logging setup for the command line and the test-suite."""

from __future__ import annotations

import logging
import sys
from typing import Optional, TextIO

from pythonjsonlogger import jsonlogger

_TEXT_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"
_JSON_FORMAT = "%(asctime)s %(levelname)s %(name)s %(message)s"


def configure_logging(
    level: str = "INFO", json_output: bool = False, stream: Optional[TextIO] = None
) -> logging.Logger:
    """Install one stream handler on the package logger, replacing earlier ones."""
    root = logging.getLogger("contractsynth")
    for handler in list(root.handlers):
        root.removeHandler(handler)
    handler = logging.StreamHandler(stream or sys.stderr)
    if json_output:
        handler.setFormatter(jsonlogger.JsonFormatter(_JSON_FORMAT))
    else:
        handler.setFormatter(logging.Formatter(_TEXT_FORMAT))
    root.addHandler(handler)
    root.setLevel(level.upper())
    return root
