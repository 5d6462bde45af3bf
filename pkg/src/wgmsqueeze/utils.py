"""Utility functions for wgmsqueeze."""

import contextlib
import logging
import os
import tempfile
from pathlib import Path
from typing import Iterator, TextIO

from .constants import KHZ, MHZ, MICROWATT


def mhz_to_hz(value: float) -> float:
    """Convert a frequency in MHz to Hz."""
    return value * MHZ


def khz_to_hz(value: float) -> float:
    """Convert a frequency in kHz to Hz."""
    return value * KHZ


def uw_to_w(value: float) -> float:
    """Convert an optical power in microwatts to watts."""
    return value * MICROWATT


def w_to_uw(value: float) -> float:
    """Convert an optical power in watts to microwatts."""
    return value / MICROWATT


def setup_logger(name: str, verbose: bool = False) -> logging.Logger:
    """Set up and return a configured logger instance.

    Args:
        name: Logger name.
        verbose: If True, sets log level to DEBUG.

    Returns:
        Configured logging.Logger instance.
    """
    logger = logging.getLogger(name)
    handler = logging.StreamHandler()
    formatter = logging.Formatter('%(levelname)s: %(message)s')

    if not logger.handlers:
        handler.setFormatter(formatter)
        logger.addHandler(handler)

    logger.setLevel(logging.DEBUG if verbose else logging.INFO)
    return logger


@contextlib.contextmanager
def atomic_output(path: Path) -> Iterator[TextIO]:
    """Open a temporary file next to ``path`` and move it into place on success.

    The temporary file is removed if the block raises, so a failed command
    never leaves a partial output behind.

    Args:
        path: Final destination of the file.

    Yields:
        A text stream to write the content to.
    """
    path = Path(path)
    out_dir = path.parent
    if out_dir and not out_dir.exists():
        out_dir.mkdir(parents=True)

    fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=out_dir)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as stream:
            yield stream
        # mkstemp creates 0600; give the result the usual umask-based mode.
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp_name, 0o666 & ~umask)
        os.replace(tmp_name, path)
    except BaseException:
        with contextlib.suppress(FileNotFoundError):
            os.unlink(tmp_name)
        raise
