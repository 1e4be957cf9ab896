"""Structured logger helpers shared by the library, scripts and CLI."""

from __future__ import annotations

import logging
import sys
from typing import TextIO


def configure_logging(level: str = "INFO", stream: TextIO | None = None) -> None:
    """
    Configure root logging once per process.

    The CLI passes ``sys.stderr`` so that results printed on stdout
    (``psnr=... ssim=...``) stay machine-readable.
    """
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format="%(asctime)s | %(levelname)s | %(name)s | %(message)s",
        handlers=[logging.StreamHandler(stream or sys.stdout)],
        force=True,
    )


def get_logger(name: str) -> logging.Logger:
    return logging.getLogger(name)
