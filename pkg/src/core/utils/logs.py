"""Logging setup for the command-line front end

Library modules only create `_logger = logging.getLogger(__name__)`; handlers
are installed here, once, by whoever owns the process.
"""

import logging
import sys
from typing import Optional

LOG_FORMAT = "%(asctime)s | %(levelname)s | %(message)s"
LOG_DATE_FORMAT = "%Y-%m-%d %H:%M:%S"

_ROOT_LOGGER_NAME = "src"
_logger_configured = False


def configure_logging(level: str = "WARNING", log_path: Optional[str] = None) -> logging.Logger:
    """Install a stdout handler (and a file handler if log_path is set) once

    Args:
        level: Level name such as "DEBUG" or "WARNING"
        log_path: File to append log records to, or None for stdout only

    Returns:
        The package logger the handlers were attached to
    """
    global _logger_configured
    logger = logging.getLogger(_ROOT_LOGGER_NAME)
    if _logger_configured:
        return logger
    numeric = logging.getLevelName(level.upper())
    if not isinstance(numeric, int):
        raise ValueError(f"unknown log level {level!r}")
    logger.setLevel(numeric)
    logger.handlers.clear()
    formatter = logging.Formatter(LOG_FORMAT, datefmt=LOG_DATE_FORMAT)
    if log_path:
        fh = logging.FileHandler(log_path, encoding="utf-8")
        fh.setLevel(numeric)
        fh.setFormatter(formatter)
        logger.addHandler(fh)
    ch = logging.StreamHandler(sys.stdout)
    ch.setLevel(numeric)
    ch.setFormatter(formatter)
    logger.addHandler(ch)
    _logger_configured = True
    return logger


def reset_logging() -> None:
    """Drop the handlers installed by configure_logging (used between CLI runs in tests)"""
    global _logger_configured
    logger = logging.getLogger(_ROOT_LOGGER_NAME)
    for handler in list(logger.handlers):
        handler.close()
        logger.removeHandler(handler)
    logger.setLevel(logging.NOTSET)
    _logger_configured = False
