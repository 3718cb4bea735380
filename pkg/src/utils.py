"""
Utility functions for logging, number formatting, and error handling.
"""

import logging
import math
from typing import Optional

import colorlog

from src.config import LOG_LEVEL, LOG_FORMAT, CSV_FLOAT_FORMAT

_CREATED_LOGGERS: set[str] = set()


def setup_logger(name: str) -> logging.Logger:
    """Set up colored logger with consistent formatting."""
    logger = colorlog.getLogger(name)

    if name not in _CREATED_LOGGERS:
        handler = colorlog.StreamHandler()
        handler.setFormatter(colorlog.ColoredFormatter(
            LOG_FORMAT,
            log_colors={
                'DEBUG': 'cyan',
                'INFO': 'green',
                'WARNING': 'yellow',
                'ERROR': 'red',
                'CRITICAL': 'red,bg_white',
            }
        ))
        logger.addHandler(handler)
        logger.propagate = False
        logger.setLevel(getattr(logging, LOG_LEVEL.upper()))
        _CREATED_LOGGERS.add(name)

    return logger


def set_global_level(level: str) -> None:
    """Apply a verbosity level to every logger created by setup_logger."""
    numeric = getattr(logging, level.upper())
    for name in _CREATED_LOGGERS:
        logging.getLogger(name).setLevel(numeric)


def format_float(value) -> str:
    """
    Format a cell value for CSV output.

    Args:
        value: Number, flag, text, or None for an empty cell

    Returns:
        Stable text representation ("" for None, "inf"/"nan" spelled out)
    """
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)

    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"

    return CSV_FLOAT_FORMAT.format(value)


def is_strictly_monotone(values, increasing: bool = True) -> bool:
    """Check that successive values strictly increase (or decrease)."""
    pairs = zip(values[:-1], values[1:])
    if increasing:
        return all(b > a for a, b in pairs)
    return all(b < a for a, b in pairs)


def sign_changes(values) -> int:
    """Count sign changes in a sequence, ignoring exact zeros."""
    signs = [math.copysign(1.0, v) for v in values if v != 0]
    return sum(1 for a, b in zip(signs[:-1], signs[1:]) if a != b)


class DomainError(ValueError):
    """Argument lies outside the mathematical domain of an operation."""
    pass


class FeasibilityError(ValueError):
    """Power-allocation ratio lies outside the feasible set."""
    pass


class BracketError(ValueError):
    """Root bracket does not enclose a sign change."""
    pass


class ConfigError(Exception):
    """Scenario file or sweep specification is unusable."""
    pass
