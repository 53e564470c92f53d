"""Utility functions."""

import logging
import math
import os
from typing import Dict, List, Optional, Tuple

import numpy as np

from sigma_lagrangian.exceptions import ValidationError

LOG_ENV = "SIGMA_LOG"


def format_float(value: float) -> str:
    """Format a float so that it round-trips exactly (``%.17g``)."""
    return "%.17g" % value


def wrap_angle(angle: float) -> float:
    """Reduce an angle to ``[0, 2 pi)``."""
    reduced = math.fmod(angle, 2 * math.pi)
    if reduced < 0:
        reduced += 2 * math.pi
    return 0.0 if reduced >= 2 * math.pi else reduced


def angle_difference(first: float, second: float) -> float:
    """Return ``first - second`` wrapped into ``(-pi, pi]``."""
    delta = math.remainder(first - second, 2 * math.pi)
    return math.pi if delta == -math.pi else delta


def parse_float_list(text: str) -> List[float]:
    """Parse comma separated floats such as ``"1,0,0"``."""
    try:
        return [float(item) for item in text.split(",") if item.strip()]
    except ValueError as error:
        raise ValidationError(
            f"Expected comma separated numbers, got {text!r}"
        ) from error


def parse_key_values(items: Optional[List[str]]) -> Dict[str, float]:
    """Parse ``name=value`` pairs into a dictionary of floats."""
    parsed: Dict[str, float] = {}
    for item in items or []:
        name, sep, value = item.partition("=")
        if not sep or not name:
            raise ValidationError(f"param: expected name=value, got {item!r}")
        try:
            parsed[name.strip()] = float(value)
        except ValueError as error:
            raise ValidationError(f"param {name}: expected a number") from error
    return parsed


def parse_range(text: str) -> Tuple[float, float, int]:
    """Parse a sweep range ``"start:stop:count"``."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValidationError(f"table: expected start:stop:count, got {text!r}")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as error:
        raise ValidationError(
            f"table: expected start:stop:count, got {text!r}"
        ) from error
    if count < 1:
        raise ValidationError(f"table: count must be positive, got {count}")
    return start, stop, count


def range_values(text: str) -> np.ndarray:
    """Expand a sweep range into its sample values."""
    start, stop, count = parse_range(text)
    return np.linspace(start, stop, count)


def configure_logging(level: Optional[str] = None) -> None:
    """Configure package logging from ``level`` or the ``SIGMA_LOG`` variable.

    Defaults to WARNING. Unknown level names fall back to WARNING.
    """
    name = (level or os.environ.get(LOG_ENV) or "WARNING").upper()
    numeric = getattr(logging, name, None)
    if not isinstance(numeric, int):
        numeric = logging.WARNING
    logging.basicConfig(
        level=numeric, format="%(asctime)s %(levelname)s %(name)s: %(message)s"
    )
    logging.getLogger("sigma_lagrangian").setLevel(numeric)
