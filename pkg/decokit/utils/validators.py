"""
Input validation utilities for run configurations
"""

import math
from typing import Iterable

PRESSURE_UNITS = ("mbar", "Pa")
MASS_UNITS = ("amu", "kg")


def is_positive_finite(value: float) -> bool:
    """
    Check that a number is finite and strictly positive

    Args:
        value: The number to check

    Returns:
        bool: True if 0 < value < inf
    """
    return isinstance(value, (int, float)) and math.isfinite(value) and value > 0


def all_positive_finite(values: Iterable[float]) -> bool:
    return all(is_positive_finite(v) for v in values)


def is_known_unit(unit: str, allowed: Iterable[str]) -> bool:
    """Units are matched exactly; 'mbar' and 'MBAR' are not the same"""
    return unit in tuple(allowed)
