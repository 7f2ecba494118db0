"""Unit conversions used at the package boundary.

Everything inside the package is SI: meters, seconds, radians, hertz.
Arcminutes, degrees and milliseconds only appear in config keys, CLI flags
and rendered reports.
"""

import math

ARCMIN_PER_DEGREE = 60.0


def arcmin(value: float) -> float:
    """Arcminutes to radians."""
    return math.radians(value / ARCMIN_PER_DEGREE)


def deg(value: float) -> float:
    """Degrees to radians."""
    return math.radians(value)


def to_arcmin(radians: float) -> float:
    return math.degrees(radians) * ARCMIN_PER_DEGREE


def to_deg(radians: float) -> float:
    return math.degrees(radians)


def ms(value: float) -> float:
    """Milliseconds to seconds."""
    return value * 1e-3


def to_ms(seconds: float) -> float:
    return seconds * 1e3


def km(value: float) -> float:
    return value * 1e3


def to_km(meters: float) -> float:
    return meters * 1e-3
