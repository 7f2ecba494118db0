import math

from .exceptions import DomainError


def check_positive(name, value):
    if not math.isfinite(value) or value <= 0:
        raise DomainError(f"{name} must be positive and finite, got {value!r}")
    return value


def check_non_negative(name, value):
    if not math.isfinite(value) or value < 0:
        raise DomainError(f"{name} must be non-negative and finite, got {value!r}")
    return value


def check_probability(name, value, *, open_interval=True):
    ok = 0 < value < 1 if open_interval else 0 <= value <= 1
    if not ok:
        raise DomainError(f"{name} must lie in {'(0, 1)' if open_interval else '[0, 1]'}, got {value!r}")
    return value


def check_int_range(name, value, lo, hi):
    if isinstance(value, bool) or not isinstance(value, int):
        raise DomainError(f"{name} must be an integer, got {value!r}")
    if not lo <= value <= hi:
        raise DomainError(f"{name} must lie in [{lo}, {hi}], got {value}")
    return value


def ceil_count(x, rel=1e-9):
    """Ceiling that ignores floating-point noise just above an integer.

    Requirements are lower bounds, so they round up; but 120.00000000000001
    channels is 120, not 121.
    """
    n = round(x)
    if abs(x - n) <= rel * max(1.0, abs(x)):
        return int(n)
    return int(math.ceil(x))
