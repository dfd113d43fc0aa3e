"""
Simulation time helpers.

SimTime is an integer count of nanoseconds since the start of a run.
Every rate-to-time conversion rounds half-up to the nanosecond.
"""

from typing import Union

SimTime = int

NS_PER_SECOND = 1_000_000_000
NS_PER_MILLISECOND = 1_000_000
NS_PER_MICROSECOND = 1_000


def _round_half_up(value: float) -> int:
    return int(value + 0.5) if value >= 0 else -int(-value + 0.5)


def seconds(value: float) -> SimTime:
    """Convert seconds to SimTime."""
    return _round_half_up(value * NS_PER_SECOND)


def milliseconds(value: float) -> SimTime:
    """Convert milliseconds to SimTime."""
    return _round_half_up(value * NS_PER_MILLISECOND)


def microseconds(value: float) -> SimTime:
    """Convert microseconds to SimTime."""
    return _round_half_up(value * NS_PER_MICROSECOND)


def to_seconds(t: SimTime) -> float:
    return t / NS_PER_SECOND


def to_milliseconds(t: SimTime) -> float:
    return t / NS_PER_MILLISECOND


def transmission_time(size_bytes: int, rate_bps: Union[int, float]) -> SimTime:
    """
    Time to clock `size_bytes` onto a wire running at `rate_bps`.

    Integer rates use exact integer arithmetic; fractional rates (pacing)
    go through float division. Both round half-up.
    """
    if rate_bps <= 0:
        raise ValueError(f"rate must be positive, got {rate_bps}")
    bits = size_bytes * 8
    if isinstance(rate_bps, int):
        numerator = bits * NS_PER_SECOND
        return (2 * numerator + rate_bps) // (2 * rate_bps)
    return _round_half_up(bits * NS_PER_SECOND / rate_bps)
