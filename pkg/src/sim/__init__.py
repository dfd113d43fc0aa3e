"""Deterministic discrete-event engine"""

from .engine import EventHandle, Simulator
from .rng import RngStream, rng_uniform
from .units import (
    SimTime,
    microseconds,
    milliseconds,
    seconds,
    to_milliseconds,
    to_seconds,
    transmission_time,
)

__all__ = [
    'EventHandle',
    'Simulator',
    'RngStream',
    'rng_uniform',
    'SimTime',
    'microseconds',
    'milliseconds',
    'seconds',
    'to_milliseconds',
    'to_seconds',
    'transmission_time',
]
