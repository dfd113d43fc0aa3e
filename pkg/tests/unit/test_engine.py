"""
Unit tests for the event engine, time units and random streams
"""

import numpy as np
import pytest

from src.sim.engine import Simulator
from src.sim.rng import RngStream, rng_uniform
from src.sim.units import milliseconds, seconds, to_seconds, transmission_time
from src.utils.exceptions import SchedulingException


def test_schedule_fires_at_now_plus_delay(sim):
    """Event scheduled with a delay fires at now + delay"""
    fired = []
    sim.schedule(milliseconds(5), lambda: fired.append(sim.now))
    sim.run_until(seconds(1))
    assert fired == [milliseconds(5)]


def test_equal_fire_times_run_in_insertion_order(sim):
    """Ties are broken by insertion order"""
    order = []
    sim.schedule_at(milliseconds(1), order.append, 'A')
    sim.schedule_at(milliseconds(1), order.append, 'B')
    sim.run_until(milliseconds(2))
    assert order == ['A', 'B']


def test_zero_delay_runs_after_current_event(sim):
    """A zero-delay event fires at the same instant, after the current callback"""
    order = []

    def first():
        sim.schedule(0, lambda: order.append(('child', sim.now)))
        order.append(('parent', sim.now))

    sim.schedule_at(milliseconds(7), first)
    sim.schedule_at(milliseconds(7) + 1, lambda: order.append(('later', sim.now)))
    sim.run_until(milliseconds(10))
    assert order == [
        ('parent', milliseconds(7)),
        ('child', milliseconds(7)),
        ('later', milliseconds(7) + 1),
    ]


def test_run_until_empty_queue_parks_clock(sim):
    """Nothing queued: the clock moves to the bound"""
    assert sim.run_until(seconds(60)) == seconds(60)
    assert sim.now == seconds(60)


def test_run_until_boundary(sim):
    """Only events at or before the bound execute"""
    fired = []
    sim.schedule_at(seconds(1), fired.append, 1)
    sim.schedule_at(seconds(2), fired.append, 2)
    sim.run_until(seconds(1.5))
    assert fired == [1]
    assert sim.pending_events == 1
    sim.run_until(seconds(2))
    assert fired == [1, 2]


def test_cancelled_event_is_skipped(sim):
    """cancel() disables the callback without removing it"""
    fired = []
    handle = sim.schedule(milliseconds(1), fired.append, 'x')
    handle.cancel()
    assert not handle.pending
    sim.run_until(milliseconds(2))
    assert fired == []
    assert sim.events_executed == 0


def test_negative_delay_rejected(sim):
    """Scheduling into the past is an error"""
    with pytest.raises(SchedulingException):
        sim.schedule(-1, lambda: None)
    sim.run_until(milliseconds(5))
    with pytest.raises(SchedulingException):
        sim.schedule_at(milliseconds(4), lambda: None)
    with pytest.raises(SchedulingException):
        sim.run_until(milliseconds(1))


def test_unit_conversions_round_half_up():
    """Conversions land on integer nanoseconds"""
    assert seconds(1.5) == 1_500_000_000
    assert milliseconds(0.25) == 250_000
    assert to_seconds(seconds(60)) == 60.0


def test_transmission_time_examples():
    """Serialization delay of common frame sizes"""
    assert transmission_time(1500, 10_000_000) == milliseconds(1.2)
    assert transmission_time(1500, 100_000_000) == 120_000
    assert transmission_time(40, 1_000_000_000) == 320
    # pacing: 12 Mbit/s, 1500 B frames -> 1 ms gap
    assert transmission_time(1500, 12e6) == milliseconds(1)
    with pytest.raises(ValueError):
        transmission_time(1500, 0)


def test_rng_same_stream_is_reproducible():
    """Identical (seed, run, stream) give identical draws"""
    a = RngStream(42, 1)
    b = RngStream(42, 1)
    assert [rng_uniform(a) for _ in range(5000)] == [rng_uniform(b) for _ in range(5000)]


def test_rng_run_number_changes_sequence():
    """A different run number gives a different sequence"""
    a = RngStream(42, 1)
    b = RngStream(42, 2)
    assert [a.uniform() for _ in range(100)] != [b.uniform() for _ in range(100)]


def test_rng_stream_id_separates_consumers():
    """Two consumers of one run do not share draws"""
    sim = Simulator(seed=42, run_number=3)
    assert sim.rng_stream(0).uniform() != sim.rng_stream(1).uniform()


def test_rng_uniform_mean():
    """10^6 draws average to 0.5 within 0.001"""
    stream = RngStream(42, 1)
    draws = np.fromiter((stream.uniform() for _ in range(1_000_000)), dtype=float, count=1_000_000)
    assert draws.min() >= 0.0
    assert draws.max() < 1.0
    assert abs(draws.mean() - 0.5) < 0.001


def test_rng_rejects_invalid_seed():
    """Seeds must fit in 64 bits"""
    with pytest.raises(ValueError):
        RngStream(2 ** 64, 1)
    with pytest.raises(ValueError):
        RngStream(1, -1)
