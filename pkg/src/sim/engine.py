"""
Discrete-event engine: a heap of (fire_time, sequence) ordered events and a
virtual clock in integer nanoseconds.
"""

import heapq
from typing import Any, Callable, List, Tuple

from .rng import RngStream
from .units import SimTime
from ..utils.exceptions import SchedulingException


class EventHandle:
    """A scheduled callback. `cancel()` only sets the disable flag."""

    __slots__ = ('fire_time', 'sequence', 'action', 'args', 'cancelled')

    def __init__(self, fire_time: SimTime, sequence: int, action: Callable[..., Any], args: Tuple[Any, ...]):
        self.fire_time = fire_time
        self.sequence = sequence
        self.action = action
        self.args = args
        self.cancelled = False

    def cancel(self) -> None:
        self.cancelled = True

    @property
    def pending(self) -> bool:
        return not self.cancelled

    def __repr__(self) -> str:
        state = 'cancelled' if self.cancelled else 'pending'
        return f"EventHandle(t={self.fire_time}, seq={self.sequence}, {state})"


class Simulator:
    """
    Single-threaded simulation instance.

    Events with equal fire times run in insertion order; an event scheduled
    with zero delay from inside a callback runs after that callback returns
    and before any later instant.
    """

    def __init__(self, seed: int = 1, run_number: int = 1):
        self.seed = seed
        self.run_number = run_number
        self._now: SimTime = 0
        self._queue: List[Tuple[SimTime, int, EventHandle]] = []
        self._sequence = 0
        self.events_executed = 0

    @property
    def now(self) -> SimTime:
        return self._now

    def schedule(self, delay: SimTime, action: Callable[..., Any], *args: Any) -> EventHandle:
        """Run `action(*args)` at now + delay."""
        if delay < 0:
            raise SchedulingException(f"negative delay {delay} ns")
        return self._push(self._now + delay, action, args)

    def schedule_at(self, fire_time: SimTime, action: Callable[..., Any], *args: Any) -> EventHandle:
        if fire_time < self._now:
            raise SchedulingException(f"fire time {fire_time} ns is before now ({self._now} ns)")
        return self._push(fire_time, action, args)

    def _push(self, fire_time: SimTime, action: Callable[..., Any], args: Tuple[Any, ...]) -> EventHandle:
        handle = EventHandle(fire_time, self._sequence, action, args)
        heapq.heappush(self._queue, (fire_time, self._sequence, handle))
        self._sequence += 1
        return handle

    def run_until(self, end: SimTime) -> SimTime:
        """Execute every event with fire_time <= end, then park the clock at end."""
        if end < self._now:
            raise SchedulingException(f"end {end} ns is before now ({self._now} ns)")

        queue = self._queue
        pop = heapq.heappop
        while queue and queue[0][0] <= end:
            fire_time, _, handle = pop(queue)
            if handle.cancelled:
                continue
            self._now = fire_time
            handle.action(*handle.args)
            self.events_executed += 1

        self._now = end
        return self._now

    @property
    def pending_events(self) -> int:
        return sum(1 for _, _, handle in self._queue if not handle.cancelled)

    def rng_stream(self, stream_id: int) -> RngStream:
        """Random stream bound to this instance's (seed, run_number)."""
        return RngStream(self.seed, self.run_number, stream_id)
