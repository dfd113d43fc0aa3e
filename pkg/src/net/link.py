"""
Point-to-point links and the queue-disc interface they drain.
"""

from abc import ABC, abstractmethod
from collections import deque
from typing import Callable, Deque, List, Optional

from .packet import DEFAULT_MTU, Packet
from ..sim.engine import Simulator
from ..sim.units import SimTime, transmission_time
from ..utils.logger import get_logger

logger = get_logger(__name__)

DropListener = Callable[[Packet, str], None]


class QueueDisc(ABC):
    """Queue discipline installed on the sending side of a link."""

    def __init__(self):
        self._drop_listeners: List[DropListener] = []
        self.drops = 0

    def add_drop_listener(self, listener: DropListener) -> None:
        self._drop_listeners.append(listener)

    def _notify_drop(self, pkt: Packet, reason: str) -> None:
        self.drops += 1
        for listener in self._drop_listeners:
            listener(pkt, reason)

    @abstractmethod
    def enqueue(self, pkt: Packet, now: SimTime) -> bool:
        """Accept or drop an arriving packet."""

    @abstractmethod
    def dequeue(self, now: SimTime) -> Optional[Packet]:
        """Next packet to serialize, or None when empty."""

    @property
    @abstractmethod
    def byte_length(self) -> int:
        """Bytes currently buffered."""

    @property
    def is_empty(self) -> bool:
        return self.byte_length == 0


class DropTailQueue(QueueDisc):
    """Byte-limited FIFO."""

    def __init__(self, limit_bytes: int = 10_000 * DEFAULT_MTU):
        super().__init__()
        if limit_bytes <= 0:
            raise ValueError("limit_bytes must be positive")
        self.limit_bytes = limit_bytes
        self._packets: Deque[Packet] = deque()
        self._bytes = 0

    def enqueue(self, pkt: Packet, now: SimTime) -> bool:
        size = pkt.wire_size
        if self._bytes + size > self.limit_bytes:
            self._notify_drop(pkt, 'overflow')
            return False
        pkt.enqueue_time = now
        self._packets.append(pkt)
        self._bytes += size
        return True

    def dequeue(self, now: SimTime) -> Optional[Packet]:
        if not self._packets:
            return None
        pkt = self._packets.popleft()
        self._bytes -= pkt.wire_size
        return pkt

    @property
    def byte_length(self) -> int:
        return self._bytes

    def __len__(self) -> int:
        return len(self._packets)


class Link:
    """
    Unidirectional link: one packet in serialization at a time, constant
    propagation delay, FIFO delivery to `deliver`.
    """

    def __init__(
        self,
        sim: Simulator,
        name: str,
        rate_bps: int,
        propagation_delay: SimTime,
        queue: QueueDisc,
        deliver: Callable[[Packet], None],
    ):
        if rate_bps <= 0:
            raise ValueError(f"link rate must be positive, got {rate_bps}")
        if propagation_delay < 0:
            raise ValueError(f"propagation delay must be non-negative, got {propagation_delay}")
        self.sim = sim
        self.name = name
        self.rate_bps = int(rate_bps)
        self.propagation_delay = propagation_delay
        self.queue = queue
        self._deliver = deliver
        self._busy = False
        self.packets_transmitted = 0
        self.bytes_transmitted = 0

    @property
    def busy(self) -> bool:
        return self._busy

    def send(self, pkt: Packet) -> bool:
        """Hand a packet to the link's queue; starts serialization if idle."""
        accepted = self.queue.enqueue(pkt, self.sim.now)
        if accepted and not self._busy:
            self._start_next()
        return accepted

    def delivery_time(self, pkt: Packet, start: SimTime) -> SimTime:
        return start + transmission_time(pkt.wire_size, self.rate_bps) + self.propagation_delay

    def transmit(self, pkt: Packet) -> SimTime:
        """Serialize `pkt` starting now; returns when it reaches the far end."""
        self._busy = True
        finished = self.sim.now + transmission_time(pkt.wire_size, self.rate_bps)
        self.sim.schedule_at(finished, self._on_transmitted, pkt)
        return finished + self.propagation_delay

    def _start_next(self) -> None:
        pkt = self.queue.dequeue(self.sim.now)
        if pkt is None:
            self._busy = False
            return
        self.transmit(pkt)

    def _on_transmitted(self, pkt: Packet) -> None:
        self.packets_transmitted += 1
        self.bytes_transmitted += pkt.wire_size
        if self.propagation_delay == 0:
            self._deliver(pkt)
        else:
            self.sim.schedule(self.propagation_delay, self._deliver, pkt)
        self._start_next()

    def __repr__(self) -> str:
        return f"Link({self.name}, {self.rate_bps} bps, {self.propagation_delay} ns)"


def link_transmit(link: Link, pkt: Packet) -> SimTime:
    """Start serializing a dequeued packet on `link`; returns its delivery time."""
    return link.transmit(pkt)
