"""
DualQ Coupled AQM with a PI2 base controller.

ECT(1) and CE packets go to the L4S queue, everything else to the classic
queue. A PI controller driven by the classic queue's head sojourn produces
the base probability p'. Classic packets are marked (or dropped when not
ECN-capable) with p'^2; L4S packets are marked with max(step/ramp, k * p').
Marking and dropping happen at dequeue. Classic mark/drop and the L4S
step are skipped while the serving queue holds no more than the
minimum-queue guard; the coupled L4S component is never guarded.

The default scheduler alternates one L4S packet with one classic packet
while both are backlogged, L4S first. The time-shifted scheduler serves
classic only once its head has waited `time_shift` longer than the L4S
head, so classic delay beyond the shift leaks into the L4S queue.
"""

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Deque, Dict, List, Optional

from ..models.config import DualPi2Config, SchedulerType
from ..net.link import QueueDisc
from ..net.packet import IpEcnCodepoint, Packet
from ..sim.engine import Simulator
from ..sim.rng import RngStream
from ..sim.units import NS_PER_SECOND, SimTime
from ..utils.logger import get_logger

logger = get_logger(__name__)

_MAX_CREDIT_WEIGHT = 100


class QueueKind(str, Enum):
    L4S = "l4s"
    CLASSIC = "classic"


class AqmAction(str, Enum):
    PASS = "pass"
    MARK = "mark"
    DROP = "drop"


@dataclass
class QueueStats:
    enqueued: int = 0
    dequeued: int = 0
    marked: int = 0
    dropped: int = 0
    overflow_drops: int = 0
    sojourn_total: int = 0

    @property
    def mean_sojourn(self) -> float:
        return self.sojourn_total / self.dequeued if self.dequeued else 0.0


@dataclass(frozen=True)
class ProbabilitySample:
    time: SimTime
    p_prime: float
    p_l: float
    p_c: float


@dataclass
class DualQueueState:
    l_queue: Deque[Packet] = field(default_factory=deque)
    c_queue: Deque[Packet] = field(default_factory=deque)
    l_bytes: int = 0
    c_bytes: int = 0
    p_prime: float = 0.0
    prev_delay: float = 0.0
    credit: int = 0
    l_burst: int = 0


SojournListener = Callable[[QueueKind, SimTime, SimTime], None]
ProbabilityListener = Callable[[ProbabilitySample], None]


class DualPi2Queue(QueueDisc):
    """Queue disc for the bottleneck interface."""

    def __init__(self, sim: Simulator, config: Optional[DualPi2Config] = None, rng: Optional[RngStream] = None):
        super().__init__()
        self.sim = sim
        self.config = config or DualPi2Config()
        self.rng = rng or sim.rng_stream(0)
        self.state = DualQueueState()

        c = self.config
        self.k = c.k
        self.target_delay = c.target_delay
        self.t_update = c.t_update
        self.l_step_threshold = c.l_step_threshold
        self.l_ramp_start = c.l_ramp_start
        self.limit = c.limit_bytes
        self.min_queue_bytes = c.min_queue_bytes
        self.time_shift = c.time_shift

        self.l_weight = c.wrr_l_weight
        self._byte_credit = c.c_protection_percent is not None
        # credit weights in percent of packet size
        self._wc = int(round(c.c_protection_percent)) if self._byte_credit else 0
        self._wl = _MAX_CREDIT_WEIGHT - self._wc
        self._credit_init = c.mtu * (self._wc - self._wl)
        self.state.credit = self._credit_init

        self.stats: Dict[QueueKind, QueueStats] = {kind: QueueStats() for kind in QueueKind}
        self.probability_trace: List[ProbabilitySample] = []
        self.sojourn_listeners: List[SojournListener] = []
        self.probability_listeners: List[ProbabilityListener] = []

        self._pi_timer = sim.schedule(self.t_update, self._on_pi_timer)

    # ------------------------------------------------------------------
    # probabilities

    @property
    def p_prime(self) -> float:
        return self.state.p_prime

    @property
    def p_l(self) -> float:
        return min(self.k * self.state.p_prime, 1.0)

    @property
    def p_c(self) -> float:
        return self.state.p_prime ** 2

    def _head_sojourn(self, queue: Deque[Packet], now: SimTime) -> SimTime:
        return now - queue[0].enqueue_time if queue else 0

    def pi2_update(self, now: SimTime) -> float:
        st = self.state
        cur = self._head_sojourn(st.c_queue, now) / NS_PER_SECOND
        target = self.target_delay / NS_PER_SECOND
        delta = self.config.pi_alpha * (cur - target) + self.config.pi_beta * (cur - st.prev_delay)
        st.p_prime = min(max(st.p_prime + delta, 0.0), 1.0)
        st.prev_delay = cur

        sample = ProbabilitySample(now, st.p_prime, self.p_l, self.p_c)
        self.probability_trace.append(sample)
        for listener in self.probability_listeners:
            listener(sample)
        return st.p_prime

    def _on_pi_timer(self) -> None:
        self.pi2_update(self.sim.now)
        self._pi_timer = self.sim.schedule(self.t_update, self._on_pi_timer)

    def stop(self) -> None:
        self._pi_timer.cancel()

    # ------------------------------------------------------------------
    # enqueue

    @staticmethod
    def classify(pkt: Packet) -> QueueKind:
        if pkt.ecn in (IpEcnCodepoint.ECT_1, IpEcnCodepoint.CE):
            return QueueKind.L4S
        return QueueKind.CLASSIC

    def classify_enqueue(self, pkt: Packet, now: SimTime) -> Optional[QueueKind]:
        """Queue the packet; None when the shared buffer limit drops it."""
        kind = self.classify(pkt)
        size = pkt.wire_size
        if self.byte_length + size > self.limit:
            self.stats[kind].overflow_drops += 1
            self._notify_drop(pkt, 'overflow')
            return None
        pkt.enqueue_time = now
        st = self.state
        if kind is QueueKind.L4S:
            st.l_queue.append(pkt)
            st.l_bytes += size
        else:
            st.c_queue.append(pkt)
            st.c_bytes += size
        self.stats[kind].enqueued += 1
        return kind

    def enqueue(self, pkt: Packet, now: SimTime) -> bool:
        return self.classify_enqueue(pkt, now) is not None

    # ------------------------------------------------------------------
    # marking laws

    def _draw(self, probability: float) -> bool:
        if probability <= 0.0:
            return False
        if probability >= 1.0:
            return True
        return self.rng.uniform() < probability

    def l4s_step_probability(self, sojourn: SimTime) -> float:
        if sojourn >= self.l_step_threshold:
            return 1.0
        if sojourn <= self.l_ramp_start:
            return 0.0
        return (sojourn - self.l_ramp_start) / (self.l_step_threshold - self.l_ramp_start)

    def l4s_mark(self, pkt: Packet, sojourn: SimTime, queue_bytes: int) -> AqmAction:
        """Mark probability max(step/ramp, k * p'). Never drops."""
        step = self.l4s_step_probability(sojourn)
        if self.config.l_step_min_queue_guard and queue_bytes <= self.min_queue_bytes:
            step = 0.0
        if self._draw(max(step, self.p_l)):
            return AqmAction.MARK
        return AqmAction.PASS

    def classic_mark_or_drop(self, pkt: Packet, queue_bytes: int) -> AqmAction:
        """Apply p'^2; CE for ECN-capable packets, drop otherwise."""
        if queue_bytes <= self.min_queue_bytes:
            return AqmAction.PASS
        if not self._draw(self.p_c):
            return AqmAction.PASS
        return AqmAction.MARK if pkt.ecn.is_ect else AqmAction.DROP

    # ------------------------------------------------------------------
    # dequeue

    def _select_queue(self, now: SimTime) -> Optional[QueueKind]:
        st = self.state
        if not st.l_queue and not st.c_queue:
            st.credit = self._credit_init
            st.l_burst = 0
            return None
        if not st.c_queue:
            st.l_burst = 0
            return QueueKind.L4S
        if not st.l_queue:
            st.l_burst = 0
            return QueueKind.CLASSIC

        if self.config.scheduler is SchedulerType.TIMESHIFT:
            c_wait = self._head_sojourn(st.c_queue, now)
            l_wait = self._head_sojourn(st.l_queue, now)
            return QueueKind.CLASSIC if c_wait > l_wait + self.time_shift else QueueKind.L4S

        if self._byte_credit:
            if st.credit <= 0:
                st.credit += self._wc * st.l_queue[0].wire_size
                return QueueKind.L4S
            st.credit -= self._wl * st.c_queue[0].wire_size
            return QueueKind.CLASSIC

        # packet WRR: up to l_weight L4S packets, then one classic
        if st.l_burst < self.l_weight:
            st.l_burst += 1
            return QueueKind.L4S
        st.l_burst = 0
        return QueueKind.CLASSIC

    def dequeue(self, now: SimTime) -> Optional[Packet]:
        st = self.state
        while True:
            kind = self._select_queue(now)
            if kind is None:
                return None
            if kind is QueueKind.L4S:
                queue_bytes = st.l_bytes
                pkt = st.l_queue.popleft()
                st.l_bytes -= pkt.wire_size
            else:
                queue_bytes = st.c_bytes
                pkt = st.c_queue.popleft()
                st.c_bytes -= pkt.wire_size

            sojourn = now - pkt.enqueue_time
            stats = self.stats[kind]
            if kind is QueueKind.L4S:
                action = self.l4s_mark(pkt, sojourn, queue_bytes)
            else:
                action = self.classic_mark_or_drop(pkt, queue_bytes)

            if action is AqmAction.DROP:
                stats.dropped += 1
                self._notify_drop(pkt, 'aqm')
                continue
            if action is AqmAction.MARK:
                if pkt.ecn != IpEcnCodepoint.CE:
                    stats.marked += 1
                pkt.ecn = pkt.ecn.mark_ce()

            stats.dequeued += 1
            stats.sojourn_total += sojourn
            for listener in self.sojourn_listeners:
                listener(kind, sojourn, now)
            return pkt

    # ------------------------------------------------------------------

    @property
    def byte_length(self) -> int:
        return self.state.l_bytes + self.state.c_bytes

    def queue_length(self, kind: QueueKind) -> int:
        return len(self.state.l_queue if kind is QueueKind.L4S else self.state.c_queue)

    def __repr__(self) -> str:
        return (
            f"DualPi2Queue(L={len(self.state.l_queue)}, C={len(self.state.c_queue)}, "
            f"p'={self.state.p_prime:.4f}, scheduler={self.config.scheduler.value})"
        )
