"""
Per-run collection of flow and queue time series.

Samples are folded into fixed-width bins as they arrive, so memory does not
grow with the packet count. A second accumulator per metric keeps the
steady-state (post warm-up) totals the run summary is built from.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
import pandas as pd

from .stats import jain_index
from ..aqm.dualpi2 import DualPi2Queue, ProbabilitySample, QueueKind
from ..models.config import MetricsConfig
from ..models.results import FlowSummary, QueueSummary, RunSummary
from ..sim.engine import Simulator
from ..sim.units import NS_PER_SECOND, SimTime
from ..tcp.socket import TcpReceiver, TcpSender
from ..utils.exceptions import EmptyThroughputException
from ..utils.logger import get_logger

logger = get_logger(__name__)


@dataclass
class TimeSeries:
    """Fixed-interval series; `times` are bin end times in seconds."""
    name: str
    interval: SimTime
    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if len(self.times) != len(self.values):
            raise ValueError(f"{self.name}: times and values differ in length")
        if len(self.times) > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError(f"{self.name}: timestamps must be strictly increasing")

    @property
    def points(self) -> List[tuple]:
        return list(zip(self.times.tolist(), self.values.tolist()))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({'time_s': self.times, 'value': self.values})

    def __len__(self) -> int:
        return len(self.times)


class BinnedAccumulator:
    """Sums and counts per bin plus a running steady-state total."""

    __slots__ = ('interval', 'nbins', 'warmup', 'sums', 'counts', 'steady_sum', 'steady_count')

    def __init__(self, interval: SimTime, duration: SimTime, warmup: SimTime = 0):
        if interval <= 0:
            raise ValueError("bin interval must be positive")
        self.interval = interval
        self.nbins = max(math.ceil(duration / interval), 1)
        self.warmup = warmup
        self.sums = [0.0] * self.nbins
        self.counts = [0] * self.nbins
        self.steady_sum = 0.0
        self.steady_count = 0

    def add(self, now: SimTime, value: float = 1.0) -> None:
        idx = min(now // self.interval, self.nbins - 1)
        self.sums[idx] += value
        self.counts[idx] += 1
        if now >= self.warmup:
            self.steady_sum += value
            self.steady_count += 1

    @property
    def steady_mean(self) -> Optional[float]:
        if not self.steady_count:
            return None
        return self.steady_sum / self.steady_count

    def bin_times(self) -> np.ndarray:
        return (np.arange(1, self.nbins + 1, dtype=np.int64) * self.interval) / NS_PER_SECOND


def throughput_series(bytes_per_bin, interval: SimTime, name: str = "throughput") -> TimeSeries:
    """Delivered bytes per bin to bits per second, idle bins included as 0."""
    sums = np.asarray(bytes_per_bin, dtype=float)
    times = np.arange(1, len(sums) + 1, dtype=np.int64) * interval / NS_PER_SECOND
    return TimeSeries(name, interval, times, sums * 8.0 * NS_PER_SECOND / interval)


def count_series(acc: BinnedAccumulator, name: str) -> TimeSeries:
    return TimeSeries(name, acc.interval, acc.bin_times(), np.asarray(acc.counts, dtype=float))


def mean_series(acc: BinnedAccumulator, name: str, hold: bool = True) -> TimeSeries:
    """
    Per-bin mean. With `hold` an empty bin repeats the previous value (gauge
    semantics); otherwise empty bins are left out. Leading empty bins are
    always dropped.
    """
    sums = np.asarray(acc.sums, dtype=float)
    counts = np.asarray(acc.counts, dtype=float)
    means = pd.Series(np.divide(sums, counts, out=np.full_like(sums, np.nan), where=counts > 0))
    if hold:
        means = means.ffill()
    mask = means.notna().to_numpy()
    return TimeSeries(name, acc.interval, acc.bin_times()[mask], means.to_numpy()[mask])


class FlowRecorder:
    """Samples one sender/receiver pair."""

    def __init__(self, name: str, sender: TcpSender, receiver: TcpReceiver, interval: SimTime,
                 duration: SimTime, warmup: SimTime):
        self.name = name
        self.sender = sender
        self.receiver = receiver

        def acc() -> BinnedAccumulator:
            return BinnedAccumulator(interval, duration, warmup)

        self.delivered = acc()
        self.rtt = acc()
        self.cwnd = acc()
        self.marks = acc()
        self.extra: Dict[str, BinnedAccumulator] = {}

        receiver.delivery_listeners.append(self.on_delivered)
        receiver.mark_listeners.append(self.on_mark)
        sender.ack_listeners.append(self.on_ack)
        self._acc = acc

    def on_delivered(self, nbytes: int, now: SimTime) -> None:
        self.delivered.add(now, nbytes)

    def on_mark(self, now: SimTime) -> None:
        self.marks.add(now)

    def on_ack(self, sender: TcpSender, now: SimTime) -> None:
        st = sender.state
        if st.srtt is not None:
            self.rtt.add(now, st.srtt / NS_PER_SECOND)
        self.cwnd.add(now, st.cwnd)
        for key, value in sender.cca.trace().items():
            if key not in self.extra:
                self.extra[key] = self._acc()
            self.extra[key].add(now, value)

    def series(self) -> Dict[str, TimeSeries]:
        out = {
            'throughput': throughput_series(self.delivered.sums, self.delivered.interval),
            'rtt': mean_series(self.rtt, 'rtt'),
            'cwnd': mean_series(self.cwnd, 'cwnd'),
            'ce_marks': count_series(self.marks, 'ce_marks'),
        }
        for key, acc in self.extra.items():
            out[key] = mean_series(acc, key)
        return {f"{self.name}_{key}": ts for key, ts in out.items()}


@dataclass
class RunResult:
    """Output of one replication: summary row plus the per-run artifacts."""
    run_number: int
    summary: RunSummary
    series: Dict[str, TimeSeries] = field(default_factory=dict)
    probability_trace: Optional[pd.DataFrame] = None
    events_executed: int = 0


class MetricsCollector:
    """Attach to flows and the bottleneck queue before the run starts."""

    def __init__(self, sim: Simulator, config: MetricsConfig, duration: SimTime):
        self.sim = sim
        self.config = config
        self.interval = config.sample_interval
        self.duration = duration
        self.warmup = config.warmup
        self.flows: Dict[str, FlowRecorder] = {}
        self.queue: Optional[DualPi2Queue] = None
        self.sojourn: Dict[QueueKind, BinnedAccumulator] = {}
        self._p_prime = BinnedAccumulator(self.interval, duration, self.warmup)

    def attach_flow(self, name: str, sender: TcpSender, receiver: TcpReceiver) -> FlowRecorder:
        if name in self.flows:
            raise ValueError(f"flow {name} already attached")
        recorder = FlowRecorder(name, sender, receiver, self.interval, self.duration, self.warmup)
        self.flows[name] = recorder
        return recorder

    def attach_queue(self, queue: DualPi2Queue) -> None:
        self.queue = queue
        self.sojourn = {
            kind: BinnedAccumulator(self.interval, self.duration, self.warmup) for kind in QueueKind
        }
        queue.sojourn_listeners.append(self._on_sojourn)
        queue.probability_listeners.append(self._on_probability)

    def _on_sojourn(self, kind: QueueKind, sojourn: SimTime, now: SimTime) -> None:
        self.sojourn[kind].add(now, sojourn / NS_PER_SECOND)

    def _on_probability(self, sample: ProbabilitySample) -> None:
        self._p_prime.add(sample.time, sample.p_prime)

    def throughput_series(self, flow: str) -> TimeSeries:
        recorder = self.flows[flow]
        return throughput_series(recorder.delivered.sums, self.interval)

    def series(self) -> Dict[str, TimeSeries]:
        out: Dict[str, TimeSeries] = {}
        for recorder in self.flows.values():
            out.update(recorder.series())
        prefixes = {QueueKind.L4S: 'l', QueueKind.CLASSIC: 'c'}
        for kind, acc in self.sojourn.items():
            name = f"{prefixes[kind]}_sojourn"
            out[name] = mean_series(acc, name, hold=False)
        return dict(sorted(out.items()))

    def probability_frame(self) -> Optional[pd.DataFrame]:
        if self.queue is None:
            return None
        trace = self.queue.probability_trace
        return pd.DataFrame({
            'time_s': [s.time / NS_PER_SECOND for s in trace],
            'p_prime': [s.p_prime for s in trace],
            'p_l': [s.p_l for s in trace],
            'p_c': [s.p_c for s in trace],
        })

    def summarize(self, run_number: int) -> RunSummary:
        steady_seconds = (self.duration - self.warmup) / NS_PER_SECOND
        flows = []
        for name, rec in self.flows.items():
            sender = rec.sender
            flows.append(FlowSummary(
                name=name,
                cca=sender.cca.name,
                ecn_mode=sender.state.ecn_mode.value,
                mean_throughput_bps=rec.delivered.steady_sum * 8.0 / steady_seconds,
                mean_rtt_s=rec.rtt.steady_mean,
                ce_marks=rec.receiver.ce_received,
                ce_marks_per_s=rec.marks.steady_count / steady_seconds,
                retransmissions=sender.counters.retransmissions,
                timeouts=sender.counters.timeouts,
            ))

        queues = []
        if self.queue is not None:
            for kind, acc in self.sojourn.items():
                stats = self.queue.stats[kind]
                queues.append(QueueSummary(
                    kind=kind.value,
                    mean_sojourn_s=acc.steady_mean,
                    dequeued=stats.dequeued,
                    marked=stats.marked,
                    dropped=stats.dropped + stats.overflow_drops,
                ))

        throughputs = [f.mean_throughput_bps for f in flows]
        try:
            jain = jain_index(throughputs)
        except EmptyThroughputException:
            logger.warning(f"run {run_number}: no data delivered in steady state, jain index set to 0")
            jain = 0.0

        return RunSummary(
            run_number=run_number,
            flows=flows,
            queues=queues,
            jain_index=jain,
            mean_p_prime=self._p_prime.steady_mean,
        )

    def result(self, run_number: int) -> RunResult:
        return RunResult(
            run_number=run_number,
            summary=self.summarize(run_number),
            series=self.series(),
            probability_trace=self.probability_frame(),
            events_executed=self.sim.events_executed,
        )
