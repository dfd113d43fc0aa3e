"""
CUBIC congestion control (no hystart, no fast convergence).

ECE echoes and fast-retransmit losses are both classic congestion signals:
multiplicative decrease by beta at most once per window of data.
"""

import math
from dataclasses import dataclass
from typing import Dict, Optional

from .base import CcaFeedback, CongestionOps
from ...models.config import CubicConfig
from ...net.packet import DEFAULT_MSS
from ...sim.units import NS_PER_SECOND, SimTime

MIN_CWND = 1.0
# upper bound on the per-RTT target, RFC 9438
MAX_TARGET_GROWTH = 1.5


@dataclass
class CubicState:
    w_max: float
    k: float
    epoch_start: Optional[SimTime]
    beta: float
    c: float


class CubicCongestionControl(CongestionOps):
    name = "cubic"

    def __init__(
        self,
        config: Optional[CubicConfig] = None,
        segment_size: int = DEFAULT_MSS,
        initial_cwnd_segments: int = 10,
    ):
        super().__init__(segment_size, initial_cwnd_segments)
        self.config = config or CubicConfig()
        self.state = CubicState(
            w_max=0.0, k=0.0, epoch_start=None, beta=self.config.beta, c=self.config.c
        )
        self.cwnd = float(initial_cwnd_segments)
        self.ssthresh = math.inf
        self.srtt: Optional[float] = None
        self.recovery_point = -1
        self.in_loss_recovery = False
        self.reductions = 0

    @property
    def in_slow_start(self) -> bool:
        return self.cwnd < self.ssthresh

    def _update_srtt(self, sample: SimTime) -> None:
        if sample <= 0:
            return
        seconds = sample / NS_PER_SECOND
        self.srtt = seconds if self.srtt is None else self.srtt + (seconds - self.srtt) / 8.0

    def on_connection_established(self, now: SimTime, ecn_mode, rtt: Optional[SimTime]) -> None:
        super().on_connection_established(now, ecn_mode, rtt)
        if rtt is not None:
            self._update_srtt(rtt)

    def cubic_window(self, t_since_epoch: float) -> float:
        """W(t) = c * (t - k)^3 + w_max, in segments."""
        st = self.state
        return st.c * (t_since_epoch - st.k) ** 3 + st.w_max

    def _reno_friendly_window(self, t_since_epoch: float) -> float:
        st = self.state
        if not self.srtt:
            return 0.0
        return st.w_max * st.beta + 3.0 * (1.0 - st.beta) / (1.0 + st.beta) * t_since_epoch / self.srtt

    def on_classic_congestion(self, now: SimTime, snd_nxt: int) -> float:
        st = self.state
        st.w_max = self.cwnd
        self.cwnd = max(self.cwnd * st.beta, MIN_CWND)
        self.ssthresh = max(self.cwnd, 2.0)
        st.epoch_start = now
        st.k = math.pow(st.w_max * (1.0 - st.beta) / st.c, 1.0 / 3.0)
        self.recovery_point = snd_nxt
        self.reductions += 1
        return self.cwnd

    def on_ack(self, fb: CcaFeedback, now: SimTime) -> bool:
        if fb.rtt_sample is not None:
            self._update_srtt(fb.rtt_sample)
        reduced = False
        if fb.ce_delta > 0 and fb.snd_una > self.recovery_point:
            self.on_classic_congestion(now, fb.snd_nxt)
            reduced = True
        if not reduced and not self.in_loss_recovery:
            self._increase(fb, now)
        return reduced

    def _increase(self, fb: CcaFeedback, now: SimTime) -> None:
        acked_segments = fb.acked_segments(self.segment_size)
        if acked_segments <= 0:
            return
        if self.in_slow_start:
            self.cwnd += acked_segments
            return

        st = self.state
        if st.epoch_start is None:
            st.epoch_start = now
            if self.cwnd < st.w_max:
                st.k = math.pow((st.w_max - self.cwnd) / st.c, 1.0 / 3.0)
            else:
                st.w_max = self.cwnd
                st.k = 0.0
        t = (now - st.epoch_start) / NS_PER_SECOND
        rtt = self.srtt or 0.0
        target = self.cubic_window(t + rtt)
        target = max(target, self._reno_friendly_window(t))
        target = min(target, MAX_TARGET_GROWTH * self.cwnd)
        if target > self.cwnd:
            self.cwnd += (target - self.cwnd) / self.cwnd * acked_segments

    def enter_loss(self, now: SimTime, recovery_point: int) -> None:
        self.in_loss_recovery = True
        self.on_classic_congestion(now, recovery_point)

    def on_recovery_complete(self, now: SimTime) -> None:
        self.in_loss_recovery = False

    def on_retransmission_timeout(self, now: SimTime) -> None:
        self.ssthresh = max(self.cwnd * self.state.beta, 2.0)
        self.state.w_max = self.cwnd
        self.state.epoch_start = None
        self.cwnd = MIN_CWND
        self.in_loss_recovery = False

    @property
    def cwnd_bytes(self) -> int:
        return max(int(self.cwnd), 1) * self.segment_size

    @property
    def ssthresh_bytes(self) -> Optional[int]:
        if math.isinf(self.ssthresh):
            return None
        return int(self.ssthresh * self.segment_size)

    def trace(self) -> Dict[str, float]:
        return {'w_max': self.state.w_max}
