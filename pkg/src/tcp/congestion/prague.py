"""
TCP Prague congestion control.

DCTCP-style scalable controller: an EWMA `alpha` of the marked-byte
fraction, updated on a fixed target-RTT clock, scales each CE reduction.
The window is kept as a float number of segments and rounded up only when
the socket asks how much it may send. Pacing is mandatory.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional

from .base import CcaFeedback, CongestionOps
from ..accecn import EcnMode
from ...models.config import PragueConfig
from ...net.packet import DEFAULT_MSS
from ...sim.units import NS_PER_SECOND, SimTime
from ...utils.logger import get_logger

logger = get_logger(__name__)

MIN_FRAC_CWND = 1.0


class PragueSubState(str, Enum):
    OPEN = "open"
    CWR = "cwr"
    LOSS = "loss"


@dataclass
class PragueState:
    alpha: float
    g: float
    frac_cwnd: float
    target_rtt: SimTime
    hsrtt: Optional[float] = None
    next_alpha_update: SimTime = 0
    bytes_acked_interval: int = 0
    bytes_marked_interval: int = 0
    sub_state: PragueSubState = PragueSubState.OPEN
    cwr_round_end: SimTime = 0
    ssthresh: float = field(default=math.inf)

    @property
    def marked_fraction(self) -> float:
        if self.bytes_acked_interval <= 0:
            return 0.0
        return self.bytes_marked_interval / self.bytes_acked_interval


class PragueCongestionControl(CongestionOps):
    name = "prague"
    scalable = True
    paced = True

    def __init__(
        self,
        config: Optional[PragueConfig] = None,
        segment_size: int = DEFAULT_MSS,
        initial_cwnd_segments: int = 10,
    ):
        super().__init__(segment_size, initial_cwnd_segments)
        self.config = config or PragueConfig()
        self.state = PragueState(
            alpha=self.config.initial_alpha,
            g=self.config.g,
            frac_cwnd=float(initial_cwnd_segments),
            target_rtt=self.config.target_rtt,
        )
        self._pacing_rate = 0.0
        self.ce_reductions = 0

    @property
    def l4s_active(self) -> bool:
        return self.ecn_mode is EcnMode.ACC_ECN

    @property
    def in_slow_start(self) -> bool:
        return self.state.frac_cwnd < self.state.ssthresh

    def on_connection_established(self, now: SimTime, ecn_mode: EcnMode, rtt: Optional[SimTime]) -> None:
        super().on_connection_established(now, ecn_mode, rtt)
        if rtt is not None:
            self.update_rtt_ewma(rtt)
        self.state.next_alpha_update = now + self.state.target_rtt
        self.update_pacing_rate(self.cwnd_bytes)
        if not self.l4s_active:
            logger.debug(f"prague running in classic fallback (ecn_mode={ecn_mode.value})")

    def on_ack(self, fb: CcaFeedback, now: SimTime) -> bool:
        st = self.state
        if fb.rtt_sample is not None:
            self.update_rtt_ewma(fb.rtt_sample)
        if st.sub_state is PragueSubState.CWR and now >= st.cwr_round_end:
            st.sub_state = PragueSubState.OPEN

        reduced = False
        if self.l4s_active:
            self.accumulate_feedback(fb)
            if now >= st.next_alpha_update:
                self.update_alpha(now)
            if fb.ce_delta > 0:
                reduced = self.enter_cwr(now)
        elif fb.ce_delta > 0:
            reduced = self._classic_ecn_reduction(now)

        if not reduced and st.sub_state is not PragueSubState.LOSS:
            self.on_ack_increase(fb)
        self.update_pacing_rate(fb.bytes_in_flight)
        return reduced

    def accumulate_feedback(self, fb: CcaFeedback) -> None:
        st = self.state
        st.bytes_acked_interval += fb.acked_bytes
        st.bytes_marked_interval += fb.ce_delta * self.segment_size
        if st.bytes_marked_interval > st.bytes_acked_interval:
            st.bytes_marked_interval = st.bytes_acked_interval

    def update_alpha(self, now: SimTime) -> float:
        """
        alpha <- (1 - g) * alpha + g * F over the interval just closed.

        Intervals that closed while no ACK arrived carry F = 0 and are
        applied as well, one decay step each.
        """
        st = self.state
        st.alpha = (1.0 - st.g) * st.alpha + st.g * st.marked_fraction
        st.bytes_acked_interval = 0
        st.bytes_marked_interval = 0
        st.next_alpha_update += st.target_rtt
        if st.next_alpha_update <= now:
            missed = (now - st.next_alpha_update) // st.target_rtt + 1
            st.alpha *= (1.0 - st.g) ** missed
            st.next_alpha_update += missed * st.target_rtt
        st.alpha = min(max(st.alpha, 0.0), 1.0)
        return st.alpha

    def on_ce_reduction(self) -> float:
        st = self.state
        st.frac_cwnd = max(st.frac_cwnd * (1.0 - st.alpha / 2.0), MIN_FRAC_CWND)
        st.ssthresh = st.frac_cwnd
        self.ce_reductions += 1
        return st.frac_cwnd

    def enter_cwr(self, now: SimTime) -> bool:
        st = self.state
        if st.sub_state is not PragueSubState.OPEN:
            return False
        self.on_ce_reduction()
        st.sub_state = PragueSubState.CWR
        st.cwr_round_end = now + st.target_rtt
        return True

    def _classic_ecn_reduction(self, now: SimTime) -> bool:
        st = self.state
        if st.sub_state is not PragueSubState.OPEN:
            return False
        st.frac_cwnd = max(st.frac_cwnd * self.config.loss_beta, MIN_FRAC_CWND)
        st.ssthresh = st.frac_cwnd
        st.sub_state = PragueSubState.CWR
        round_length = int(st.hsrtt) if st.hsrtt else st.target_rtt
        st.cwr_round_end = now + round_length
        return True

    def effective_cwnd_bytes(self) -> int:
        segments = max(math.ceil(self.state.frac_cwnd), self.config.min_cwnd_segments)
        return segments * self.segment_size

    def on_ack_increase(self, fb: CcaFeedback) -> None:
        st = self.state
        acked_segments = fb.acked_segments(self.segment_size)
        if acked_segments <= 0:
            return
        if self.in_slow_start:
            st.frac_cwnd += acked_segments
        else:
            st.frac_cwnd += acked_segments / st.frac_cwnd

    def update_rtt_ewma(self, sample: SimTime) -> Optional[float]:
        st = self.state
        if sample <= 0:
            return st.hsrtt
        if st.hsrtt is None:
            st.hsrtt = float(sample)
        else:
            st.hsrtt += (sample - st.hsrtt) / self.config.rtt_ewma_weight
        return st.hsrtt

    def update_pacing_rate(self, bytes_in_flight: int) -> float:
        """gain * max(cwnd, in-flight) / srtt"""
        hsrtt = self.state.hsrtt
        if not hsrtt or hsrtt <= 0:
            return self._pacing_rate
        segments = max(
            self.effective_cwnd_bytes() // self.segment_size,
            math.ceil(bytes_in_flight / self.segment_size),
        )
        base = segments * self.segment_size * 8 * NS_PER_SECOND / hsrtt
        gain = self.config.ss_pacing_gain if self.in_slow_start else self.config.ca_pacing_gain
        self._pacing_rate = base * gain
        return self._pacing_rate

    def enter_loss(self, now: SimTime, recovery_point: int) -> None:
        st = self.state
        if st.sub_state is PragueSubState.LOSS:
            return
        st.frac_cwnd = max(st.frac_cwnd * self.config.loss_beta, MIN_FRAC_CWND)
        st.ssthresh = st.frac_cwnd
        st.sub_state = PragueSubState.LOSS

    def on_recovery_complete(self, now: SimTime) -> None:
        if self.state.sub_state is PragueSubState.LOSS:
            self.state.sub_state = PragueSubState.OPEN

    def on_retransmission_timeout(self, now: SimTime) -> None:
        st = self.state
        st.ssthresh = max(st.frac_cwnd / 2.0, float(self.config.min_cwnd_segments))
        st.frac_cwnd = MIN_FRAC_CWND
        st.sub_state = PragueSubState.OPEN
        st.bytes_acked_interval = 0
        st.bytes_marked_interval = 0

    @property
    def cwnd_bytes(self) -> int:
        return self.effective_cwnd_bytes()

    @property
    def ssthresh_bytes(self) -> Optional[int]:
        if math.isinf(self.state.ssthresh):
            return None
        return int(self.state.ssthresh * self.segment_size)

    @property
    def pacing_rate_bps(self) -> Optional[float]:
        return self._pacing_rate

    @property
    def alpha(self) -> float:
        return self.state.alpha

    def trace(self) -> Dict[str, float]:
        return {'alpha': self.state.alpha, 'pacing_rate': self._pacing_rate}
