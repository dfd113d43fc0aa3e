"""
Interface between the TCP socket and a congestion controller.

The socket decodes every header field itself and hands the controller a
`CcaFeedback` record; controllers never see raw TCP flags.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Dict, Optional

from ..accecn import EcnMode
from ...sim.units import SimTime


@dataclass(slots=True)
class CcaFeedback:
    """What one ACK taught the sender."""
    acked_bytes: int
    ce_delta: int = 0
    rtt_sample: Optional[SimTime] = None
    is_loss_event: bool = False
    bytes_in_flight: int = 0
    snd_una: int = 0
    snd_nxt: int = 0

    def acked_segments(self, segment_size: int) -> float:
        return self.acked_bytes / segment_size


class CongestionOps(ABC):
    """Base class for pluggable controllers, one instance per socket."""

    name = "base"
    # a scalable controller sends ECT(1) when AccECN was negotiated
    scalable = False
    paced = False

    def __init__(self, segment_size: int, initial_cwnd_segments: int):
        if segment_size <= 0:
            raise ValueError("segment_size must be positive")
        if initial_cwnd_segments < 1:
            raise ValueError("initial window must be at least one segment")
        self.segment_size = segment_size
        self.initial_cwnd_segments = initial_cwnd_segments
        self.ecn_mode = EcnMode.OFF

    def on_connection_established(self, now: SimTime, ecn_mode: EcnMode, rtt: Optional[SimTime]) -> None:
        self.ecn_mode = ecn_mode

    @abstractmethod
    def on_ack(self, fb: CcaFeedback, now: SimTime) -> bool:
        """Process one ACK; True when the window was reduced in response to ECN."""

    @abstractmethod
    def enter_loss(self, now: SimTime, recovery_point: int) -> None:
        """Fast retransmit started a loss recovery episode."""

    def on_recovery_complete(self, now: SimTime) -> None:
        pass

    @abstractmethod
    def on_retransmission_timeout(self, now: SimTime) -> None:
        """RTO fired: collapse to one segment and restart slow start."""

    @property
    @abstractmethod
    def cwnd_bytes(self) -> int:
        """Effective window the socket may fill, in bytes."""

    @property
    @abstractmethod
    def ssthresh_bytes(self) -> Optional[int]:
        """None while ssthresh is still infinite."""

    @property
    def pacing_rate_bps(self) -> Optional[float]:
        """Pacing rate in bits/s, None for an ACK-clocked controller."""
        return None

    def trace(self) -> Dict[str, float]:
        """Controller-specific values exported as time series."""
        return {}
