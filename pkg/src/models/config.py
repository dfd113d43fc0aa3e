"""
Configuration models for scenarios and every simulated component
"""

from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..net.packet import DEFAULT_MSS, HEADER_OVERHEAD
from ..sim.units import SimTime, microseconds, milliseconds, seconds
from ..tcp.accecn import ACE_INITIAL_COUNT, EcnMode


class CcaType(str, Enum):
    """Congestion controllers a flow can run"""
    PRAGUE = "prague"
    CUBIC = "cubic"


class SchedulerType(str, Enum):
    """DualPI2 dequeue scheduler"""
    WRR = "wrr"
    TIMESHIFT = "timeshift"


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", validate_assignment=True)


class BottleneckConfig(_Section):
    """Dumbbell link parameters"""
    rate_mbps: float = Field(100.0, gt=0, description="Bottleneck rate in Mbit/s")
    delay_ms: float = Field(
        5.0, ge=0,
        description="Stated scenario delay; the base RTT when delay_is_rtt, else the one-way bottleneck delay"
    )
    delay_is_rtt: bool = Field(True, description="Interpret delay_ms as two-way base propagation delay")
    access_rate_mbps: float = Field(1000.0, gt=0, description="Access link rate in Mbit/s")
    access_delay_ms: float = Field(0.0, ge=0, description="Access link one-way delay")

    @property
    def rate_bps(self) -> int:
        return int(round(self.rate_mbps * 1_000_000))

    @property
    def access_rate_bps(self) -> int:
        return int(round(self.access_rate_mbps * 1_000_000))

    @property
    def delay(self) -> SimTime:
        return milliseconds(self.delay_ms)

    @property
    def access_delay(self) -> SimTime:
        return milliseconds(self.access_delay_ms)


class TcpConfig(_Section):
    """Socket-level TCP parameters"""
    segment_size: int = Field(DEFAULT_MSS, gt=0, le=9000, description="MSS in bytes")
    initial_cwnd_segments: int = Field(10, ge=1, description="Initial congestion window")
    ack_ratio: int = Field(1, ge=1, description="In-order segments per ACK (1 disables delayed ACKs)")
    delayed_ack_timeout_ms: float = Field(40.0, gt=0, description="Delayed-ACK timer when ack_ratio > 1")
    min_rto_ms: float = Field(200.0, gt=0, description="Retransmission timeout floor")
    initial_rto_ms: float = Field(1000.0, gt=0, description="RTO before the first RTT sample (also SYN timeout)")
    dupack_threshold: int = Field(3, ge=1, description="Duplicate ACKs that trigger fast retransmit")
    ace_initial_count: int = Field(
        ACE_INITIAL_COUNT, ge=0,
        description="CepS/CepR value at handshake completion"
    )

    @property
    def wire_segment_size(self) -> int:
        return self.segment_size + HEADER_OVERHEAD


class PragueConfig(_Section):
    """TCP Prague tunables"""
    g: float = Field(1 / 16, gt=0, le=1, description="Alpha EWMA gain")
    target_rtt_ms: float = Field(25.0, gt=0, description="Alpha update interval and CWR round length")
    initial_alpha: float = Field(1.0, ge=0, le=1, description="Alpha at connection start")
    loss_beta: float = Field(0.5, gt=0, lt=1, description="Window factor applied on loss")
    ca_pacing_gain: float = Field(1.2, gt=0, description="Pacing headroom in congestion avoidance")
    ss_pacing_gain: float = Field(2.0, gt=0, description="Pacing multiplier in slow start")
    rtt_ewma_weight: int = Field(128, ge=1, description="Divisor of the smoothed-RTT filter")
    min_cwnd_segments: int = Field(2, ge=1, description="Floor of the effective window")

    @property
    def target_rtt(self) -> SimTime:
        return milliseconds(self.target_rtt_ms)


class CubicConfig(_Section):
    """CUBIC tunables"""
    beta: float = Field(0.7, gt=0, lt=1, description="Multiplicative decrease factor")
    c: float = Field(0.4, gt=0, description="Cubic scaling constant")


class DualPi2Config(_Section):
    """DualQ coupled PI2 AQM, defaults follow the Linux sch_dualpi2 reference"""
    target_delay_ms: float = Field(15.0, gt=0, description="Classic queue delay target")
    t_update_ms: float = Field(16.0, gt=0, description="PI update period")
    pi_alpha: float = Field(0.16, ge=0, description="Integral gain, per second")
    pi_beta: float = Field(3.2, ge=0, description="Proportional gain, per second")
    k: float = Field(2.0, gt=0, description="Coupling factor")
    l_step_threshold_ms: float = Field(1.0, gt=0, description="L4S sojourn at which marking saturates")
    l_ramp_start_us: float = Field(475.0, ge=0, description="L4S sojourn where the marking ramp starts")
    limit_packets: int = Field(10_000, gt=0, description="Shared buffer size in MTU-sized packets")
    min_queue_mtus: float = Field(2.0, ge=0, description="No classic mark/drop at or below this many MTUs queued")
    l_step_min_queue_guard: bool = Field(True, description="Apply the minimum-queue guard to the L4S step too")
    scheduler: SchedulerType = Field(SchedulerType.WRR, description="Dequeue scheduler")
    wrr_l_weight: int = Field(1, ge=1, description="L4S packets served per classic packet while both queues are backlogged")
    c_protection_percent: Optional[float] = Field(
        None, gt=0, lt=100, description="Byte-credit classic share; replaces the packet WRR when set"
    )
    time_shift_ms: Optional[float] = Field(
        None, ge=0, description="L4S head-wait boost of the time-shifted scheduler, defaults to target_delay_ms"
    )
    mtu: int = Field(DEFAULT_MSS + HEADER_OVERHEAD, gt=0, description="MTU used to size limit and guard")

    @model_validator(mode='after')
    def _ramp_below_step(self) -> 'DualPi2Config':
        if self.l_ramp_start_us / 1000.0 > self.l_step_threshold_ms:
            raise ValueError("l_ramp_start_us must not exceed l_step_threshold_ms")
        return self

    @property
    def target_delay(self) -> SimTime:
        return milliseconds(self.target_delay_ms)

    @property
    def t_update(self) -> SimTime:
        return milliseconds(self.t_update_ms)

    @property
    def l_step_threshold(self) -> SimTime:
        return milliseconds(self.l_step_threshold_ms)

    @property
    def l_ramp_start(self) -> SimTime:
        return microseconds(self.l_ramp_start_us)

    @property
    def time_shift(self) -> SimTime:
        if self.time_shift_ms is None:
            return self.target_delay
        return milliseconds(self.time_shift_ms)

    @property
    def limit_bytes(self) -> int:
        return self.limit_packets * self.mtu

    @property
    def min_queue_bytes(self) -> int:
        return int(self.min_queue_mtus * self.mtu)


class MetricsConfig(_Section):
    """Time-series sampling and summary window"""
    sample_interval_ms: float = Field(100.0, gt=0, description="Bin width of every time series")
    warmup_s: float = Field(5.0, ge=0, description="Excluded from summary means")

    @property
    def sample_interval(self) -> SimTime:
        return milliseconds(self.sample_interval_ms)

    @property
    def warmup(self) -> SimTime:
        return seconds(self.warmup_s)


class FlowConfig(_Section):
    """One bulk-transfer flow from server `pair` to client `pair`"""
    name: str = Field(..., min_length=1, description="Flow label used in output file names")
    cca: CcaType = Field(..., description="Sender congestion controller")
    ecn: EcnMode = Field(EcnMode.ACC_ECN, description="ECN mode requested by the sender")
    receiver_ecn: EcnMode = Field(EcnMode.ACC_ECN, description="ECN capability of the receiver")
    pair: int = Field(0, ge=0, description="Dumbbell client/server pair carrying the flow")
    start_s: float = Field(0.0, ge=0, description="Connection start time")
    duration_s: Optional[float] = Field(None, gt=0, description="Sending time; None runs to the end")

    @field_validator('name')
    @classmethod
    def _safe_name(cls, v: str) -> str:
        if not all(ch.isalnum() or ch in '-_' for ch in v):
            raise ValueError("flow names may only contain letters, digits, '-' and '_'")
        return v


def _default_flows() -> List[FlowConfig]:
    return [
        FlowConfig(name="prague", cca=CcaType.PRAGUE, ecn=EcnMode.ACC_ECN, pair=0),
        FlowConfig(name="cubic", cca=CcaType.CUBIC, ecn=EcnMode.CLASSIC_ECN, pair=1),
    ]


class ScenarioConfig(_Section):
    """Complete description of one experiment"""
    name: str = Field("custom", min_length=1, description="Scenario label")
    description: str = Field("", description="Free-text description")
    duration_s: float = Field(60.0, gt=0, description="Simulated time per replication")
    seed: int = Field(1, ge=0, lt=2 ** 64, description="Global RNG seed, fixed across replications")
    run_count: int = Field(30, ge=1, description="Number of replications (run numbers 1..run_count)")
    output_dir: Optional[str] = Field(None, description="Artifact directory; defaults to results/<name>")
    bottleneck: BottleneckConfig = Field(default_factory=BottleneckConfig)
    aqm: DualPi2Config = Field(default_factory=DualPi2Config)
    tcp: TcpConfig = Field(default_factory=TcpConfig)
    prague: PragueConfig = Field(default_factory=PragueConfig)
    cubic: CubicConfig = Field(default_factory=CubicConfig)
    metrics: MetricsConfig = Field(default_factory=MetricsConfig)
    flows: List[FlowConfig] = Field(default_factory=_default_flows)

    @model_validator(mode='after')
    def _check_flows(self) -> 'ScenarioConfig':
        if not self.flows:
            raise ValueError("at least one flow is required")
        names = [flow.name for flow in self.flows]
        if len(set(names)) != len(names):
            raise ValueError(f"flow names must be unique: {names}")
        if self.metrics.warmup_s >= self.duration_s:
            raise ValueError("metrics warm-up must be shorter than the run duration")
        return self

    @property
    def pairs(self) -> int:
        return max(flow.pair for flow in self.flows) + 1

    @property
    def duration(self) -> SimTime:
        return seconds(self.duration_s)

    @property
    def resolved_output_dir(self) -> str:
        return self.output_dir or f"results/{self.name}"
