"""
Result models produced by a replication and by cross-run aggregation
"""

from typing import Dict, List, Optional

from pydantic import BaseModel, Field


class FlowSummary(BaseModel):
    """Steady-state figures for one flow (warm-up excluded)"""
    name: str = Field(..., description="Flow label")
    cca: str = Field(..., description="Congestion controller")
    ecn_mode: str = Field(..., description="Negotiated ECN mode")
    mean_throughput_bps: float = Field(..., ge=0, description="Delivered application bits per second")
    mean_rtt_s: Optional[float] = Field(None, description="Mean sender srtt sampled per ACK")
    ce_marks: int = Field(0, ge=0, description="CE-marked data packets seen by the receiver, whole run")
    ce_marks_per_s: float = Field(0.0, ge=0, description="CE marks per second in steady state")
    retransmissions: int = Field(0, ge=0, description="Retransmitted segments")
    timeouts: int = Field(0, ge=0, description="Retransmission timeouts")


class QueueSummary(BaseModel):
    """Steady-state figures for one DualPI2 queue"""
    kind: str = Field(..., description="l4s or classic")
    mean_sojourn_s: Optional[float] = Field(None, description="Mean per-packet sojourn")
    dequeued: int = Field(0, ge=0)
    marked: int = Field(0, ge=0)
    dropped: int = Field(0, ge=0, description="AQM drops plus buffer overflow drops")


class RunSummary(BaseModel):
    """Everything summary.csv reports for one replication"""
    run_number: int = Field(..., ge=1)
    flows: List[FlowSummary] = Field(default_factory=list)
    queues: List[QueueSummary] = Field(default_factory=list)
    jain_index: float = Field(..., ge=0, le=1)
    mean_p_prime: Optional[float] = Field(None, description="Mean PI2 base probability in steady state")

    def metrics(self) -> Dict[str, float]:
        """Flat metric name -> value mapping, the columns of summary.csv."""
        values: Dict[str, float] = {'jain_index': self.jain_index}
        for flow in self.flows:
            values[f"{flow.name}.throughput_mbps"] = flow.mean_throughput_bps / 1e6
            if flow.mean_rtt_s is not None:
                values[f"{flow.name}.rtt_ms"] = flow.mean_rtt_s * 1e3
            values[f"{flow.name}.ce_marks_per_s"] = flow.ce_marks_per_s
            values[f"{flow.name}.retransmissions"] = float(flow.retransmissions)
        for queue in self.queues:
            if queue.mean_sojourn_s is not None:
                values[f"{queue.kind}.sojourn_ms"] = queue.mean_sojourn_s * 1e3
            values[f"{queue.kind}.marked"] = float(queue.marked)
            values[f"{queue.kind}.dropped"] = float(queue.dropped)
        if self.mean_p_prime is not None:
            values['p_prime'] = self.mean_p_prime
        return dict(sorted(values.items()))


class MetricAggregate(BaseModel):
    mean: float
    ci95: Optional[float] = Field(None, ge=0, description="Student-t half-width, None below two runs")
    n: int = Field(..., ge=1)


class Aggregate(BaseModel):
    """Per-metric mean and 95% confidence half-width across replications"""
    run_count: int = Field(..., ge=1)
    metrics: Dict[str, MetricAggregate] = Field(default_factory=dict)
