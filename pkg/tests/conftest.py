"""
Pytest configuration and fixtures
"""

import pytest

from src.models.config import (
    BottleneckConfig,
    CcaType,
    FlowConfig,
    MetricsConfig,
    ScenarioConfig,
)
from src.net.packet import IpEcnCodepoint, Packet, TcpFlags, TcpHeader
from src.sim.engine import Simulator
from src.tcp.accecn import EcnMode


@pytest.fixture(autouse=True)
def quiet_logs(monkeypatch):
    """Keep test output readable"""
    monkeypatch.setenv('LOG_LEVEL', 'WARNING')


@pytest.fixture
def sim():
    """Fresh simulator at t=0"""
    return Simulator(seed=42, run_number=1)


@pytest.fixture
def make_packet():
    """Factory for data packets with a given codepoint and payload"""

    def _make(ecn=IpEcnCodepoint.ECT_1, payload=1460, seq=1, flow_id=0, flags=int(TcpFlags.ACK)):
        return Packet(
            payload_size=payload,
            header=TcpHeader(5000, 5000, seq=seq, ack=1, flags=flags),
            ecn=ecn,
            flow_id=flow_id,
        )

    return _make


@pytest.fixture
def short_scenario(tmp_path):
    """Scenario 1 topology shrunk to a few simulated seconds"""
    return ScenarioConfig(
        name="short",
        duration_s=3.0,
        seed=7,
        run_count=2,
        output_dir=str(tmp_path / "short"),
        bottleneck=BottleneckConfig(rate_mbps=20.0, delay_ms=5.0),
        metrics=MetricsConfig(sample_interval_ms=100.0, warmup_s=1.0),
        flows=[
            FlowConfig(name="prague", cca=CcaType.PRAGUE, ecn=EcnMode.ACC_ECN, pair=0),
            FlowConfig(name="cubic", cca=CcaType.CUBIC, ecn=EcnMode.CLASSIC_ECN, pair=1),
        ],
    )


@pytest.fixture
def scenario_text():
    """A complete scenario file"""
    return """
    # two flows over a 10 Mbit/s bottleneck
    [scenario]
    name = filetest
    duration_s = 2
    seed = 3
    run_count = 1

    [bottleneck]
    rate_mbps = 10
    delay_ms = 30

    [aqm]
    scheduler = timeshift

    [metrics]
    warmup_s = 0.5

    [flow.l4s]
    cca = prague
    ecn = acc_ecn
    pair = 0

    [flow.classic]
    cca = cubic
    ecn = classic_ecn ; legacy sender
    pair = 1
    """
