"""
Built-in scenarios: one Prague flow (AccECN, ECT(1)) against one Cubic
flow (classic ECN, ECT(0)) sharing a DualPI2 bottleneck for 60 s, 30
replications.
"""

from typing import Callable, Dict

from ..models.config import BottleneckConfig, ScenarioConfig
from ..utils.exceptions import ScenarioNotFoundException


def scenario1() -> ScenarioConfig:
    return ScenarioConfig(
        name="scenario1",
        description="100 Mbit/s, 5 ms base RTT, Prague vs Cubic",
        bottleneck=BottleneckConfig(rate_mbps=100.0, delay_ms=5.0),
    )


def scenario2() -> ScenarioConfig:
    return ScenarioConfig(
        name="scenario2",
        description="10 Mbit/s, 30 ms base RTT, Prague vs Cubic",
        bottleneck=BottleneckConfig(rate_mbps=10.0, delay_ms=30.0),
    )


PRESETS: Dict[str, Callable[[], ScenarioConfig]] = {
    'scenario1': scenario1,
    'scenario2': scenario2,
}


def get_preset(name: str) -> ScenarioConfig:
    """A fresh copy of a built-in scenario."""
    try:
        return PRESETS[name]()
    except KeyError:
        raise ScenarioNotFoundException(name) from None


def list_presets() -> Dict[str, str]:
    return {name: factory().description for name, factory in PRESETS.items()}
