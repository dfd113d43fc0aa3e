"""Data models"""

from .config import (
    BottleneckConfig,
    CcaType,
    CubicConfig,
    DualPi2Config,
    FlowConfig,
    MetricsConfig,
    PragueConfig,
    ScenarioConfig,
    SchedulerType,
    TcpConfig,
)
from .results import Aggregate, FlowSummary, MetricAggregate, QueueSummary, RunSummary

__all__ = [
    'BottleneckConfig',
    'CcaType',
    'CubicConfig',
    'DualPi2Config',
    'FlowConfig',
    'MetricsConfig',
    'PragueConfig',
    'ScenarioConfig',
    'SchedulerType',
    'TcpConfig',
    'Aggregate',
    'FlowSummary',
    'MetricAggregate',
    'QueueSummary',
    'RunSummary',
]
