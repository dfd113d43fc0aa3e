"""Active queue management for the bottleneck interface"""

from .dualpi2 import (
    AqmAction,
    DualPi2Queue,
    DualQueueState,
    ProbabilitySample,
    QueueKind,
    QueueStats,
)

__all__ = [
    'AqmAction',
    'DualPi2Queue',
    'DualQueueState',
    'ProbabilitySample',
    'QueueKind',
    'QueueStats',
]
