"""Pluggable congestion controllers"""

from .base import CcaFeedback, CongestionOps
from .cubic import CubicCongestionControl, CubicState
from .prague import PragueCongestionControl, PragueState, PragueSubState

__all__ = [
    'CcaFeedback',
    'CongestionOps',
    'CubicCongestionControl',
    'CubicState',
    'PragueCongestionControl',
    'PragueState',
    'PragueSubState',
]
