"""TCP endpoints, Accurate ECN and the pluggable congestion controllers"""

from .accecn import (
    ACE_INITIAL_COUNT,
    AceCounters,
    ClassicEcnEcho,
    EcnMode,
    accept_syn,
    decode_ace_delta,
    make_syn_flags,
    resolve_negotiation,
)

__all__ = [
    'ACE_INITIAL_COUNT',
    'AceCounters',
    'ClassicEcnEcho',
    'EcnMode',
    'accept_syn',
    'decode_ace_delta',
    'make_syn_flags',
    'resolve_negotiation',
]
