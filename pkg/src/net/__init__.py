"""Packets, links and the dumbbell topology"""

from .link import DropTailQueue, Link, QueueDisc, link_transmit
from .packet import (
    DEFAULT_MSS,
    DEFAULT_MTU,
    HEADER_OVERHEAD,
    IpEcnCodepoint,
    Packet,
    TcpFlags,
    TcpHeader,
    ace_value,
    with_ace,
)
from .topology import DumbbellTopology, Node, build_dumbbell

__all__ = [
    'DropTailQueue',
    'Link',
    'QueueDisc',
    'link_transmit',
    'DEFAULT_MSS',
    'DEFAULT_MTU',
    'HEADER_OVERHEAD',
    'IpEcnCodepoint',
    'Packet',
    'TcpFlags',
    'TcpHeader',
    'ace_value',
    'with_ace',
    'DumbbellTopology',
    'Node',
    'build_dumbbell',
]
