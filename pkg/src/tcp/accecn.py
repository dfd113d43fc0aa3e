"""
Accurate ECN: handshake negotiation and the ACE counter codec.

The ACE field is the 3-bit value (AE, CWR, ECE). During the handshake the
three flags carry capability requests and, on an AccECN SYN/ACK, a
reflection of the IP-ECN codepoint the server saw on the SYN. Afterwards
they carry the receiver's CE packet counter modulo 8.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

from ..net.packet import IpEcnCodepoint, TcpFlags

ACE_INITIAL_COUNT = 5
ACE_MODULUS = 8

_SYN = int(TcpFlags.SYN)
_ACK = int(TcpFlags.ACK)
_ECE = int(TcpFlags.ECE)
_CWR = int(TcpFlags.CWR)
_AE = int(TcpFlags.AE)
_ACE_BITS = _AE | _CWR | _ECE


class EcnMode(str, Enum):
    """ECN feedback mode of a connection, fixed once the handshake completes"""
    OFF = "off"
    CLASSIC_ECN = "classic_ecn"
    ACC_ECN = "acc_ecn"


# SYN/ACK reflection of the received SYN's IP-ECN field, as (AE, CWR, ECE)
_SYNACK_REFLECTION = {
    IpEcnCodepoint.NOT_ECT: _CWR,
    IpEcnCodepoint.ECT_1: _CWR | _ECE,
    IpEcnCodepoint.ECT_0: _AE,
    IpEcnCodepoint.CE: _AE | _CWR,
}
_REFLECTION_TO_CODEPOINT = {bits: codepoint for codepoint, bits in _SYNACK_REFLECTION.items()}


@dataclass(slots=True)
class AceCounters:
    """
    CE packet counters. `cep_s` is the sender's view, `cep_r` the receiver's
    count and `delta` the marks learned from the most recent ACK.
    """
    cep_s: int = ACE_INITIAL_COUNT
    cep_r: int = ACE_INITIAL_COUNT
    delta: int = 0

    @classmethod
    def at_handshake(cls, initial: int = ACE_INITIAL_COUNT) -> 'AceCounters':
        return cls(cep_s=initial, cep_r=initial, delta=0)


def make_syn_flags(requesting: EcnMode) -> int:
    """Flags for the active opener's SYN."""
    if requesting is EcnMode.ACC_ECN:
        return _SYN | _AE | _CWR | _ECE
    if requesting is EcnMode.CLASSIC_ECN:
        return _SYN | _CWR | _ECE
    return _SYN


def encode_synack_feedback(received_syn_ip_ecn: IpEcnCodepoint) -> int:
    """AE/CWR/ECE bits an AccECN server sets on its SYN/ACK."""
    return _SYNACK_REFLECTION[IpEcnCodepoint(received_syn_ip_ecn)]


def decode_synack_reflection(synack_flags: int) -> Optional[IpEcnCodepoint]:
    """Codepoint the server reported for our SYN, None for a non-AccECN reply."""
    return _REFLECTION_TO_CODEPOINT.get(synack_flags & _ACE_BITS)


def _is_accecn_request(syn_flags: int) -> bool:
    return syn_flags & _ACE_BITS == _ACE_BITS


def _is_ecn_request(syn_flags: int) -> bool:
    return syn_flags & (_CWR | _ECE) == (_CWR | _ECE)


def accept_syn(
    syn_flags: int,
    syn_ip_ecn: IpEcnCodepoint,
    server_capability: EcnMode,
) -> Tuple[int, EcnMode]:
    """
    Passive side of the negotiation: SYN/ACK flags and the server's mode.

    A legacy (classic ECN) server does not know AE and answers any SYN
    carrying CWR+ECE with a plain ECN-setup SYN/ACK.
    """
    synack = _SYN | _ACK
    if server_capability is EcnMode.ACC_ECN:
        if _is_accecn_request(syn_flags):
            return synack | encode_synack_feedback(syn_ip_ecn), EcnMode.ACC_ECN
        if _is_ecn_request(syn_flags):
            return synack | _ECE, EcnMode.CLASSIC_ECN
    elif server_capability is EcnMode.CLASSIC_ECN:
        if _is_ecn_request(syn_flags):
            return synack | _ECE, EcnMode.CLASSIC_ECN
    return synack, EcnMode.OFF


def resolve_negotiation(syn_flags: int, synack_flags: int) -> EcnMode:
    """Active side: the mode implied by what we asked for and what came back."""
    reply = synack_flags & _ACE_BITS
    if _is_accecn_request(syn_flags):
        if reply in _REFLECTION_TO_CODEPOINT:
            return EcnMode.ACC_ECN
        if reply == _ECE:
            return EcnMode.CLASSIC_ECN
        return EcnMode.OFF
    if _is_ecn_request(syn_flags):
        return EcnMode.CLASSIC_ECN if reply == _ECE else EcnMode.OFF
    return EcnMode.OFF


def receiver_on_data(pkt_ecn: IpEcnCodepoint, counters: AceCounters) -> int:
    """Count a CE arrival; returns the ACE value for the next ACK."""
    if pkt_ecn == IpEcnCodepoint.CE:
        counters.cep_r += 1
    return counters.cep_r % ACE_MODULUS


def ace_delta(ace_field: int, cep_s: int, newly_acked_segments: int) -> int:
    """
    New CE marks implied by an ACE value.

    The modular difference is exact while fewer than 8 marks separate two
    ACKs. Once an ACK covers 8 or more segments the counter may have wrapped,
    so the largest count consistent with both the ACE value and the segment
    count is assumed.
    """
    delta = (ace_field + ACE_MODULUS - (cep_s % ACE_MODULUS)) % ACE_MODULUS
    n = newly_acked_segments
    if n >= ACE_MODULUS:
        delta = n - ((n - delta) % ACE_MODULUS)
    return delta


def decode_ace_delta(ace_field: int, counters: AceCounters, newly_acked_segments: int) -> int:
    """Sender-side decode: updates cep_s and delta and returns delta."""
    if not 0 <= ace_field < ACE_MODULUS:
        raise ValueError(f"ACE field must be in [0, 7], got {ace_field}")
    if newly_acked_segments < 0:
        raise ValueError("newly acked segment count must be non-negative")
    delta = ace_delta(ace_field, counters.cep_s, newly_acked_segments)
    counters.cep_s += delta
    counters.delta = delta
    return delta


class ClassicEcnEcho:
    """
    RFC 3168 receiver echo, simplified: a CE arrival latches ECE on every
    ACK until a data segment carrying CWR shows the sender has reacted.
    """

    __slots__ = ('ece_latched', 'ce_received')

    def __init__(self):
        self.ece_latched = False
        self.ce_received = 0

    def on_data(self, pkt_ecn: IpEcnCodepoint, cwr_seen: bool) -> bool:
        if cwr_seen:
            self.ece_latched = False
        if pkt_ecn == IpEcnCodepoint.CE:
            self.ce_received += 1
            self.ece_latched = True
        return self.ece_latched
