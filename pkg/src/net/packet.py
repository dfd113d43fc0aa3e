"""
Packets, the IP-ECN codepoint and the TCP header with its 16-bit flag field.
"""

import struct
from dataclasses import dataclass
from enum import IntEnum, IntFlag

HEADER_OVERHEAD = 40   # IPv4 + TCP, no options
DEFAULT_MSS = 1460
DEFAULT_MTU = DEFAULT_MSS + HEADER_OVERHEAD

SEQ_MODULUS = 2 ** 32
_TCP_HEADER = struct.Struct('!HHIIHHHH')
_DATA_OFFSET_WORDS = 5
_FLAG_MASK = 0x1FF
_ACE_SHIFT = 6
_ACE_MASK = 0b111 << _ACE_SHIFT


class IpEcnCodepoint(IntEnum):
    """The 2-bit ECN field of the IP header"""
    NOT_ECT = 0b00
    ECT_1 = 0b01
    ECT_0 = 0b10
    CE = 0b11

    @property
    def is_ect(self) -> bool:
        return self is not IpEcnCodepoint.NOT_ECT

    def mark_ce(self) -> 'IpEcnCodepoint':
        """Rewrite to CE. Not-ECT traffic cannot be marked and must be dropped."""
        if self is IpEcnCodepoint.NOT_ECT:
            raise ValueError("Not-ECT packets cannot carry CE")
        return IpEcnCodepoint.CE


class TcpFlags(IntFlag):
    """TCP control bits, widened to 16 bits so AE fits above CWR"""
    NONE = 0
    FIN = 1
    SYN = 2
    RST = 4
    PSH = 8
    ACK = 16
    URG = 32
    ECE = 64
    CWR = 128
    AE = 256


def ace_value(flags: int) -> int:
    """The ACE field: AE·4 + CWR·2 + ECE."""
    return (flags >> _ACE_SHIFT) & 0b111


def with_ace(flags: int, value: int) -> int:
    """Write a 3-bit ACE value into AE/CWR/ECE, leaving other bits alone."""
    if not 0 <= value <= 7:
        raise ValueError(f"ACE value must be in [0, 7], got {value}")
    return (flags & ~_ACE_MASK) | (value << _ACE_SHIFT)


def describe_flags(flags: int) -> str:
    names = [f.name for f in TcpFlags if f and flags & f]
    return '|'.join(names) if names else 'NONE'


@dataclass(slots=True)
class TcpHeader:
    src_port: int
    dst_port: int
    seq: int = 0
    ack: int = 0
    flags: int = 0
    window: int = 65535

    def __post_init__(self):
        if self.flags & ~_FLAG_MASK:
            raise ValueError(f"flag bits above AE must be zero, got {self.flags:#x}")

    @property
    def ace(self) -> int:
        return ace_value(self.flags)

    def has(self, flag: TcpFlags) -> bool:
        return bool(self.flags & flag)

    def serialize(self) -> bytes:
        """20-byte wire form: data offset in the top 4 bits, flags in the low 12."""
        offset_and_flags = (_DATA_OFFSET_WORDS << 12) | self.flags
        return _TCP_HEADER.pack(
            self.src_port,
            self.dst_port,
            self.seq % SEQ_MODULUS,
            self.ack % SEQ_MODULUS,
            offset_and_flags,
            min(self.window, 0xFFFF),
            0,  # checksum
            0,  # urgent pointer
        )

    @classmethod
    def deserialize(cls, data: bytes) -> 'TcpHeader':
        if len(data) < _TCP_HEADER.size:
            raise ValueError(f"TCP header needs {_TCP_HEADER.size} bytes, got {len(data)}")
        src, dst, seq, ack, offset_and_flags, window, _, _ = _TCP_HEADER.unpack_from(data)
        return cls(
            src_port=src,
            dst_port=dst,
            seq=seq,
            ack=ack,
            flags=offset_and_flags & 0x0FFF,
            window=window,
        )


@dataclass(slots=True)
class Packet:
    """A simulated frame. Sequence numbers in `header` are unwrapped byte offsets."""
    payload_size: int
    header: TcpHeader
    ecn: IpEcnCodepoint
    flow_id: int
    src: int = 0
    dst: int = 0
    enqueue_time: int = 0
    uid: int = 0
    retransmission: bool = False

    @property
    def wire_size(self) -> int:
        return self.payload_size + HEADER_OVERHEAD

    @property
    def is_data(self) -> bool:
        return self.payload_size > 0
