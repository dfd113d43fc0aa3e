"""
TCP endpoints for one bulk-transfer flow.

`TcpSender` is the data source and active opener; `TcpReceiver` is the
sink. The sender owns the transmission control block: handshake, ACK
bookkeeping, pacing, NewReno fast retransmit without SACK and the RFC 6298
retransmission timer. ACE decoding happens here so the congestion
controller only ever sees a `CcaFeedback`.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, List, Optional, Tuple

from .accecn import (
    AceCounters,
    ClassicEcnEcho,
    EcnMode,
    accept_syn,
    decode_ace_delta,
    decode_synack_reflection,
    make_syn_flags,
    receiver_on_data,
    resolve_negotiation,
)
from .congestion.base import CcaFeedback, CongestionOps
from ..models.config import TcpConfig
from ..net.packet import IpEcnCodepoint, Packet, TcpFlags, TcpHeader, with_ace
from ..net.topology import Node
from ..sim.engine import EventHandle, Simulator
from ..sim.units import SimTime, milliseconds, seconds, transmission_time
from ..utils.logger import get_logger, get_structured_logger

logger = get_logger(__name__)
events = get_structured_logger(__name__)

MAX_RTO = seconds(60)
SYN_MAX_RETRIES = 6
ISN = 0

_SYN = int(TcpFlags.SYN)
_ACK = int(TcpFlags.ACK)
_ECE = int(TcpFlags.ECE)
_CWR = int(TcpFlags.CWR)


class ConnState(str, Enum):
    CLOSED = "closed"
    LISTEN = "listen"
    HANDSHAKE = "handshake"
    ESTABLISHED = "established"
    RECOVERY = "recovery"


@dataclass
class SocketState:
    """Sender-side transmission control block."""
    segment_size: int
    cwnd: int = 0
    ssthresh: Optional[int] = None
    bytes_in_flight: int = 0
    pacing_rate: float = 0.0
    srtt: Optional[SimTime] = None
    rttvar: Optional[SimTime] = None
    latest_rtt: Optional[SimTime] = None
    rto: SimTime = 0
    ecn_mode: EcnMode = EcnMode.OFF
    ace: AceCounters = field(default_factory=AceCounters)
    conn_state: ConnState = ConnState.CLOSED


@dataclass
class SenderCounters:
    segments_sent: int = 0
    retransmissions: int = 0
    fast_retransmits: int = 0
    timeouts: int = 0
    ce_feedback: int = 0
    bytes_acked: int = 0


AckListener = Callable[['TcpSender', SimTime], None]


class TcpSender:
    """Bulk data source: always has data until `stop_time`."""

    def __init__(
        self,
        sim: Simulator,
        node: Node,
        local_port: int,
        peer_node: int,
        peer_port: int,
        cca: CongestionOps,
        requested_ecn: EcnMode,
        config: Optional[TcpConfig] = None,
        flow_id: int = 0,
        stop_time: Optional[SimTime] = None,
    ):
        self.sim = sim
        self.node = node
        self.local_port = local_port
        self.peer_node = peer_node
        self.peer_port = peer_port
        self.cca = cca
        self.requested_ecn = requested_ecn
        self.config = config or TcpConfig()
        self.flow_id = flow_id
        self.stop_time = stop_time

        self.segment_size = self.config.segment_size
        self.min_rto = milliseconds(self.config.min_rto_ms)
        self.state = SocketState(
            segment_size=self.segment_size,
            rto=milliseconds(self.config.initial_rto_ms),
        )
        self.counters = SenderCounters()
        self.ack_listeners: List[AckListener] = []
        self.synack_reflection: Optional[IpEcnCodepoint] = None

        self.snd_una = ISN + 1
        self.snd_nxt = ISN + 1
        self._high_water = ISN + 1
        self._recover = ISN + 1
        self.dupacks = 0
        # seq -> (send time, was retransmitted)
        self._sent: Dict[int, Tuple[SimTime, bool]] = {}
        self._syn_flags = 0
        self._syn_sent_at: SimTime = 0
        self._syn_retries = 0
        self._rto_timer: Optional[EventHandle] = None
        self._pacing_timer: Optional[EventHandle] = None
        self._next_send_time: SimTime = 0
        self._cwr_pending = False
        self._uid = 0

        node.bind(local_port, self)

    # ------------------------------------------------------------------
    # handshake

    def do_handshake(self) -> None:
        """Send the SYN; negotiation completes when the SYN/ACK arrives."""
        if self.state.conn_state is not ConnState.CLOSED:
            raise RuntimeError(f"flow {self.flow_id}: handshake already started")
        self.state.conn_state = ConnState.HANDSHAKE
        self._syn_flags = make_syn_flags(self.requested_ecn)
        self._send_syn()

    def _send_syn(self) -> None:
        self._syn_sent_at = self.sim.now
        self._emit(TcpHeader(self.local_port, self.peer_port, seq=ISN, flags=self._syn_flags), 0)
        timeout = min(self.state.rto << self._syn_retries, MAX_RTO)
        self._rto_timer = self.sim.schedule(timeout, self._on_syn_timeout)

    def _on_syn_timeout(self) -> None:
        if self.state.conn_state is not ConnState.HANDSHAKE:
            return
        self._syn_retries += 1
        if self._syn_retries > SYN_MAX_RETRIES:
            logger.warning(f"flow {self.flow_id}: handshake abandoned after {SYN_MAX_RETRIES} retries")
            self.state.conn_state = ConnState.CLOSED
            return
        logger.debug(f"flow {self.flow_id}: SYN timeout, retry {self._syn_retries}")
        self._send_syn()

    def _on_synack(self, hdr: TcpHeader) -> None:
        if self._rto_timer is not None:
            self._rto_timer.cancel()
            self._rto_timer = None
        now = self.sim.now
        mode = resolve_negotiation(self._syn_flags, hdr.flags)
        self.state.ecn_mode = mode
        self.state.ace = AceCounters.at_handshake(self.config.ace_initial_count)
        if mode is EcnMode.ACC_ECN:
            self.synack_reflection = decode_synack_reflection(hdr.flags)

        # Karn: no sample from a retransmitted SYN
        rtt = now - self._syn_sent_at if self._syn_retries == 0 else None
        if rtt is not None:
            self._update_rtt(rtt)
        self.state.conn_state = ConnState.ESTABLISHED
        self.cca.on_connection_established(now, mode, rtt)
        self._sync_state()

        events.log_handshake(
            flow_id=self.flow_id,
            requested=self.requested_ecn.value,
            negotiated=mode.value,
            synack_reflection=self.synack_reflection.name if self.synack_reflection is not None else None,
        )
        self._emit(TcpHeader(self.local_port, self.peer_port, seq=self.snd_nxt, ack=1, flags=_ACK), 0)
        self.send_available()

    # ------------------------------------------------------------------
    # receive path

    def receive(self, pkt: Packet) -> None:
        hdr = pkt.header
        conn = self.state.conn_state
        if conn is ConnState.HANDSHAKE:
            if hdr.flags & _SYN and hdr.flags & _ACK:
                self._on_synack(hdr)
            return
        if hdr.flags & _SYN:
            return
        if conn in (ConnState.ESTABLISHED, ConnState.RECOVERY) and hdr.flags & _ACK:
            self.on_ack(hdr)

    def _ce_delta(self, hdr: TcpHeader, newly_acked_segments: int) -> int:
        mode = self.state.ecn_mode
        if mode is EcnMode.ACC_ECN:
            return decode_ace_delta(hdr.ace, self.state.ace, newly_acked_segments)
        if mode is EcnMode.CLASSIC_ECN:
            return 1 if hdr.flags & _ECE else 0
        return 0

    def on_ack(self, hdr: TcpHeader) -> None:
        now = self.sim.now
        ack = hdr.ack
        if ack < self.snd_una or ack > self._high_water:
            logger.debug(
                f"flow {self.flow_id}: ignoring ack {ack} outside [{self.snd_una}, {self._high_water}]"
            )
            return

        if ack > self.snd_una:
            fb = self._on_new_ack(ack, hdr, now)
        elif self.snd_nxt > self.snd_una:
            fb = self._on_duplicate_ack(hdr, now)
        else:
            return

        self.counters.ce_feedback += fb.ce_delta
        fb.bytes_in_flight = self.bytes_in_flight
        reduced = self.cca.on_ack(fb, now)
        if reduced and self.state.ecn_mode is EcnMode.CLASSIC_ECN:
            self._cwr_pending = True
        self._sync_state()
        for listener in self.ack_listeners:
            listener(self, now)
        self.send_available()

    def _on_new_ack(self, ack: int, hdr: TcpHeader, now: SimTime) -> CcaFeedback:
        acked = ack - self.snd_una
        if ack > self.snd_nxt:
            # the receiver already held data we went back over after an RTO
            self.snd_nxt = ack
        segments = math.ceil(acked / self.segment_size)
        ce_delta = self._ce_delta(hdr, segments)

        rtt_sample = self._take_rtt_sample(ack, now)
        if rtt_sample is not None:
            self._update_rtt(rtt_sample)

        self.snd_una = ack
        self.counters.bytes_acked += acked

        if self.state.conn_state is ConnState.RECOVERY:
            if ack >= self._recover:
                self.dupacks = 0
                self.state.conn_state = ConnState.ESTABLISHED
                self.cca.on_recovery_complete(now)
            else:
                # partial ack: the next hole is lost too
                self.dupacks = 0
                self._retransmit(self.snd_una)
        else:
            self.dupacks = 0

        self.state.rto = self._computed_rto()
        if self.snd_una == self.snd_nxt:
            self._cancel_rto()
        else:
            self._restart_rto()

        return CcaFeedback(
            acked_bytes=acked,
            ce_delta=ce_delta,
            rtt_sample=rtt_sample,
            snd_una=self.snd_una,
            snd_nxt=self.snd_nxt,
        )

    def _on_duplicate_ack(self, hdr: TcpHeader, now: SimTime) -> CcaFeedback:
        ce_delta = self._ce_delta(hdr, 0)
        self.dupacks += 1
        loss = False
        if (
            self.dupacks == self.config.dupack_threshold
            and self.state.conn_state is ConnState.ESTABLISHED
            and self.snd_una >= self._recover
        ):
            loss = True
            self._recover = self.snd_nxt
            self.state.conn_state = ConnState.RECOVERY
            self.counters.fast_retransmits += 1
            self.cca.enter_loss(now, self.snd_nxt)
            self._retransmit(self.snd_una)
        return CcaFeedback(
            acked_bytes=0,
            ce_delta=ce_delta,
            is_loss_event=loss,
            snd_una=self.snd_una,
            snd_nxt=self.snd_nxt,
        )

    # ------------------------------------------------------------------
    # RTT and retransmission timer

    def _take_rtt_sample(self, ack: int, now: SimTime) -> Optional[SimTime]:
        covered = [s for s in self._sent if s < ack]
        if not covered:
            return None
        sent_at, retransmitted = self._sent[max(covered)]
        for seq in covered:
            del self._sent[seq]
        if retransmitted:
            return None
        return now - sent_at

    def _update_rtt(self, sample: SimTime) -> None:
        st = self.state
        st.latest_rtt = sample
        if st.srtt is None:
            st.srtt = sample
            st.rttvar = sample // 2
        else:
            st.rttvar = (3 * st.rttvar + abs(st.srtt - sample)) // 4
            st.srtt = (7 * st.srtt + sample) // 8
        st.rto = self._computed_rto()

    def _computed_rto(self) -> SimTime:
        st = self.state
        if st.srtt is None:
            return milliseconds(self.config.initial_rto_ms)
        return min(max(st.srtt + 4 * st.rttvar, self.min_rto), MAX_RTO)

    def _restart_rto(self) -> None:
        self._cancel_rto()
        self._rto_timer = self.sim.schedule(self.state.rto, self.on_retransmission_timeout)

    def _cancel_rto(self) -> None:
        if self._rto_timer is not None:
            self._rto_timer.cancel()
            self._rto_timer = None

    def on_retransmission_timeout(self) -> None:
        """Go back to snd_una with a one-segment window."""
        self._rto_timer = None
        if self.snd_una == self.snd_nxt:
            return
        now = self.sim.now
        self.counters.timeouts += 1
        logger.debug(f"flow {self.flow_id}: RTO at {now} ns, snd_una={self.snd_una}")
        self.cca.on_retransmission_timeout(now)
        self.dupacks = 0
        self._recover = self.snd_nxt
        self.state.conn_state = ConnState.ESTABLISHED
        self.snd_nxt = self.snd_una
        self._sent.clear()
        self.state.rto = min(self.state.rto * 2, MAX_RTO)
        self._next_send_time = now
        self._sync_state()
        self._send_segment(force=True)
        self._rto_timer = self.sim.schedule(self.state.rto, self.on_retransmission_timeout)

    # ------------------------------------------------------------------
    # send path

    @property
    def bytes_in_flight(self) -> int:
        return max(self.snd_nxt - self.snd_una - self.dupacks * self.segment_size, 0)

    @property
    def has_data(self) -> bool:
        return self.stop_time is None or self.sim.now < self.stop_time

    def data_codepoint(self) -> IpEcnCodepoint:
        mode = self.state.ecn_mode
        if mode is EcnMode.ACC_ECN and self.cca.scalable:
            return IpEcnCodepoint.ECT_1
        if mode in (EcnMode.ACC_ECN, EcnMode.CLASSIC_ECN):
            return IpEcnCodepoint.ECT_0
        return IpEcnCodepoint.NOT_ECT

    def send_available(self) -> int:
        """Send while window and pacing allow; returns segments sent."""
        if self.state.conn_state not in (ConnState.ESTABLISHED, ConnState.RECOVERY):
            return 0
        sent = 0
        while self._may_send_new():
            now = self.sim.now
            if self.cca.paced and now < self._next_send_time:
                self._arm_pacing_timer()
                break
            self._send_segment()
            sent += 1
        return sent

    def _may_send_new(self) -> bool:
        if self.snd_nxt >= self._high_water and not self.has_data:
            return False
        return self.bytes_in_flight + self.segment_size <= self.cca.cwnd_bytes

    def _arm_pacing_timer(self) -> None:
        if self._pacing_timer is not None and self._pacing_timer.pending:
            return
        self._pacing_timer = self.sim.schedule_at(self._next_send_time, self._on_pacing_timer)

    def _on_pacing_timer(self) -> None:
        self._pacing_timer = None
        self.send_available()

    def _send_segment(self, force: bool = False) -> None:
        seq = self.snd_nxt
        retransmission = seq < self._high_water
        flags = _ACK
        if self._cwr_pending and not retransmission:
            flags |= _CWR
            self._cwr_pending = False
        self._sent[seq] = (self.sim.now, retransmission)
        self._transmit(seq, flags, retransmission)
        self.snd_nxt += self.segment_size
        self._high_water = max(self._high_water, self.snd_nxt)
        if self._rto_timer is None and not force:
            self._restart_rto()

    def _retransmit(self, seq: int) -> None:
        self._sent[seq] = (self.sim.now, True)
        self._transmit(seq, _ACK, True)

    def _transmit(self, seq: int, flags: int, retransmission: bool) -> None:
        hdr = TcpHeader(self.local_port, self.peer_port, seq=seq, ack=1, flags=flags)
        pkt = self._emit(hdr, self.segment_size, self.data_codepoint(), retransmission)
        self.counters.segments_sent += 1
        if retransmission:
            self.counters.retransmissions += 1
        rate = self.cca.pacing_rate_bps
        if self.cca.paced and rate:
            self._next_send_time = self.sim.now + transmission_time(pkt.wire_size, rate)

    def _emit(
        self,
        hdr: TcpHeader,
        payload: int,
        ecn: IpEcnCodepoint = IpEcnCodepoint.NOT_ECT,
        retransmission: bool = False,
    ) -> Packet:
        self._uid += 1
        pkt = Packet(
            payload_size=payload,
            header=hdr,
            ecn=ecn,
            flow_id=self.flow_id,
            src=self.node.node_id,
            dst=self.peer_node,
            uid=self._uid,
            retransmission=retransmission,
        )
        self.node.send(pkt)
        return pkt

    def _sync_state(self) -> None:
        st = self.state
        st.cwnd = self.cca.cwnd_bytes
        st.ssthresh = self.cca.ssthresh_bytes
        st.bytes_in_flight = self.bytes_in_flight
        st.pacing_rate = self.cca.pacing_rate_bps or 0.0


DeliveryListener = Callable[[int, SimTime], None]
MarkListener = Callable[[SimTime], None]


class TcpReceiver:
    """Data sink: cumulative ACKs, out-of-order buffering, ECN feedback."""

    def __init__(
        self,
        sim: Simulator,
        node: Node,
        local_port: int,
        capability: EcnMode,
        config: Optional[TcpConfig] = None,
        flow_id: int = 0,
    ):
        self.sim = sim
        self.node = node
        self.local_port = local_port
        self.capability = capability
        self.config = config or TcpConfig()
        self.flow_id = flow_id

        self.conn_state = ConnState.LISTEN
        self.ecn_mode = EcnMode.OFF
        self.ace = AceCounters.at_handshake(self.config.ace_initial_count)
        self.classic_echo = ClassicEcnEcho()
        self.rcv_nxt = ISN + 1
        self.bytes_delivered = 0
        self.ce_received = 0
        self.delivery_listeners: List[DeliveryListener] = []
        self.mark_listeners: List[MarkListener] = []

        self._peer_node: Optional[int] = None
        self._peer_port: Optional[int] = None
        self._synack_flags = 0
        self._out_of_order: Dict[int, int] = {}
        self._pending_acks = 0
        self._delack_timer: Optional[EventHandle] = None
        self._delack_timeout = milliseconds(self.config.delayed_ack_timeout_ms)
        self._uid = 0

        node.bind(local_port, self)

    def receive(self, pkt: Packet) -> None:
        hdr = pkt.header
        if hdr.flags & _SYN:
            self._on_syn(pkt)
            return
        if self.conn_state is ConnState.LISTEN:
            return
        if self.conn_state is ConnState.HANDSHAKE:
            self.conn_state = ConnState.ESTABLISHED
        if pkt.payload_size > 0:
            self._on_data(pkt)

    def _on_syn(self, pkt: Packet) -> None:
        if self.conn_state is ConnState.LISTEN:
            self._peer_node = pkt.src
            self._peer_port = pkt.header.src_port
            self._synack_flags, self.ecn_mode = accept_syn(pkt.header.flags, pkt.ecn, self.capability)
            self.conn_state = ConnState.HANDSHAKE
        # a retransmitted SYN gets the same answer
        self._emit(self._synack_flags, ack=ISN + 1, seq=ISN)

    def _on_data(self, pkt: Packet) -> None:
        hdr = pkt.header
        now = self.sim.now
        ce = pkt.ecn == IpEcnCodepoint.CE
        if ce:
            self.ce_received += 1
            for listener in self.mark_listeners:
                listener(now)
        if self.ecn_mode is EcnMode.ACC_ECN:
            receiver_on_data(pkt.ecn, self.ace)
        elif self.ecn_mode is EcnMode.CLASSIC_ECN:
            self.classic_echo.on_data(pkt.ecn, bool(hdr.flags & _CWR))

        seq = hdr.seq
        if seq == self.rcv_nxt:
            filled_hole = bool(self._out_of_order)
            self._advance(seq + pkt.payload_size, now)
            self._pending_acks += 1
            if filled_hole or ce or self._pending_acks >= self.config.ack_ratio:
                self.send_ack()
            else:
                self._arm_delayed_ack()
        elif seq > self.rcv_nxt:
            self._out_of_order.setdefault(seq, pkt.payload_size)
            self.send_ack()
        else:
            self.send_ack()

    def _advance(self, new_nxt: int, now: SimTime) -> None:
        start = self.rcv_nxt
        self.rcv_nxt = new_nxt
        while self.rcv_nxt in self._out_of_order:
            self.rcv_nxt += self._out_of_order.pop(self.rcv_nxt)
        for seq in [s for s in self._out_of_order if s < self.rcv_nxt]:
            del self._out_of_order[seq]
        delivered = self.rcv_nxt - start
        self.bytes_delivered += delivered
        for listener in self.delivery_listeners:
            listener(delivered, now)

    def _arm_delayed_ack(self) -> None:
        if self._delack_timer is None or not self._delack_timer.pending:
            self._delack_timer = self.sim.schedule(self._delack_timeout, self._on_delack_timer)

    def _on_delack_timer(self) -> None:
        self._delack_timer = None
        if self._pending_acks:
            self.send_ack()

    def ack_flags(self) -> int:
        flags = _ACK
        if self.ecn_mode is EcnMode.ACC_ECN:
            flags = with_ace(flags, self.ace.cep_r % 8)
        elif self.ecn_mode is EcnMode.CLASSIC_ECN and self.classic_echo.ece_latched:
            flags |= _ECE
        return int(flags)

    def send_ack(self) -> None:
        self._pending_acks = 0
        if self._delack_timer is not None:
            self._delack_timer.cancel()
            self._delack_timer = None
        self._emit(self.ack_flags(), ack=self.rcv_nxt, seq=ISN + 1)

    def _emit(self, flags: int, ack: int, seq: int) -> None:
        self._uid += 1
        hdr = TcpHeader(self.local_port, self._peer_port, seq=seq, ack=ack, flags=flags)
        pkt = Packet(
            payload_size=0,
            header=hdr,
            ecn=IpEcnCodepoint.NOT_ECT,
            flow_id=self.flow_id,
            src=self.node.node_id,
            dst=self._peer_node,
            uid=self._uid,
        )
        self.node.send(pkt)
