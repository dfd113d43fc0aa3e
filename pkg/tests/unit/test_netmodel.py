"""
Unit tests for packets, links and the dumbbell topology
"""

import pytest

from src.net.link import DropTailQueue, Link, link_transmit
from src.net.packet import (
    HEADER_OVERHEAD,
    IpEcnCodepoint,
    TcpFlags,
    TcpHeader,
    ace_value,
    with_ace,
)
from src.net.topology import build_dumbbell
from src.sim.units import milliseconds


def test_ace_value_examples():
    """ACE is AE*4 + CWR*2 + ECE"""
    assert ace_value(TcpFlags.AE | TcpFlags.ECE) == 5
    assert ace_value(TcpFlags.ACK) == 0
    assert ace_value(TcpFlags.AE | TcpFlags.CWR | TcpFlags.ECE) == 7


def test_with_ace_leaves_other_bits():
    """Writing ACE only touches AE/CWR/ECE"""
    flags = with_ace(int(TcpFlags.ACK | TcpFlags.ECE), 6)
    assert flags & TcpFlags.ACK
    assert ace_value(flags) == 6
    with pytest.raises(ValueError):
        with_ace(0, 8)


def test_header_round_trips_every_flag_combination():
    """serialize/deserialize is the identity over the 9 flag bits"""
    for flags in range(2 ** 9):
        hdr = TcpHeader(5000, 5001, seq=123456, ack=654321, flags=flags, window=1000)
        assert TcpHeader.deserialize(hdr.serialize()) == hdr


def test_header_rejects_bits_above_ae():
    """Bits above AE must stay zero"""
    with pytest.raises(ValueError):
        TcpHeader(1, 2, flags=512)


def test_sequence_numbers_wrap_on_the_wire():
    """Unwrapped offsets serialize modulo 2^32"""
    hdr = TcpHeader(1, 2, seq=2 ** 32 + 5)
    assert TcpHeader.deserialize(hdr.serialize()).seq == 5


def test_codepoint_marking():
    """ECT codepoints become CE; Not-ECT cannot be marked"""
    assert IpEcnCodepoint.ECT_1.mark_ce() is IpEcnCodepoint.CE
    assert IpEcnCodepoint.ECT_0.mark_ce() is IpEcnCodepoint.CE
    assert IpEcnCodepoint.CE.mark_ce() is IpEcnCodepoint.CE
    with pytest.raises(ValueError):
        IpEcnCodepoint.NOT_ECT.mark_ce()


def test_wire_size_adds_header(make_packet):
    """Wire size is payload plus 40 bytes"""
    assert make_packet(payload=1460).wire_size == 1500
    assert make_packet(payload=0).wire_size == HEADER_OVERHEAD


@pytest.mark.parametrize("payload,rate,delay,expected", [
    (1460, 10_000_000, milliseconds(30), milliseconds(31.2)),
    (1460, 100_000_000, milliseconds(5), milliseconds(5.12)),
    (0, 1_000_000_000, 0, 320),
])
def test_link_transmit_delivery_time(sim, make_packet, payload, rate, delay, expected):
    """Delivery time is serialization plus propagation"""
    delivered = []
    link = Link(sim, "l", rate, delay, DropTailQueue(), lambda p: delivered.append(sim.now))
    assert link_transmit(link, make_packet(payload=payload)) == expected
    sim.run_until(expected)
    assert delivered == [expected]


def test_link_is_fifo_and_serializes_one_at_a_time(sim, make_packet):
    """Back-to-back packets leave in order, spaced by serialization time"""
    arrivals = []
    link = Link(sim, "l", 10_000_000, milliseconds(30), DropTailQueue(),
                lambda p: arrivals.append((p.header.seq, sim.now)))
    for seq in (1, 1461, 2921):
        link.send(make_packet(seq=seq))
    sim.run_until(milliseconds(100))
    assert [seq for seq, _ in arrivals] == [1, 1461, 2921]
    gaps = [b[1] - a[1] for a, b in zip(arrivals, arrivals[1:])]
    assert gaps == [milliseconds(1.2), milliseconds(1.2)]
    assert link.packets_transmitted == 3


def test_droptail_overflow(make_packet):
    """A full drop-tail queue rejects the arriving packet"""
    queue = DropTailQueue(limit_bytes=3000)
    drops = []
    queue.add_drop_listener(lambda pkt, reason: drops.append(reason))
    assert queue.enqueue(make_packet(), 0)
    assert queue.enqueue(make_packet(), 0)
    assert not queue.enqueue(make_packet(), 0)
    assert drops == ['overflow']
    assert len(queue) == 2


def test_dumbbell_wiring(sim):
    """Bottleneck sits on the right router facing the left router"""
    bottleneck_queue = DropTailQueue()
    topo = build_dumbbell(sim, 100_000_000, milliseconds(5), bottleneck_queue)
    assert len(topo.clients) == 2
    assert len(topo.servers) == 2
    assert topo.bottleneck.queue is bottleneck_queue
    assert topo.right_router.routes[topo.clients[0].node_id] is topo.bottleneck
    assert topo.left_router.routes[topo.servers[1].node_id] is topo.bottleneck_reverse
    assert all(link.rate_bps == 1_000_000_000 for link in topo.access_links)
    assert all(link.propagation_delay == 0 for link in topo.access_links)


def test_dumbbell_delay_interpretation(sim):
    """The stated delay is the base RTT by default, one-way otherwise"""
    as_rtt = build_dumbbell(sim, 10_000_000, milliseconds(30), DropTailQueue())
    assert as_rtt.bottleneck.propagation_delay == milliseconds(15)
    assert as_rtt.base_rtt == milliseconds(30)

    one_way = build_dumbbell(sim, 10_000_000, milliseconds(30), DropTailQueue(), delay_is_rtt=False)
    assert one_way.base_rtt == 2 * milliseconds(30)


def test_dumbbell_rejects_bad_rate(sim):
    """Rate must be positive"""
    with pytest.raises(ValueError):
        build_dumbbell(sim, 0, milliseconds(5), DropTailQueue())


def test_packet_crosses_the_dumbbell(sim, make_packet):
    """A server->client packet is routed through the bottleneck to the bound endpoint"""
    topo = build_dumbbell(sim, 100_000_000, milliseconds(5), DropTailQueue())
    received = []

    class Sink:
        def receive(self, pkt):
            received.append(sim.now)

    client = topo.clients[0]
    client.bind(5000, Sink())
    pkt = make_packet()
    pkt.src = topo.servers[0].node_id
    pkt.dst = client.node_id
    topo.servers[0].send(pkt)
    sim.run_until(milliseconds(50))
    assert len(received) == 1
    # two 1 Gbit/s hops, the 100 Mbit/s bottleneck and 2.5 ms propagation
    assert received[0] == 2 * 12_000 + 120_000 + milliseconds(2.5)
    assert topo.bottleneck.packets_transmitted == 1
