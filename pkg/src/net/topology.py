"""
Nodes and the two-pair dumbbell used by the coexistence experiments.

    client0 ──┐                              ┌── server0
              ├── left router ══════ right router ──┤
    client1 ──┘        bottleneck            └── server1

Data flows server → client. The bottleneck queue disc sits on the right
router's interface towards the left router; every other interface is a
drop-tail FIFO on a 1 Gbps, zero-delay access link.
"""

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Protocol

from .link import DropTailQueue, Link, QueueDisc
from .packet import DEFAULT_MTU, Packet
from ..sim.engine import Simulator
from ..sim.units import SimTime
from ..utils.logger import get_logger

logger = get_logger(__name__)

ACCESS_RATE_BPS = 1_000_000_000
ACCESS_DELAY = 0
ACCESS_QUEUE_BYTES = 10_000 * DEFAULT_MTU


class PacketReceiver(Protocol):
    def receive(self, pkt: Packet) -> None: ...


class Node:
    """Host or router. Routers forward by destination node id."""

    def __init__(self, node_id: int, name: str):
        self.node_id = node_id
        self.name = name
        self.routes: Dict[int, Link] = {}
        self.default_route: Optional[Link] = None
        self._ports: Dict[int, PacketReceiver] = {}

    def bind(self, port: int, endpoint: PacketReceiver) -> None:
        if port in self._ports:
            raise ValueError(f"port {port} already bound on {self.name}")
        self._ports[port] = endpoint

    def send(self, pkt: Packet) -> bool:
        link = self.routes.get(pkt.dst, self.default_route)
        if link is None:
            raise LookupError(f"{self.name} has no route to node {pkt.dst}")
        return link.send(pkt)

    def receive(self, pkt: Packet) -> None:
        if pkt.dst != self.node_id:
            self.send(pkt)
            return
        endpoint = self._ports.get(pkt.header.dst_port)
        if endpoint is None:
            logger.debug(f"{self.name}: no endpoint on port {pkt.header.dst_port}, dropping")
            return
        endpoint.receive(pkt)

    def __repr__(self) -> str:
        return f"Node({self.node_id}, {self.name})"


@dataclass
class DumbbellTopology:
    clients: List[Node]
    servers: List[Node]
    left_router: Node
    right_router: Node
    bottleneck: Link
    bottleneck_reverse: Link
    access_links: List[Link] = field(default_factory=list)
    bottleneck_one_way_delay: SimTime = 0
    access_delay: SimTime = 0

    @property
    def base_rtt(self) -> SimTime:
        """Round-trip propagation delay, serialization excluded."""
        # a round trip crosses two access links in each direction
        return 2 * self.bottleneck_one_way_delay + 4 * self.access_delay

    @property
    def links(self) -> List[Link]:
        return [self.bottleneck, self.bottleneck_reverse, *self.access_links]


def _connect(
    sim: Simulator,
    a: Node,
    b: Node,
    rate_bps: int,
    delay: SimTime,
    queue: QueueDisc,
) -> Link:
    link = Link(sim, f"{a.name}->{b.name}", rate_bps, delay, queue, b.receive)
    a.routes[b.node_id] = link
    return link


def build_dumbbell(
    sim: Simulator,
    bottleneck_rate: int,
    bottleneck_delay: SimTime,
    bottleneck_queue: QueueDisc,
    pairs: int = 2,
    delay_is_rtt: bool = True,
    access_rate: int = ACCESS_RATE_BPS,
    access_delay: SimTime = ACCESS_DELAY,
    queue_factory: Callable[[], QueueDisc] = lambda: DropTailQueue(ACCESS_QUEUE_BYTES),
) -> DumbbellTopology:
    """
    Wire the dumbbell.

    With `delay_is_rtt` the stated delay is the two-way base propagation
    delay and each bottleneck direction gets half of it; otherwise it is the
    one-way bottleneck delay.
    """
    if bottleneck_rate <= 0:
        raise ValueError(f"bottleneck rate must be positive, got {bottleneck_rate}")
    if bottleneck_delay < 0:
        raise ValueError(f"bottleneck delay must be non-negative, got {bottleneck_delay}")
    if pairs < 1:
        raise ValueError("a dumbbell needs at least one client/server pair")

    one_way = bottleneck_delay // 2 if delay_is_rtt else bottleneck_delay

    clients = [Node(i, f"client{i}") for i in range(pairs)]
    servers = [Node(pairs + i, f"server{i}") for i in range(pairs)]
    left = Node(2 * pairs, "left-router")
    right = Node(2 * pairs + 1, "right-router")

    forward = _connect(sim, right, left, bottleneck_rate, one_way, bottleneck_queue)
    reverse = _connect(sim, left, right, bottleneck_rate, one_way, queue_factory())

    access: List[Link] = []
    for client, server in zip(clients, servers):
        up = _connect(sim, client, left, access_rate, access_delay, queue_factory())
        down = _connect(sim, left, client, access_rate, access_delay, queue_factory())
        s_up = _connect(sim, server, right, access_rate, access_delay, queue_factory())
        s_down = _connect(sim, right, server, access_rate, access_delay, queue_factory())
        client.default_route = up
        server.default_route = s_up
        access.extend([up, down, s_up, s_down])

    for server in servers:
        left.routes[server.node_id] = reverse
    for client in clients:
        right.routes[client.node_id] = forward

    logger.debug(
        f"dumbbell: {pairs} pairs, bottleneck {bottleneck_rate} bps, one-way {one_way} ns"
    )

    return DumbbellTopology(
        clients=clients,
        servers=servers,
        left_router=left,
        right_router=right,
        bottleneck=forward,
        bottleneck_reverse=reverse,
        access_links=access,
        bottleneck_one_way_delay=one_way,
        access_delay=access_delay,
    )
