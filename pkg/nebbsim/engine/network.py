"""
NEBBSIM Engine - Network assembly and the cycle loop body.

A Network owns the routers, one network interface per node, and the link
queues between them. Links are modelled as lists of arrivals keyed by the
cycle they land:

    flit in ST at t        -> next router's input at t + 2
    lookahead sent at t    -> next router's LA stage at t + 1
    NI sends at t          -> local input at t + 1
    ejection ST at t       -> delivered to the node at t + 2
"""

from collections import Counter, defaultdict, deque
from typing import Deque, Dict, List, Optional, Tuple

from nebbsim.analysis.metrics import MetricsCollector
from nebbsim.core.errors import InvariantViolation
from nebbsim.core.flit import Flit, PacketDescriptor, segment_packet
from nebbsim.core.lookahead import Lookahead
from nebbsim.core.mechanism import Mechanism
from nebbsim.core.ports import TRANSIT_PORTS
from nebbsim.diagnostics.report import ViolationKind
from nebbsim.logging import LogLevel, get_logger
from nebbsim.router.buffers import BufferOrganization
from nebbsim.router.credits import CreditLedger
from nebbsim.router.pipeline import Router, RouterParams
from nebbsim.topology.shape import NetworkShape

INJECTION_DELAY = 1
LINK_DELAY = 2
LOOKAHEAD_DELAY = 1
EJECTION_DELAY = 2


class NetworkInterface:
    """
    Source queue of one node and its injection link.

    Sends at most one flit per cycle into the local input port it is
    attached to, under the credits of that port.
    """

    def __init__(self, node: int, router: int, slot: int, params: RouterParams):
        self.node = node
        self.router = router
        self.slot = slot
        self.port = TRANSIT_PORTS + slot
        self.mechanism: Mechanism = params.mechanism
        self.ledger = CreditLedger(params.buffer, params.vc_count)
        self.queue: Deque[Flit] = deque()
        self.current_vc: Optional[int] = None

    @property
    def pending_flits(self) -> int:
        return len(self.queue)

    def enqueue(self, packet: PacketDescriptor) -> None:
        self.queue.extend(segment_packet(packet))

    def _choose_vc(self, packet: PacketDescriptor) -> Optional[int]:
        need = packet.size if self.mechanism.cut_through else 1
        best: Optional[Tuple[int, int]] = None
        for vc in range(self.ledger.vc_count):
            if self.mechanism.empty_vc and self.ledger.outstanding(vc) > 0:
                continue
            free = self.ledger.free(vc)
            if free >= need and (best is None or free > best[0]):
                best = (free, vc)
        return None if best is None else best[1]

    def step(self, cycle: int) -> Optional[Tuple[int, Flit]]:
        """Send the next queued flit if credits allow; returns (vc, flit)."""
        self.ledger.apply_returns(cycle)
        if not self.queue:
            return None
        flit = self.queue[0]
        packet = flit.packet
        if flit.is_head:
            vc = self._choose_vc(packet)
            if vc is None:
                return None
            whole = packet.size if self.mechanism.cut_through and packet.multi_flit else 0
            self.ledger.debit(vc, whole_packet=whole, packet_id=packet.id)
            self.current_vc = vc
        else:
            vc = self.current_vc
            if self.ledger.prepaid(vc) == 0 and self.ledger.free(vc) < 1:
                return None
            self.ledger.debit(vc, packet_id=packet.id)
        self.queue.popleft()
        flit.injection_cycle = cycle
        if flit.is_tail:
            self.current_vc = None
        return vc, flit


class Network:
    """Routers, interfaces and links of one simulated network."""

    def __init__(self, shape: NetworkShape, params: RouterParams, metrics: MetricsCollector):
        self.shape = shape
        self.params = params
        self.metrics = metrics
        self.log = get_logger("network")
        self.routers: List[Router] = [Router(r, shape, params, metrics) for r in range(shape.routers)]
        self.interfaces: List[NetworkInterface] = []
        for node in range(shape.nodes):
            router, slot = shape.attach(node)
            self.interfaces.append(NetworkInterface(node, router, slot, params))

        for router in self.routers:
            for in_port in router.inputs:
                if in_port >= TRANSIT_PORTS:
                    node = shape.node_at(router.id, in_port - TRANSIT_PORTS)
                    router.connect_upstream(in_port, self.interfaces[node].ledger)
                else:
                    upstream = shape.upstream(router.id, in_port)
                    router.connect_upstream(in_port, self.routers[upstream].ledgers[in_port ^ 1])

        self.cycle = 0
        self._flits: Dict[int, List[Tuple[int, int, int, Flit]]] = defaultdict(list)
        self._lookaheads: Dict[int, List[Tuple[int, Lookahead]]] = defaultdict(list)
        self._ejections: Dict[int, List[Tuple[int, int, Flit]]] = defaultdict(list)
        self.flits_injected = 0
        self.flits_ejected = 0
        self.completions: Dict[int, int] = {}  # packet id -> latency

    @property
    def buffer(self) -> BufferOrganization:
        return self.params.buffer

    # ═══════════════════════════════════════════════════════════════════════
    # TRAFFIC
    # ═══════════════════════════════════════════════════════════════════════

    def inject(self, packet: PacketDescriptor) -> None:
        """Queue a packet at its source node's interface."""
        self.interfaces[packet.source].enqueue(packet)
        self.metrics.record_generation(packet)

    def _eject(self, router: int, slot: int, flit: Flit, cycle: int) -> None:
        expected = self.shape.attach(flit.packet.destination)
        if expected != (router, slot):
            raise InvariantViolation(
                ViolationKind.FLIT_LOSS,
                f"{flit!r} for node {flit.packet.destination} ejected at router {router} slot {slot}",
                cycle=cycle,
                router=router,
            )
        self.flits_ejected += 1
        self.metrics.record_ejection(flit, cycle)
        if flit.is_tail:
            self.completions[flit.packet.id] = cycle - flit.packet.creation_cycle

    # ═══════════════════════════════════════════════════════════════════════
    # CYCLE
    # ═══════════════════════════════════════════════════════════════════════

    def step(self) -> int:
        """Advance one cycle; returns the number of crossbar traversals."""
        cycle = self.cycle
        for router, slot, flit in self._ejections.pop(cycle, []):
            self._eject(router, slot, flit, cycle)

        for ni in self.interfaces:
            try:
                sent = ni.step(cycle)
            except InvariantViolation as violation:
                violation.stamp(cycle, ni.router)
                raise
            if sent is not None:
                vc, flit = sent
                self._flits[cycle + INJECTION_DELAY].append((ni.router, ni.port, vc, flit))
                self.flits_injected += 1

        arrivals: Dict[int, List[Tuple[int, int, Flit]]] = defaultdict(list)
        for router, in_port, vc, flit in self._flits.pop(cycle, []):
            arrivals[router].append((in_port, vc, flit))
        lookaheads: Dict[int, List[Lookahead]] = defaultdict(list)
        for router, la in self._lookaheads.pop(cycle, []):
            lookaheads[router].append(la)

        traversals = 0
        for router in self.routers:
            out = router.step(cycle, arrivals.get(router.id, []), lookaheads.get(router.id, []))
            traversals += out.traversals
            for out_port, vc, flit in out.links:
                neighbor = self.shape.neighbor(router.id, out_port)
                self._flits[cycle + LINK_DELAY].append((neighbor, out_port ^ 1, vc, flit))
            for out_port, la in out.lookaheads:
                neighbor = self.shape.neighbor(router.id, out_port)
                self._lookaheads[cycle + LOOKAHEAD_DELAY].append((neighbor, la))
            for slot, flit in out.ejections:
                self._ejections[cycle + EJECTION_DELAY].append((router.id, slot, flit))

        if traversals and self.log.enabled(LogLevel.TRACE):
            self.log.trace("cycle", cycle, traversals=traversals, in_network=self.flits_in_network)
        self.cycle += 1
        return traversals

    # ═══════════════════════════════════════════════════════════════════════
    # VIEWS
    # ═══════════════════════════════════════════════════════════════════════

    def link_occupancy(self) -> Counter:
        """Flits on links, keyed by (router, in_port, vc) of their destination."""
        counts: Counter = Counter()
        for pending in self._flits.values():
            for router, in_port, vc, _ in pending:
                counts[(router, in_port, vc)] += 1
        return counts

    @property
    def flits_in_network(self) -> int:
        """Flits between injection and delivery, found by walking the state."""
        on_links = sum(len(v) for v in self._flits.values())
        ejecting = sum(len(v) for v in self._ejections.values())
        in_routers = sum(r.flits_held for r in self.routers)
        return on_links + ejecting + in_routers

    @property
    def queued_flits(self) -> int:
        """Flits generated but still waiting at their interface."""
        return sum(ni.pending_flits for ni in self.interfaces)

    @property
    def idle(self) -> bool:
        return self.flits_in_network == 0 and self.queued_flits == 0

    def sync_credit_views(self) -> None:
        """Set every ledger from the buffer it mirrors; used when state is installed by hand."""
        for router in self.routers:
            for out_port, ledger in router.ledgers.items():
                downstream = self.routers[self.shape.neighbor(router.id, out_port)]
                buf = downstream.inputs[out_port ^ 1]
                ledger.consumed = buf.occupancies()
                ledger.reserved = [0] * ledger.vc_count
                ledger.streaming = [None] * ledger.vc_count
                ledger.pending.clear()
        for ni in self.interfaces:
            buf = self.routers[ni.router].inputs[ni.port]
            ni.ledger.consumed = buf.occupancies()
            ni.ledger.reserved = [0] * ni.ledger.vc_count
            ni.ledger.streaming = [None] * ni.ledger.vc_count
            ni.ledger.pending.clear()
