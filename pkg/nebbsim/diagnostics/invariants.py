"""
NEBBSIM Diagnostics - Per-cycle state checkers.

Each checker reads network state and returns ViolationRecords; none of them
mutates anything. They are duck-typed against the engine's Network and
Router so this package stays below the router and engine layers:

    network.routers, network.interfaces, network.shape,
    network.link_occupancy(), network.flits_injected, network.flits_ejected,
    network.flits_in_network
    router.id, router.inputs, router.ledgers, router.latched, router.setups,
    router.locked
"""

from collections import Counter
from typing import Any, Iterable, List, Optional

from nebbsim.diagnostics.report import ViolationKind, ViolationRecord


def _record(cycle: int, router: Optional[int], kind: ViolationKind, detail: str) -> ViolationRecord:
    return ViolationRecord(cycle=cycle, router=router, kind=kind, detail=detail)


# ═══════════════════════════════════════════════════════════════════════════
# NO INTERLEAVING
# ═══════════════════════════════════════════════════════════════════════════

def scan_queue(flits: Iterable[Any]) -> Optional[str]:
    """
    Check that a VC queue holds whole packets in order.

    The first flit may be a body or tail of a packet whose head already
    left; after that a new packet may only start once the previous one's
    tail has been seen. Returns a description of the first offence.
    """
    current: Optional[int] = None
    last_seq = -1
    for position, flit in enumerate(flits):
        packet = flit.packet
        if flit.is_head:
            if current is not None:
                return f"head of packet {packet.id} behind unfinished packet {current} at slot {position}"
            current = None if flit.is_tail else packet.id
            last_seq = 0
            continue
        if current is None:
            if position != 0:
                return f"{flit!r} at slot {position} has no head ahead of it"
            current = packet.id
            last_seq = flit.seq - 1
        if packet.id != current:
            return f"{flit!r} at slot {position} inside packet {current}"
        if flit.seq != last_seq + 1:
            return f"{flit!r} at slot {position} out of order (expected seq {last_seq + 1})"
        last_seq = flit.seq
        if flit.is_tail:
            current = None
    return None


def check_interleaving(router: Any, cycle: int) -> List[ViolationRecord]:
    records = []
    for in_port in sorted(router.inputs):
        buf = router.inputs[in_port]
        for vc, queue in enumerate(buf.queues):
            problem = scan_queue(queue)
            if problem is not None:
                records.append(_record(cycle, router.id, ViolationKind.INTERLEAVING,
                                       f"input {in_port} vc{vc}: {problem}"))
    return records


# ═══════════════════════════════════════════════════════════════════════════
# CONSERVATION
# ═══════════════════════════════════════════════════════════════════════════

def check_credit_conservation(network: Any, cycle: int) -> List[ViolationRecord]:
    """
    Every outstanding credit of a ledger is backed by exactly one flit:
    queued downstream, on the link, latched for ST upstream, or about to
    arrive upstream on a bypass setup.
    """
    records = []
    in_flight = network.link_occupancy()
    for router in network.routers:
        latched = Counter((f.out_port, f.out_vc) for f in router.latched)
        setups = Counter((s.out_port, s.out_vc) for s in router.setups.values())
        for out_port in sorted(router.ledgers):
            ledger = router.ledgers[out_port]
            downstream = network.shape.neighbor(router.id, out_port)
            buf = network.routers[downstream].inputs[out_port ^ 1]
            for vc in range(ledger.vc_count):
                claimed = ledger.consumed[vc] - ledger.reserved[vc] - ledger.pending_returns(vc)
                backed = (buf.occupancy(vc) + in_flight[(downstream, out_port ^ 1, vc)]
                          + latched[(out_port, vc)] + setups[(out_port, vc)])
                if claimed != backed:
                    records.append(_record(
                        cycle, router.id,
                        ViolationKind.CREDIT_NEGATIVE if claimed < backed else ViolationKind.CREDIT_OVERFLOW,
                        f"output {out_port} vc{vc}: ledger claims {claimed} flits, {backed} found",
                    ))

    for ni in network.interfaces:
        ledger = ni.ledger
        buf = network.routers[ni.router].inputs[ni.port]
        for vc in range(ledger.vc_count):
            claimed = ledger.consumed[vc] - ledger.reserved[vc] - ledger.pending_returns(vc)
            backed = buf.occupancy(vc) + in_flight[(ni.router, ni.port, vc)]
            if claimed != backed:
                records.append(_record(
                    cycle, ni.router,
                    ViolationKind.CREDIT_NEGATIVE if claimed < backed else ViolationKind.CREDIT_OVERFLOW,
                    f"injection port of node {ni.node} vc{vc}: ledger claims {claimed} flits, {backed} found",
                ))
    return records


def check_flit_conservation(network: Any, cycle: int) -> List[ViolationRecord]:
    expected = network.flits_injected - network.flits_ejected
    found = network.flits_in_network
    if expected == found:
        return []
    return [_record(cycle, None, ViolationKind.FLIT_LOSS,
                    f"{network.flits_injected} injected, {network.flits_ejected} ejected, "
                    f"{found} in the network (expected {expected})")]


# ═══════════════════════════════════════════════════════════════════════════
# LOCKS
# ═══════════════════════════════════════════════════════════════════════════

def check_lock_exclusivity(router: Any, cycle: int) -> List[ViolationRecord]:
    """
    A locked output carries exactly one VCT bypass, the lock holder's, and a
    packet holds at most one output.
    """
    records = []
    holders = Counter(router.locked.values())
    for packet_id, outputs in holders.items():
        if outputs > 1:
            records.append(_record(cycle, router.id, ViolationKind.HYBRID_LOCK,
                                   f"packet {packet_id} holds {outputs} outputs"))
    for out_port, packet_id in sorted(router.locked.items()):
        claims = sorted(
            state.active_packet.id for buf in router.inputs.values() for state in buf.vc_states
            if state.active and state.out_port == out_port and state.bypass_mode.value == "VCT"
        )
        if claims != [packet_id]:
            records.append(_record(cycle, router.id, ViolationKind.HYBRID_LOCK,
                                   f"output {out_port} locked by packet {packet_id} "
                                   f"with VCT bypasses of packets {claims} in progress"))
    return records


def check_invariants(network: Any, cycle: int) -> List[ViolationRecord]:
    """Run every checker; violations are returned, never raised."""
    records: List[ViolationRecord] = []
    for router in network.routers:
        records.extend(check_interleaving(router, cycle))
        records.extend(check_lock_exclusivity(router, cycle))
    records.extend(check_credit_conservation(network, cycle))
    records.extend(check_flit_conservation(network, cycle))
    return records
