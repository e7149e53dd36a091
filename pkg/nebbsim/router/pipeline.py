"""
NEBBSIM Router - The per-cycle router state machine.

Stage order inside one cycle:

    1. credit returns applied
    2. arrivals: flits with a matching bypass setup go straight to ST,
       the rest are written into their input VC (BW)
    3. ST: last cycle's SA winners and this cycle's bypassing flits cross
       the crossbar; a lookahead is generated for every flit leaving on a
       transit port (LA-G)
    4. LA stage: lookaheads received this cycle are checked against the
       bypass conditions and arbitrated; the winners are tentative
    5. VA for buffered heads
    6. SA (input arbiter, then output arbiters), gated by flow control and
       by the lookahead/flit priority
    7. surviving lookahead winners commit: VC activity, ownership, locks,
       credit debits, bypass setup for next cycle's arrival
    8. SA grants commit: pop, credit return upstream, debit, latch for ST

A bypassed hop costs 2 cycles (ST | LT), a buffered hop 4 (BW | VA+SA | ST | LT).
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Set, Tuple

from nebbsim.analysis.metrics import HopCategory, MetricsCollector
from nebbsim.core.errors import ConfigurationError, InvariantViolation
from nebbsim.core.flit import Flit
from nebbsim.core.lookahead import LaPriority, Lookahead, make_lookahead
from nebbsim.core.mechanism import LaMode, Mechanism
from nebbsim.core.ports import TRANSIT_PORTS, is_local_port, port_dimension, port_label
from nebbsim.diagnostics.report import ViolationKind
from nebbsim.logging import LogLevel, get_logger
from nebbsim.router.arbiters import (
    LaArbitration,
    MatrixState,
    RoundRobinState,
    SaInputMode,
    SaInputState,
    la_arbitrate,
    matrix_grant,
    sa_input_select,
    sa_report,
    switch_allocate,
    vc_allocate,
)
from nebbsim.router.buffers import BufferOrganization, BypassMode, InputBuffer, VcState, VcStatus
from nebbsim.router.credits import CreditLedger
from nebbsim.router.flow_control import (
    BypassDecision,
    DeadlockRule,
    ForwardContext,
    bypass_eligible,
    can_forward_standard,
    classify_hop,
    deadlock_condition,
    debit_credits,
)
from nebbsim.topology.routing import (
    crosses_dateline,
    dateline_vc,
    dor_route,
    lookahead_route,
    vc_class,
)
from nebbsim.topology.shape import NetworkShape

# Ejection ports are unbounded sinks.
SINK_FREE = 1 << 20


class LaPriorityMode(Enum):
    """Who wins when a lookahead and a buffered flit want the same port."""
    LOOKAHEADS = "la"
    FLITS = "flit"

    @classmethod
    def parse(cls, text: str) -> "LaPriorityMode":
        wanted = text.strip().lower()
        for mode in cls:
            if wanted in (mode.value, mode.name.lower()):
                return mode
        raise ConfigurationError(f"unknown lookahead priority {text!r} (la or flit)")


@dataclass(frozen=True)
class RouterParams:
    mechanism: Mechanism
    vc_count: int
    buffer: BufferOrganization
    deadlock_rule: DeadlockRule = DeadlockRule.NONE
    la_priority: LaPriorityMode = LaPriorityMode.LOOKAHEADS
    la_threshold: Optional[int] = None
    sa_mode: SaInputMode = SaInputMode.DEMOTE_ON_STALL
    max_packet_size: int = 1
    unsafe_multiflit_bypass: bool = False  # test hook: NEBB-WH ignores occupancy


@dataclass(frozen=True)
class BypassSetup:
    """Crossbar configuration made by a winning lookahead for next cycle."""
    packet_id: int
    seq: int
    in_vc: int
    out_port: int
    out_vc: int
    mode: BypassMode


@dataclass
class LatchedFlit:
    flit: Flit
    in_port: int
    out_port: int
    out_vc: int
    mode: BypassMode = BypassMode.NONE


@dataclass
class RouterOutput:
    """What one router cycle hands to the links."""
    links: List[Tuple[int, int, Flit]] = field(default_factory=list)       # (out_port, vc, flit)
    lookaheads: List[Tuple[int, Lookahead]] = field(default_factory=list)  # (out_port, la)
    ejections: List[Tuple[int, Flit]] = field(default_factory=list)        # (slot, flit)
    traversals: int = 0


@dataclass
class _LaEval:
    la: Lookahead
    decision: BypassDecision
    ctx: Optional[ForwardContext] = None


class Router:
    """One lookahead bypass router."""

    def __init__(
        self,
        router_id: int,
        shape: NetworkShape,
        params: RouterParams,
        metrics: MetricsCollector,
    ):
        self.id = router_id
        self.shape = shape
        self.params = params
        self.metrics = metrics
        self.log = get_logger("router")
        vcs = params.vc_count
        ports = shape.ports

        self.inputs: Dict[int, InputBuffer] = {
            p: InputBuffer(params.buffer, vcs) for p in shape.input_ports(router_id)
        }
        self.outputs: List[int] = shape.output_ports(router_id)
        transit = [p for p in self.outputs if not is_local_port(p)]
        self.ledgers: Dict[int, CreditLedger] = {p: CreditLedger(params.buffer, vcs) for p in transit}
        self.out_owner: Dict[int, List[Optional[int]]] = {p: [None] * vcs for p in transit}
        self.upstream_ledgers: Dict[int, CreditLedger] = {}

        self.sa_inputs = {p: SaInputState(vcs, params.sa_mode) for p in self.inputs}
        self.sa_outputs = {p: MatrixState(ports) for p in self.outputs}
        self.la_matrices = {p: MatrixState(ports) for p in self.outputs}
        self.va_arbiters = {p: RoundRobinState(ports * vcs) for p in self.outputs}

        self.locked: Dict[int, int] = {}  # out_port -> packet id
        self.latched: List[LatchedFlit] = []
        self.setups: Dict[int, BypassSetup] = {}  # in_port -> setup for next cycle
        self._trace = False

    # ═══════════════════════════════════════════════════════════════════════
    # WIRING AND VIEWS
    # ═══════════════════════════════════════════════════════════════════════

    def connect_upstream(self, in_port: int, ledger: CreditLedger) -> None:
        """Ledger that mirrors input `in_port`; credits for it are returned there."""
        self.upstream_ledgers[in_port] = ledger

    @property
    def buffered_flits(self) -> int:
        return sum(buf.total_occupancy for buf in self.inputs.values())

    @property
    def flits_held(self) -> int:
        return self.buffered_flits + len(self.latched)

    def _return_credit(self, in_port: int, vc: int, cycle: int) -> None:
        ledger = self.upstream_ledgers.get(in_port)
        if ledger is not None:
            ledger.return_credit(vc, cycle)

    # ═══════════════════════════════════════════════════════════════════════
    # CYCLE
    # ═══════════════════════════════════════════════════════════════════════

    def step(
        self,
        cycle: int,
        arrivals: List[Tuple[int, int, Flit]],
        lookaheads: List[Lookahead],
    ) -> RouterOutput:
        try:
            return self._step(cycle, arrivals, lookaheads)
        except InvariantViolation as violation:
            violation.stamp(cycle, self.id)
            raise

    def _step(self, cycle, arrivals, lookaheads) -> RouterOutput:
        self._trace = self.log.enabled(LogLevel.TRACE)
        out = RouterOutput()

        for ledger in self.ledgers.values():
            ledger.apply_returns(cycle)

        bypassing = self._arrivals(cycle, arrivals)

        traversing = self.latched + bypassing
        self.latched = []
        for latched in traversing:
            self._traverse(latched, cycle, out)

        arbitration, evals = self._lookahead_stage(cycle, lookaheads)
        self._vc_allocation(cycle, arbitration)
        grants = self._switch_allocation(cycle, arbitration)
        self._commit_lookaheads(cycle, arbitration, evals)
        self._commit_grants(cycle, grants)
        return out

    # ── stage 2: arrivals ────────────────────────────────────────────────

    def _arrivals(self, cycle: int, arrivals: List[Tuple[int, int, Flit]]) -> List[LatchedFlit]:
        bypassing: List[LatchedFlit] = []
        for in_port, vc, flit in sorted(arrivals, key=lambda a: a[0]):
            self.metrics.count(self.id, cycle, "received")
            setup = self.setups.pop(in_port, None)
            if (setup is not None and setup.packet_id == flit.packet.id
                    and setup.seq == flit.seq and setup.in_vc == vc):
                flit.record_hop(self.id, was_buffered=False)
                self._return_credit(in_port, vc, cycle)
                bypassing.append(LatchedFlit(flit, in_port, setup.out_port, setup.out_vc, setup.mode))
                continue
            if setup is not None:
                self.log.warning("bypass_setup_mismatch", cycle, router=self.id,
                                 port=port_label(in_port), flit=repr(flit))
            self.inputs[in_port].push(vc, flit, self.id)
            flit.arrival_cycle = cycle
            self.metrics.count(self.id, cycle, "buffer_writes")
        if self.setups:
            self.log.warning("bypass_setup_expired", cycle, router=self.id,
                             ports=[port_label(p) for p in sorted(self.setups)])
            self.setups = {}
        return bypassing

    # ── stage 3: switch traversal and lookahead generation ───────────────

    def _traverse(self, latched: LatchedFlit, cycle: int, out: RouterOutput) -> None:
        flit = latched.flit
        if is_local_port(latched.in_port):
            category = HopCategory.INJECTION
        elif latched.mode is BypassMode.WH:
            category = HopCategory.BYPASSED_WH
        elif latched.mode is BypassMode.VCT:
            category = HopCategory.BYPASSED_VCT
        else:
            category = HopCategory.BUFFERED
        self.metrics.record_hop(self.id, cycle, category)
        out.traversals += 1

        if is_local_port(latched.out_port):
            out.ejections.append((latched.out_port - TRANSIT_PORTS, flit))
            return
        next_router = self.shape.neighbor(self.id, latched.out_port)
        step = lookahead_route(self.shape, next_router, flit.packet.destination)
        la = make_lookahead(
            flit,
            out_port=step.out_port,
            in_vc=latched.out_vc,
            dest_vc=None,
            vct_mode=latched.mode is BypassMode.VCT,
            in_port=latched.out_port ^ 1,
        )
        out.links.append((latched.out_port, latched.out_vc, flit))
        out.lookaheads.append((latched.out_port, la))

    # ── stage 4: lookahead stage ─────────────────────────────────────────

    def _required_class(self, in_port: int, in_vc: int, out_port: int) -> Optional[int]:
        """Dateline class an output VC must have; None when unrestricted."""
        if self.params.deadlock_rule is not DeadlockRule.DATELINE or is_local_port(out_port):
            return None
        dim = port_dimension(out_port)
        position = self.shape.coords(self.id)[dim]
        positive = out_port % 2 == 0
        entering = classify_hop(in_port, out_port).enters_ring
        current = None if entering else vc_class(in_vc, self.params.vc_count)
        return dateline_vc(self.shape, position, current, crosses_dateline(self.shape, position, positive))

    def _admissible(self, in_port: int, in_vc: int, out_port: int, out_vc: int,
                    claimed: Set[Tuple[int, int]]) -> bool:
        if is_local_port(out_port):
            return out_vc == 0
        if self.out_owner[out_port][out_vc] is not None or (out_port, out_vc) in claimed:
            return False
        required = self._required_class(in_port, in_vc, out_port)
        if required is not None and vc_class(out_vc, self.params.vc_count) != required:
            return False
        if self.params.mechanism.empty_vc and self.ledgers[out_port].outstanding(out_vc) > 0:
            return False
        return True

    def _pick_dest_vc(self, in_port: int, in_vc: int, out_port: int) -> Optional[int]:
        """Free output VC with the most credits, lowest index on ties."""
        if is_local_port(out_port):
            return 0
        ledger = self.ledgers[out_port]
        best: Optional[Tuple[int, int]] = None
        for vc in range(self.params.vc_count):
            if not self._admissible(in_port, in_vc, out_port, vc, set()):
                continue
            free = ledger.free(vc)
            if best is None or free > best[0]:
                best = (free, vc)
        return None if best is None else best[1]

    def _bypass_occupancy(self, buf: InputBuffer, vc: int) -> int:
        if self.params.unsafe_multiflit_bypass and self.params.mechanism is Mechanism.NEBB_WH:
            return 0
        return buf.occupancy(vc)

    def _upstream_covers(self, la: Lookahead) -> bool:
        """Whether the sender can still prepay the rest of a packet bypassed by VCT."""
        ledger = self.upstream_ledgers.get(la.in_port)
        if ledger is None:
            return True
        return ledger.free(la.in_vc) >= ledger.unpaid(la.in_vc, la.packet.id, la.packet.size)

    def _reserve_upstream(self, la: Lookahead, cycle: int) -> None:
        """
        Take the packet's remaining slots of this input out of the shared pool.

        The output stays locked until the tail crosses, so the body must never
        wait on credits that flits queued for that output hold.
        """
        ledger = self.upstream_ledgers.get(la.in_port)
        if ledger is None:
            return
        reserved = ledger.reserve_rest(la.in_vc, la.packet.id, la.packet.size)
        if reserved and self._trace:
            self.log.trace("upstream_reserve", cycle, router=self.id, packet=la.packet.id,
                           port=port_label(la.in_port), vc=la.in_vc, slots=reserved)

    def _evaluate_head(self, la: Lookahead) -> _LaEval:
        buf = self.inputs[la.in_port]
        view = buf.vc_bypassable(la.in_vc)
        out_port = la.out_port
        packet = la.packet
        if view.status is VcStatus.ACTIVE:
            return _LaEval(la, BypassDecision.DENY)
        dest_vc = self._pick_dest_vc(la.in_port, la.in_vc, out_port)
        if dest_vc is None:
            return _LaEval(la, BypassDecision.DENY)
        dest_free = SINK_FREE if is_local_port(out_port) else self.ledgers[out_port].free(dest_vc)
        ctx = ForwardContext(
            mechanism=self.params.mechanism,
            packet_size=packet.size,
            flit_role=la.flit_role,
            bypass_vc_occupancy=self._bypass_occupancy(buf, la.in_vc),
            bypass_vc_state=view.status,
            dest_free=dest_free,
            bypass_free=buf.free_slots(la.in_vc),
            hop_kind=classify_hop(la.in_port, out_port),
            max_packet_size=self.params.max_packet_size,
        )
        decision = bypass_eligible(ctx)
        if decision.allowed and not deadlock_condition(self.params.deadlock_rule, ctx):
            decision = BypassDecision.DENY
        if decision is BypassDecision.ALLOW_VCT and packet.multi_flit and out_port in self.locked:
            decision = BypassDecision.DENY
        if decision is BypassDecision.ALLOW_VCT and packet.multi_flit and not self._upstream_covers(la):
            decision = BypassDecision.DENY
        resolved = make_lookahead(
            la.flit, out_port, la.in_vc, dest_vc,
            vct_mode=decision is BypassDecision.ALLOW_VCT, in_port=la.in_port,
        )
        return _LaEval(resolved, decision, ctx)

    def _evaluate_continuation(self, la: Lookahead) -> _LaEval:
        buf = self.inputs[la.in_port]
        state = buf.vc_states[la.in_vc]
        packet = la.packet
        if (not state.active or state.active_packet.id != packet.id
                or state.bypass_mode is BypassMode.NONE):
            return _LaEval(la, BypassDecision.DENY)
        out_port, out_vc = state.out_port, state.out_vc
        resolved = make_lookahead(
            la.flit, out_port, la.in_vc, out_vc,
            vct_mode=state.bypass_mode is BypassMode.VCT, in_port=la.in_port,
        )
        ctx = ForwardContext(
            mechanism=self.params.mechanism,
            packet_size=packet.size,
            flit_role=la.flit_role,
            hop_kind=classify_hop(la.in_port, out_port),
            max_packet_size=self.params.max_packet_size,
        )
        if state.bypass_mode is BypassMode.VCT:
            return _LaEval(resolved, BypassDecision.ALLOW_VCT, ctx)
        if self._bypass_occupancy(buf, la.in_vc) != 0:
            return _LaEval(resolved, BypassDecision.DENY, ctx)
        if not is_local_port(out_port):
            ledger = self.ledgers[out_port]
            if ledger.free(out_vc) < 1 and ledger.prepaid(out_vc) == 0:
                return _LaEval(resolved, BypassDecision.DENY, ctx)
        return _LaEval(resolved, BypassDecision.ALLOW_WH, ctx)

    def _lookahead_stage(self, cycle: int, lookaheads: List[Lookahead]) -> Tuple[LaArbitration, Dict[int, _LaEval]]:
        evals: Dict[int, _LaEval] = {}
        for la in sorted(lookaheads, key=lambda x: x.in_port):
            if la.flit.is_head:
                evals[la.in_port] = self._evaluate_head(la)
            else:
                evals[la.in_port] = self._evaluate_continuation(la)

        conflicts = 0
        dropped = 0
        # At most one new Max-priority packet per output.
        max_heads: Dict[int, List[_LaEval]] = {}
        for ev in evals.values():
            if ev.decision.allowed and ev.la.flit.is_head and ev.la.priority is LaPriority.MAX:
                max_heads.setdefault(ev.la.out_port, []).append(ev)
        for out_port, group in sorted(max_heads.items()):
            if len(group) < 2:
                continue
            matrix = self.la_matrices[out_port]
            requests = [False] * matrix.n
            for ev in group:
                requests[ev.la.in_port] = True
            winner = matrix_grant(matrix, requests)
            conflicts += 1
            for ev in group:
                if ev.la.in_port != winner:
                    ev.decision = BypassDecision.DENY
                    dropped += 1

        candidates = [ev.la for ev in evals.values() if ev.decision.allowed]
        arbitration = la_arbitrate(candidates, self.params.mechanism.la_mode, self.la_matrices, self.locked)
        arbitration.conflicts += conflicts
        self.metrics.record_lookaheads(
            self.id, cycle, len(lookaheads), arbitration.conflicts, len(arbitration.discarded) + dropped,
        )
        if self._trace and lookaheads:
            self.log.trace("la_stage", cycle, router=self.id,
                           winners=[repr(la) for la in arbitration.winners.values()],
                           discarded=len(arbitration.discarded))
        return arbitration, evals

    # ── stage 5: VC allocation ───────────────────────────────────────────

    def _sa_ready(self, buf: InputBuffer, vc: int, cycle: int) -> bool:
        state = buf.vc_states[vc]
        front = buf.front(vc)
        return (state.active and front is not None
                and front.packet.id == state.active_packet.id
                and front.arrival_cycle < cycle)

    def _vc_allocation(self, cycle: int, arbitration: LaArbitration) -> None:
        vcs = self.params.vc_count
        claimed_in = {
            (la.in_port, la.in_vc) for la in arbitration.winners.values()
            if la.flit.is_head and la.packet.multi_flit
        }
        claimed_out = {
            (la.out_port, la.dest_vc) for la in arbitration.winners.values()
            if la.flit.is_head and not is_local_port(la.out_port)
        }
        requests: Dict[int, int] = {}
        for in_port in sorted(self.inputs):
            buf = self.inputs[in_port]
            for vc in range(vcs):
                front = buf.front(vc)
                if (front is None or not front.is_head or buf.vc_states[vc].active
                        or front.arrival_cycle >= cycle or (in_port, vc) in claimed_in):
                    continue
                requests[in_port * vcs + vc] = dor_route(self.shape, self.id, front.packet.destination).out_port
        if not requests:
            return

        def credit_view(out_port: int, out_vc: int) -> int:
            return 0 if is_local_port(out_port) else self.ledgers[out_port].free(out_vc)

        def admissible(requester: int, out_port: int, out_vc: int) -> bool:
            in_port, in_vc = divmod(requester, vcs)
            return self._admissible(in_port, in_vc, out_port, out_vc, claimed_out)

        assignments = vc_allocate(requests, vcs, credit_view, admissible, self.va_arbiters)
        for requester, (out_port, out_vc) in sorted(assignments.items()):
            in_port, in_vc = divmod(requester, vcs)
            buf = self.inputs[in_port]
            packet = buf.front(in_vc).packet
            buf.vc_states[in_vc].activate(packet, out_port, out_vc)
            if not is_local_port(out_port):
                self.out_owner[out_port][out_vc] = packet.id
            if self._trace:
                self.log.trace("va_grant", cycle, router=self.id, packet=packet.id,
                               out=port_label(out_port), vc=out_vc)

    # ── stage 6: switch allocation ───────────────────────────────────────

    def _may_advance(self, in_port: int, flit: Flit, state: VcState, cycle: int,
                     arbitration: LaArbitration) -> bool:
        out_port, out_vc = state.out_port, state.out_vc
        if out_port in self.locked:
            return False
        la_out = arbitration.winners.get(out_port)
        la_in = [la for la in arbitration.winners.values() if la.in_port == in_port]
        blockers = ([la_out] if la_out is not None else []) + la_in
        if any(la.priority is LaPriority.MAX for la in blockers):
            return False
        urgent = (self.params.la_threshold is not None and flit.is_head
                  and cycle - flit.arrival_cycle > self.params.la_threshold)
        if blockers and self.params.la_priority is LaPriorityMode.LOOKAHEADS and not urgent:
            return False
        if is_local_port(out_port):
            return True
        ledger = self.ledgers[out_port]
        ctx = ForwardContext(
            mechanism=self.params.mechanism,
            packet_size=flit.packet.size,
            flit_role=flit.role,
            dest_free=ledger.free(out_vc),
            prepaid=ledger.prepaid(out_vc),
            hop_kind=classify_hop(in_port, out_port),
            max_packet_size=self.params.max_packet_size,
        )
        if not can_forward_standard(ctx):
            return False
        return not flit.is_head or deadlock_condition(self.params.deadlock_rule, ctx)

    def _switch_allocation(self, cycle: int, arbitration: LaArbitration) -> List[Tuple[int, int, int]]:
        requests: Dict[int, Tuple[int, int]] = {}
        for in_port in sorted(self.inputs):
            buf = self.inputs[in_port]
            sa_state = self.sa_inputs[in_port]
            candidates = [self._sa_ready(buf, vc, cycle) for vc in range(self.params.vc_count)]
            vc = sa_input_select(sa_state, candidates)
            if vc is None:
                continue
            state = buf.vc_states[vc]
            flit = buf.front(vc)
            if self._may_advance(in_port, flit, state, cycle, arbitration):
                requests[in_port] = (vc, state.out_port)
            else:
                sa_report(sa_state, vc, advanced=False, tail=flit.is_tail)

        grants = switch_allocate(requests, self.sa_outputs)
        granted = {g[0] for g in grants}
        for in_port, (vc, _) in requests.items():
            if in_port not in granted:
                sa_report(self.sa_inputs[in_port], vc, advanced=False,
                          tail=self.inputs[in_port].front(vc).is_tail)

        # Lookaheads lose the ports a buffered flit was granted.
        granted_out = {g[2] for g in grants}
        for out_port, la in list(arbitration.winners.items()):
            if la.in_port in granted or out_port in granted_out:
                del arbitration.winners[out_port]
                arbitration.discarded.append(la)
        return grants

    # ── stage 7: lookahead commit ────────────────────────────────────────

    def _commit_lookaheads(self, cycle: int, arbitration: LaArbitration, evals: Dict[int, _LaEval]) -> None:
        hybrid = self.params.mechanism.la_mode is LaMode.HYBRID_PRIORITY
        winners = {la.in_port for la in arbitration.winners.values()}

        for out_port in sorted(arbitration.winners):
            la = arbitration.winners[out_port]
            ev = evals[la.in_port]
            flit, packet = la.flit, la.packet
            state = self.inputs[la.in_port].vc_states[la.in_vc]
            mode = BypassMode.VCT if la.vct_mode else BypassMode.WH
            transit = not is_local_port(out_port)

            if flit.is_head and packet.multi_flit:
                if transit:
                    self.out_owner[out_port][la.dest_vc] = packet.id
                state.activate(packet, out_port, la.dest_vc, mode)
                if la.vct_mode:
                    self._reserve_upstream(la, cycle)
                if hybrid and la.priority is LaPriority.MAX:
                    self.locked[out_port] = packet.id
            if transit:
                debit_credits(self.ledgers[out_port], la.dest_vc, ev.ctx,
                              vct=la.vct_mode, rule=self.params.deadlock_rule, packet_id=packet.id)
            if flit.is_tail and packet.multi_flit:
                self._release(state, out_port)
            self.setups[la.in_port] = BypassSetup(packet.id, flit.seq, la.in_vc, out_port, la.dest_vc, mode)

        # Continuations that will not bypass end the bypass: they and the
        # rest of their packet are buffered in order.
        for in_port, ev in evals.items():
            if in_port in winners or ev.la.flit.is_head:
                continue
            state = self.inputs[in_port].vc_states[ev.la.in_vc]
            if not state.active or state.active_packet.id != ev.la.packet.id:
                continue
            if state.bypass_mode is BypassMode.VCT and hybrid:
                raise InvariantViolation(
                    ViolationKind.HYBRID_LOCK,
                    f"Max-priority continuation {ev.la!r} lost its locked output",
                )
            if state.bypass_mode is not BypassMode.NONE and self._trace:
                self.log.trace("bypass_fallback", cycle, router=self.id, packet=ev.la.packet.id)
            state.bypass_mode = BypassMode.NONE

    def _release(self, state: VcState, out_port: int) -> None:
        packet = state.active_packet
        if not is_local_port(out_port):
            self.out_owner[out_port][state.out_vc] = None
        if packet is not None and self.locked.get(out_port) == packet.id:
            del self.locked[out_port]
        state.release()

    # ── stage 8: SA commit ───────────────────────────────────────────────

    def _commit_grants(self, cycle: int, grants: List[Tuple[int, int, int]]) -> None:
        for in_port, vc, out_port in grants:
            buf = self.inputs[in_port]
            state = buf.vc_states[vc]
            flit = buf.pop(vc)
            self.metrics.count(self.id, cycle, "buffer_reads")
            self._return_credit(in_port, vc, cycle)
            out_vc = state.out_vc
            if not is_local_port(out_port):
                ledger = self.ledgers[out_port]
                ctx = ForwardContext(
                    mechanism=self.params.mechanism,
                    packet_size=flit.packet.size,
                    flit_role=flit.role,
                    hop_kind=classify_hop(in_port, out_port),
                    max_packet_size=self.params.max_packet_size,
                )
                debit_credits(ledger, out_vc, ctx, vct=self.params.mechanism.cut_through,
                              rule=self.params.deadlock_rule, packet_id=flit.packet.id)
            if flit.is_tail:
                self._release(state, out_port)
            sa_report(self.sa_inputs[in_port], vc, advanced=True, tail=flit.is_tail)
            self.latched.append(LatchedFlit(flit, in_port, out_port, out_vc))

    # ═══════════════════════════════════════════════════════════════════════
    # DIAGNOSTICS
    # ═══════════════════════════════════════════════════════════════════════

    def wait_for(self) -> List[str]:
        """What every non-empty input VC is waiting on."""
        lines = []
        for in_port in sorted(self.inputs):
            buf = self.inputs[in_port]
            for vc in range(buf.vc_count):
                front = buf.front(vc)
                if front is None:
                    continue
                state = buf.vc_states[vc]
                where = f"{port_label(in_port)}/vc{vc} {front!r} (occ {buf.occupancy(vc)})"
                if not state.active:
                    lines.append(f"{where} awaiting VA")
                elif state.active_packet.id != front.packet.id:
                    lines.append(f"{where} behind bypassing packet {state.active_packet.id}")
                elif is_local_port(state.out_port):
                    lines.append(f"{where} -> eject")
                else:
                    ledger = self.ledgers[state.out_port]
                    lines.append(
                        f"{where} -> {port_label(state.out_port)}/vc{state.out_vc} "
                        f"free={ledger.free(state.out_vc)}"
                    )
        return lines
