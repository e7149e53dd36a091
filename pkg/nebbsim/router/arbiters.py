"""
NEBBSIM Router - Arbitration primitives.

- RoundRobinState / rr_grant: input-side and VA arbiters
- MatrixState / matrix_grant: SA output arbiters and LA arbiters
- SaInputState / sa_input_select: variable-priority input arbiter that
  favours the VC finishing its packet and demotes it on a stall
- switch_allocate / vc_allocate / la_arbitrate: the allocators built on top

All ties break toward the lowest index.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from nebbsim.core.errors import ConfigurationError, InvariantViolation
from nebbsim.core.lookahead import LaPriority, Lookahead
from nebbsim.core.mechanism import LaMode
from nebbsim.diagnostics.report import ViolationKind


# ═══════════════════════════════════════════════════════════════════════════
# ROUND ROBIN
# ═══════════════════════════════════════════════════════════════════════════

@dataclass
class RoundRobinState:
    """Pointer to the last granted index; starts at n - 1 so index 0 goes first."""
    n: int
    pointer: int = -1

    def __post_init__(self):
        if self.n < 1:
            raise ConfigurationError(f"arbiter needs at least one requester, got {self.n}")
        if self.pointer < 0:
            self.pointer = self.n - 1


def rr_grant(state: RoundRobinState, requests: Sequence[bool]) -> Optional[int]:
    n = state.n
    for step in range(1, n + 1):
        i = (state.pointer + step) % n
        if requests[i]:
            state.pointer = i
            return i
    return None


# ═══════════════════════════════════════════════════════════════════════════
# MATRIX
# ═══════════════════════════════════════════════════════════════════════════

@dataclass
class MatrixState:
    """m[i][j] is True when i has priority over j. Lower indices start ahead."""
    n: int
    m: List[List[bool]] = field(default_factory=list)

    def __post_init__(self):
        if not self.m:
            self.m = [[i < j for j in range(self.n)] for i in range(self.n)]

    def is_antisymmetric(self) -> bool:
        return all(
            self.m[i][j] != self.m[j][i]
            for i in range(self.n) for j in range(self.n) if i != j
        )


def matrix_grant(state: MatrixState, requests: Sequence[bool]) -> Optional[int]:
    requesters = [i for i in range(state.n) if requests[i]]
    for i in requesters:
        if not any(state.m[j][i] for j in requesters if j != i):
            for j in range(state.n):
                if j != i:
                    state.m[i][j] = False
                    state.m[j][i] = True
            return i
    return None


# ═══════════════════════════════════════════════════════════════════════════
# SA INPUT ARBITER
# ═══════════════════════════════════════════════════════════════════════════

class SaInputMode(Enum):
    DEMOTE_ON_STALL = "demote"
    LOCK_UNTIL_TAIL = "lock"

    @classmethod
    def parse(cls, text: str) -> "SaInputMode":
        wanted = text.strip().lower()
        for mode in cls:
            if wanted in (mode.value, mode.name.lower()):
                return mode
        raise ConfigurationError(f"unknown SA input mode {text!r} (demote or lock)")


@dataclass
class SaInputState:
    vc_count: int
    mode: SaInputMode = SaInputMode.DEMOTE_ON_STALL
    held_vc: Optional[int] = None
    rr: RoundRobinState = field(init=False)

    def __post_init__(self):
        self.rr = RoundRobinState(self.vc_count)


def sa_input_select(state: SaInputState, candidates: Sequence[bool]) -> Optional[int]:
    """Pick the VC of one input port that requests an output this cycle."""
    held = state.held_vc
    if held is not None:
        if candidates[held]:
            return held
        if state.mode is SaInputMode.LOCK_UNTIL_TAIL:
            return None
    return rr_grant(state.rr, candidates)


def sa_report(state: SaInputState, vc: int, advanced: bool, tail: bool) -> None:
    """Feed back whether the selected VC advanced this cycle."""
    if advanced:
        state.held_vc = None if tail else vc
    elif state.mode is SaInputMode.DEMOTE_ON_STALL and state.held_vc == vc:
        state.held_vc = None


# ═══════════════════════════════════════════════════════════════════════════
# ALLOCATORS
# ═══════════════════════════════════════════════════════════════════════════

def switch_allocate(
    input_selections: Mapping[int, Tuple[int, int]],
    output_states: Mapping[int, MatrixState],
) -> List[Tuple[int, int, int]]:
    """
    Output stage of the separable allocator.

    input_selections maps input port -> (vc, out_port), one request per input.
    Returns (input, vc, out_port) grants, at most one per output.
    """
    by_output: Dict[int, List[int]] = {}
    for in_port, (_, out_port) in input_selections.items():
        by_output.setdefault(out_port, []).append(in_port)

    grants: List[Tuple[int, int, int]] = []
    for out_port in sorted(by_output):
        matrix = output_states[out_port]
        requests = [False] * matrix.n
        for in_port in by_output[out_port]:
            requests[in_port] = True
        winner = matrix_grant(matrix, requests)
        if winner is not None:
            grants.append((winner, input_selections[winner][0], out_port))
    return grants


def vc_allocate(
    requests: Mapping[int, int],
    vc_count: int,
    credit_view: Callable[[int, int], int],
    admissible: Callable[[int, int, int], bool],
    arbiters: Mapping[int, RoundRobinState],
) -> Dict[int, Tuple[int, int]]:
    """
    Assign output VCs.

    requests maps requester index (in_port * vc_count + vc) -> out_port.
    admissible(requester, out_port, out_vc) encodes the mechanism's rules
    (free, free and empty, dateline class). Each winner takes the admissible
    VC with the most credits; requesters are served round-robin per output.
    """
    by_output: Dict[int, List[int]] = {}
    for requester, out_port in requests.items():
        by_output.setdefault(out_port, []).append(requester)

    assignments: Dict[int, Tuple[int, int]] = {}
    for out_port in sorted(by_output):
        rr = arbiters[out_port]
        pending = [False] * rr.n
        for requester in by_output[out_port]:
            pending[requester] = True
        taken: set = set()
        while True:
            requester = rr_grant(rr, pending)
            if requester is None:
                break
            pending[requester] = False
            best: Optional[Tuple[int, int]] = None
            for out_vc in range(vc_count):
                if out_vc in taken or not admissible(requester, out_port, out_vc):
                    continue
                credits = credit_view(out_port, out_vc)
                if best is None or credits > best[0]:
                    best = (credits, out_vc)
            if best is None:
                continue
            taken.add(best[1])
            assignments[requester] = (out_port, best[1])
    return assignments


@dataclass
class LaArbitration:
    winners: Dict[int, Lookahead] = field(default_factory=dict)  # out_port -> LA
    discarded: List[Lookahead] = field(default_factory=list)
    conflicts: int = 0


def la_arbitrate(
    las: Sequence[Lookahead],
    mode: LaMode,
    la_matrices: Mapping[int, MatrixState],
    locked_outputs: Mapping[int, int],
) -> LaArbitration:
    """
    Resolve the lookaheads received this cycle.

    locked_outputs maps an output port to the id of the Max-priority packet
    holding it. Only Max lookaheads of that same packet may cross it.
    """
    result = LaArbitration()
    by_output: Dict[int, List[Lookahead]] = {}
    for la in las:
        by_output.setdefault(la.out_port, []).append(la)

    for out_port in sorted(by_output):
        group = by_output[out_port]
        holder = locked_outputs.get(out_port)

        if mode is LaMode.HYBRID_PRIORITY:
            maxed = [la for la in group if la.priority is LaPriority.MAX]
            if len(maxed) > 1:
                raise InvariantViolation(
                    ViolationKind.HYBRID_LOCK,
                    f"{len(maxed)} Max-priority lookaheads for output {out_port}: {maxed}",
                )
            if maxed:
                la = maxed[0]
                if holder is not None and holder != la.packet.id:
                    raise InvariantViolation(
                        ViolationKind.HYBRID_LOCK,
                        f"{la!r} for output {out_port} locked by packet {holder}",
                    )
                result.winners[out_port] = la
                result.discarded.extend(x for x in group if x is not la)
                if len(group) > 1:
                    result.conflicts += 1
                continue

        if holder is not None:
            result.discarded.extend(group)
            result.conflicts += 1
            continue

        if len(group) == 1:
            result.winners[out_port] = group[0]
            continue

        result.conflicts += 1
        if mode is LaMode.CONFLICT_CHECK:
            result.discarded.extend(group)
            continue

        matrix = la_matrices[out_port]
        requests = [False] * matrix.n
        for la in group:
            requests[la.in_port] = True
        winner_port = matrix_grant(matrix, requests)
        for la in group:
            if la.in_port == winner_port and out_port not in result.winners:
                result.winners[out_port] = la
            else:
                result.discarded.append(la)
    return result
