"""
NEBBSIM Router - Credit ledger of one output port.

The ledger mirrors the downstream input buffer. `consumed[v]` counts slots
the upstream side has claimed and not yet seen returned; `reserved[v]` is
the part of `consumed[v]` prepaid by a whole-packet debit for flits not
sent yet. `streaming[v]` remembers which packet is being sent on `v` and how
many of its flits are already paid for, so the rest can be reserved later.
Credits travel back one cycle and become usable the cycle after.
"""

from collections import deque
from typing import Deque, List, Optional, Tuple

from nebbsim.core.errors import InvariantViolation
from nebbsim.diagnostics.report import ViolationKind
from nebbsim.router.buffers import BufferOrganization

CREDIT_RETURN_DELAY = 2


class CreditLedger:
    """Upstream view of a downstream input port."""

    def __init__(self, organization: BufferOrganization, vc_count: int):
        self.organization = organization
        self.vc_count = vc_count
        self.consumed: List[int] = [0] * vc_count
        self.reserved: List[int] = [0] * vc_count
        self.pending: Deque[Tuple[int, int]] = deque()  # (apply_cycle, vc)
        self.streaming: List[Optional[Tuple[int, int]]] = [None] * vc_count  # (packet id, paid)

    # ═══ views ═══════════════════════════════════════════════════════════

    def free(self, vc: int) -> int:
        """Slots VC `vc` can be sent right now, both counters considered."""
        return self.organization.free_slots(self.consumed, vc)

    def per_vc_credits(self, vc: int) -> int:
        return self.organization.vc_capacity(self.vc_count) - self.consumed[vc]

    def aggregate_credits(self) -> int:
        return self.organization.total_slots(self.vc_count) - sum(self.consumed)

    def outstanding(self, vc: int) -> int:
        return self.consumed[vc]

    def prepaid(self, vc: int) -> int:
        return self.reserved[vc]

    def pending_returns(self, vc: int) -> int:
        return sum(1 for _, v in self.pending if v == vc)

    # ═══ updates ═════════════════════════════════════════════════════════

    def debit(self, vc: int, flits: int = 1, whole_packet: int = 0, packet_id: Optional[int] = None) -> None:
        """
        Claim downstream space for one flit.

        whole_packet > 1 debits the full packet at its head and reserves the
        remaining flits; without it a prepaid flit draws down its reservation.
        """
        paid = self._paid(vc, packet_id)
        if whole_packet > 1:
            self._take(vc, whole_packet)
            self.reserved[vc] += whole_packet - 1
            self._stream(vc, packet_id, whole_packet)
            return
        if self.reserved[vc] > 0:
            self.reserved[vc] -= 1
            return
        self._take(vc, flits)
        self._stream(vc, packet_id, paid + flits)

    def unpaid(self, vc: int, packet_id: int, size: int) -> int:
        """Flits of a packet already started on `vc` that no debit covers yet."""
        current = self.streaming[vc]
        if current is None or current[0] != packet_id:
            return 0
        return max(0, size - current[1])

    def reserve_rest(self, vc: int, packet_id: int, size: int) -> int:
        """
        Prepay the flits of a packet still to be sent on `vc`.

        Used when the next router commits to forwarding the whole packet
        through a non-empty buffer: its slots leave the shared pool now so
        no other VC can take them. Returns the number of slots reserved.
        """
        rest = self.unpaid(vc, packet_id, size)
        if rest == 0:
            return 0
        self._take(vc, rest)
        self.reserved[vc] += rest
        self._stream(vc, packet_id, size)
        return rest

    def _paid(self, vc: int, packet_id: Optional[int]) -> int:
        current = self.streaming[vc]
        if packet_id is None or current is None or current[0] != packet_id:
            return 0
        return current[1]

    def _stream(self, vc: int, packet_id: Optional[int], paid: int) -> None:
        if packet_id is not None:
            self.streaming[vc] = (packet_id, paid)

    def _take(self, vc: int, n: int) -> None:
        if self.free(vc) < n:
            raise InvariantViolation(
                ViolationKind.CREDIT_NEGATIVE,
                f"debit of {n} on vc{vc} with {self.free(vc)} free (consumed={self.consumed})",
            )
        self.consumed[vc] += n

    def return_credit(self, vc: int, current_cycle: int) -> None:
        self.pending.append((current_cycle + CREDIT_RETURN_DELAY, vc))

    def apply_returns(self, cycle: int) -> int:
        """Apply every return due by `cycle`; returns how many were applied."""
        applied = 0
        while self.pending and self.pending[0][0] <= cycle:
            _, vc = self.pending.popleft()
            if self.consumed[vc] - self.reserved[vc] <= 0:
                raise InvariantViolation(
                    ViolationKind.CREDIT_OVERFLOW,
                    f"credit return on vc{vc} beyond capacity (consumed={self.consumed[vc]}, "
                    f"reserved={self.reserved[vc]})",
                )
            self.consumed[vc] -= 1
            applied += 1
        return applied

    def __repr__(self) -> str:
        return f"CreditLedger(consumed={self.consumed}, reserved={self.reserved}, pending={len(self.pending)})"
