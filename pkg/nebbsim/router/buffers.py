"""
NEBBSIM Router - Input buffers.

Two organizations are modelled:
- Shared (DAMQ): one pool of `slots` per input port, every VC keeps one
  private slot.
- Private: `slots` per VC.

The DAMQ private slot is an accounting rule. A VC may use its private slot
plus whatever the pool has left after the other VCs' overflow:

    free(v) = [occ(v) == 0] + (total - vcs) - sum_u max(0, occ(u) - 1)

With every VC empty this gives total - vcs + 1, the per-VC counter the
upstream router starts from.
"""

from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Deque, List, NamedTuple, Optional, Sequence

from nebbsim.core.errors import ConfigurationError, InvariantViolation
from nebbsim.core.flit import Flit, PacketDescriptor
from nebbsim.diagnostics.report import ViolationKind


class BufferKind(Enum):
    SHARED = "shared"
    PRIVATE = "private"


@dataclass(frozen=True)
class BufferOrganization:
    """
    Buffer layout of one input port.

    Attributes:
        kind: Shared pool or private per-VC queues
        slots: Pool size (shared) or slots per VC (private)
    """
    kind: BufferKind
    slots: int

    @classmethod
    def parse(cls, text: str) -> "BufferOrganization":
        """Parse `shared:<slots>` or `private:<slots>`."""
        kind_text, sep, slots_text = text.strip().lower().partition(":")
        if not sep:
            raise ConfigurationError(f"buffer must look like shared:<n> or private:<n>, got {text!r}")
        try:
            kind = BufferKind(kind_text)
        except ValueError:
            raise ConfigurationError(f"unknown buffer organization {kind_text!r}") from None
        try:
            slots = int(slots_text)
        except ValueError:
            raise ConfigurationError(f"buffer slot count must be an integer, got {slots_text!r}") from None
        if slots < 1:
            raise ConfigurationError(f"buffer needs at least one slot, got {slots}")
        return cls(kind, slots)

    @property
    def shared(self) -> bool:
        return self.kind is BufferKind.SHARED

    def total_slots(self, vc_count: int) -> int:
        return self.slots if self.shared else self.slots * vc_count

    def vc_capacity(self, vc_count: int) -> int:
        """Most flits a single VC can ever hold."""
        if self.shared:
            return self.slots - vc_count + 1
        return self.slots

    def free_slots(self, occupancy: Sequence[int], vc: int) -> int:
        """Slots VC `vc` can still accept given per-VC counts `occupancy`."""
        if not self.shared:
            return self.slots - occupancy[vc]
        own = 1 if occupancy[vc] == 0 else 0
        overflow = sum(n - 1 for n in occupancy if n > 1)
        return own + (self.slots - len(occupancy)) - overflow

    def __str__(self) -> str:
        return f"{self.kind.value}:{self.slots}"


class VcStatus(Enum):
    IDLE = "Idle"
    ACTIVE = "Active"


class BypassMode(Enum):
    """How the packet owning an Active VC is crossing this router."""
    NONE = "none"  # buffered, standard pipeline
    WH = "WH"
    VCT = "VCT"


@dataclass
class VcState:
    """Control registers of one input VC."""
    status: VcStatus = VcStatus.IDLE
    out_port: Optional[int] = None
    out_vc: Optional[int] = None
    active_packet: Optional[PacketDescriptor] = None
    bypass_mode: BypassMode = BypassMode.NONE

    @property
    def active(self) -> bool:
        return self.status is VcStatus.ACTIVE

    def activate(
        self,
        packet: PacketDescriptor,
        out_port: int,
        out_vc: int,
        bypass_mode: BypassMode = BypassMode.NONE,
    ) -> None:
        self.status = VcStatus.ACTIVE
        self.active_packet = packet
        self.out_port = out_port
        self.out_vc = out_vc
        self.bypass_mode = bypass_mode

    def release(self) -> None:
        self.status = VcStatus.IDLE
        self.active_packet = None
        self.out_port = None
        self.out_vc = None
        self.bypass_mode = BypassMode.NONE


class VcView(NamedTuple):
    """Occupancy and state of a VC, read together."""
    occupancy: int
    status: VcStatus


class InputBuffer:
    """
    Per-VC FIFOs of one input port.

    push/pop enforce capacity; callers are expected to respect upstream
    credits, so a failure here always means credit accounting went wrong.
    """

    def __init__(self, organization: BufferOrganization, vc_count: int):
        if vc_count < 1:
            raise ConfigurationError(f"vc_count must be >= 1, got {vc_count}")
        self.organization = organization
        self.vc_count = vc_count
        self.queues: List[Deque[Flit]] = [deque() for _ in range(vc_count)]
        self.vc_states: List[VcState] = [VcState() for _ in range(vc_count)]

    def occupancy(self, vc: int) -> int:
        return len(self.queues[vc])

    def occupancies(self) -> List[int]:
        return [len(q) for q in self.queues]

    @property
    def total_occupancy(self) -> int:
        return sum(len(q) for q in self.queues)

    def free_slots(self, vc: int) -> int:
        return self.organization.free_slots(self.occupancies(), vc)

    def push(self, vc: int, flit: Flit, router: Optional[int] = None) -> None:
        if self.free_slots(vc) < 1:
            raise InvariantViolation(
                ViolationKind.CREDIT_NEGATIVE,
                f"buffer write of {flit!r} into full vc{vc} ({self.organization}, occ={self.occupancies()})",
                router=router,
            )
        self.queues[vc].append(flit)
        if router is not None:
            flit.record_hop(router, was_buffered=True)

    def pop(self, vc: int) -> Flit:
        if not self.queues[vc]:
            raise InvariantViolation(ViolationKind.FLIT_LOSS, f"pop from empty vc{vc}")
        return self.queues[vc].popleft()

    def front(self, vc: int) -> Optional[Flit]:
        queue = self.queues[vc]
        return queue[0] if queue else None

    def vc_bypassable(self, vc: int) -> VcView:
        return VcView(len(self.queues[vc]), self.vc_states[vc].status)

    def __repr__(self) -> str:
        return f"InputBuffer({self.organization}, occ={self.occupancies()})"
