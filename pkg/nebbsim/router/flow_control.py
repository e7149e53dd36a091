"""
NEBBSIM Router - Forwarding and bypass eligibility.

Pure decision functions over a ForwardContext:
- can_forward_standard: the buffered pipeline's WH / VCT space test
- bypass_eligible: the bypass-buffer condition table, one row per mechanism
- deadlock_condition: FBFC-L / Bubble space rules on rings
- debit_credits / return_credit: how forwarding events move the ledger
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional

from nebbsim.core.errors import ConfigurationError
from nebbsim.core.flit import FlitRole
from nebbsim.core.mechanism import Mechanism
from nebbsim.core.ports import is_local_port, port_dimension
from nebbsim.router.buffers import VcStatus
from nebbsim.router.credits import CreditLedger


class HopKind(Enum):
    INJECTION = "Injection"
    DIMENSION_CHANGE = "DimensionChange"
    IN_RING = "InRing"
    EJECTION = "Ejection"

    @property
    def enters_ring(self) -> bool:
        return self is HopKind.INJECTION or self is HopKind.DIMENSION_CHANGE


class DeadlockRule(Enum):
    NONE = "none"
    FBFC_L = "fbfc"
    BUBBLE = "bubble"
    DATELINE = "dateline"

    @classmethod
    def parse(cls, text: str) -> "DeadlockRule":
        wanted = text.strip().lower().replace("-", "_")
        aliases = {"fbfc_l": cls.FBFC_L, "fbfc": cls.FBFC_L, "off": cls.NONE}
        if wanted in aliases:
            return aliases[wanted]
        for rule in cls:
            if rule.value == wanted:
                return rule
        raise ConfigurationError(f"unknown deadlock rule {text!r}")


class BypassDecision(Enum):
    DENY = "Deny"
    ALLOW_WH = "AllowWH"
    ALLOW_VCT = "AllowVCT"

    @property
    def allowed(self) -> bool:
        return self is not BypassDecision.DENY


@dataclass(frozen=True)
class ForwardContext:
    """
    Everything a forwarding decision looks at.

    Attributes:
        dest_free: Credit view of the destination VC at the next router
        bypass_free: Free slots of the VC being bypassed
        prepaid: Flits of this packet already paid for by a whole-packet debit
        max_packet_size: Largest packet size of the traffic (Bubble rule)
    """
    mechanism: Mechanism
    packet_size: int
    flit_role: FlitRole
    bypass_vc_occupancy: int = 0
    bypass_vc_state: VcStatus = VcStatus.IDLE
    dest_free: int = 0
    bypass_free: int = 0
    hop_kind: HopKind = HopKind.IN_RING
    prepaid: int = 0
    max_packet_size: int = 1

    def __post_init__(self):
        if min(self.packet_size, self.bypass_vc_occupancy, self.dest_free,
               self.bypass_free, self.prepaid, self.max_packet_size) < 0:
            raise ValueError(f"negative count in {self}")


def classify_hop(in_port: int, out_port: int) -> HopKind:
    """Kind of a hop from the input and output port numbers of one router."""
    if is_local_port(out_port):
        return HopKind.EJECTION
    if is_local_port(in_port):
        return HopKind.INJECTION
    if port_dimension(in_port) == port_dimension(out_port):
        return HopKind.IN_RING
    return HopKind.DIMENSION_CHANGE


def can_forward_standard(ctx: ForwardContext) -> bool:
    """Space test of the buffered pipeline for a flit at SA."""
    if not ctx.flit_role.is_head and ctx.prepaid > 0:
        return True
    if ctx.mechanism.cut_through:
        if ctx.flit_role.is_head:
            return ctx.dest_free >= ctx.packet_size
        return True
    return ctx.dest_free >= 1


def bypass_eligible(ctx: ForwardContext) -> BypassDecision:
    """Bypass-buffer conditions for a head flit whose LA reached this router."""
    if ctx.bypass_vc_state is VcStatus.ACTIVE:
        return BypassDecision.DENY

    mech = ctx.mechanism
    empty = ctx.bypass_vc_occupancy == 0
    single = ctx.packet_size == 1
    room_for_flit = ctx.dest_free >= 1
    room_for_packet = ctx.dest_free >= ctx.packet_size and ctx.bypass_free >= ctx.packet_size

    if mech in (Mechanism.EMPTY_VC, Mechanism.EMPTY_VC_ARB,
                Mechanism.WH_BASELINE, Mechanism.WH_BASELINE_ARB):
        return BypassDecision.ALLOW_WH if empty and room_for_flit else BypassDecision.DENY

    if mech is Mechanism.VCT_BASELINE:
        return BypassDecision.ALLOW_VCT if empty and room_for_packet else BypassDecision.DENY

    if mech is Mechanism.NEBB_WH:
        return BypassDecision.ALLOW_WH if (empty or single) and room_for_flit else BypassDecision.DENY

    if mech is Mechanism.NEBB_VCT:
        return BypassDecision.ALLOW_VCT if room_for_packet else BypassDecision.DENY

    # NEBB-Hybrid: WH when the bypassed VC is empty or the packet is a single
    # flit, VCT otherwise. Packets larger than the buffer never fit under VCT.
    if empty or single:
        return BypassDecision.ALLOW_WH if room_for_flit else BypassDecision.DENY
    return BypassDecision.ALLOW_VCT if room_for_packet else BypassDecision.DENY


def deadlock_condition(rule: DeadlockRule, ctx: ForwardContext) -> bool:
    """Extra space a head needs to enter a ring on a torus."""
    if rule is DeadlockRule.FBFC_L:
        if ctx.hop_kind.enters_ring:
            return ctx.dest_free >= ctx.packet_size + 1
        return True
    if rule is DeadlockRule.BUBBLE:
        if ctx.hop_kind.enters_ring:
            return ctx.dest_free >= 2 * ctx.max_packet_size
        if ctx.hop_kind is HopKind.IN_RING:
            return ctx.dest_free >= ctx.packet_size
    return True


def whole_packet_debit(ctx: ForwardContext, vct: bool, rule: DeadlockRule, shared: bool) -> int:
    """
    Size to debit at a head flit, or 0 for a plain per-flit debit.

    VCT forwarding always reserves the packet. FBFC-L with shared buffers
    does too when the packet enters a ring, so the bubble it checked for
    cannot be taken by another VC's packet halfway through.
    """
    if not ctx.flit_role.is_head or ctx.packet_size < 2:
        return 0
    if vct:
        return ctx.packet_size
    if rule is DeadlockRule.FBFC_L and shared and ctx.hop_kind.enters_ring:
        return ctx.packet_size
    return 0


def debit_credits(
    ledger: CreditLedger,
    vc: int,
    ctx: ForwardContext,
    vct: bool,
    rule: DeadlockRule = DeadlockRule.NONE,
    packet_id: Optional[int] = None,
) -> int:
    """Apply the debit of one forwarded flit; returns the size debited at once (0 if per-flit)."""
    whole = whole_packet_debit(ctx, vct, rule, ledger.organization.shared)
    ledger.debit(vc, whole_packet=whole, packet_id=packet_id)
    return whole


def return_credit(ledger: CreditLedger, vc: int, current_cycle: int) -> None:
    ledger.return_credit(vc, current_cycle)
