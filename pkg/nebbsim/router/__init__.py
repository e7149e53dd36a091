"""NEBBSIM Router - buffers, credits, arbiters, flow-control rules and the pipeline."""

from nebbsim.router.buffers import BufferKind, BufferOrganization, BypassMode, InputBuffer, VcState, VcStatus
from nebbsim.router.credits import CREDIT_RETURN_DELAY, CreditLedger
from nebbsim.router.arbiters import SaInputMode
from nebbsim.router.flow_control import (
    BypassDecision,
    DeadlockRule,
    ForwardContext,
    HopKind,
    bypass_eligible,
    can_forward_standard,
    classify_hop,
    deadlock_condition,
)
from nebbsim.router.pipeline import LaPriorityMode, Router, RouterOutput, RouterParams

__all__ = [
    "BufferKind",
    "BufferOrganization",
    "BypassMode",
    "InputBuffer",
    "VcState",
    "VcStatus",
    "CREDIT_RETURN_DELAY",
    "CreditLedger",
    "SaInputMode",
    "BypassDecision",
    "DeadlockRule",
    "ForwardContext",
    "HopKind",
    "bypass_eligible",
    "can_forward_standard",
    "classify_hop",
    "deadlock_condition",
    "LaPriorityMode",
    "Router",
    "RouterOutput",
    "RouterParams",
]
