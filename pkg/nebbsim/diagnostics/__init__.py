"""NEBBSIM Diagnostics - runtime invariant checks and the deadlock watchdog."""

from nebbsim.diagnostics.report import ViolationKind, ViolationLog, ViolationRecord
from nebbsim.diagnostics.invariants import check_invariants, scan_queue
from nebbsim.diagnostics.watchdog import DEFAULT_AGE_LIMIT, DEFAULT_HORIZON, DeadlockWatchdog

__all__ = [
    "ViolationKind",
    "ViolationLog",
    "ViolationRecord",
    "check_invariants",
    "scan_queue",
    "DEFAULT_AGE_LIMIT",
    "DEFAULT_HORIZON",
    "DeadlockWatchdog",
]
