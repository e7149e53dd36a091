"""
NEBBSIM Diagnostics - Deadlock watchdog.

Fires when flits are in flight and no flit has crossed a crossbar anywhere
for `horizon` consecutive cycles.

A partial deadlock (one region stuck while the rest keeps moving) never
trips that rule, so the watchdog also scans the input VCs every
AGE_SCAN_INTERVAL cycles and warns through the component logger about
packets waiting longer than `age_limit` cycles since creation.
"""

from dataclasses import dataclass, field
from typing import Any, Iterable, List, Optional, Set

from nebbsim.core.ports import port_label
from nebbsim.diagnostics.report import ViolationKind, ViolationRecord
from nebbsim.logging import get_logger

DEFAULT_HORIZON = 1000
DEFAULT_AGE_LIMIT = 5000
AGE_SCAN_INTERVAL = 100
MAX_AGE_WARNINGS = 20


@dataclass
class DeadlockWatchdog:
    horizon: int = DEFAULT_HORIZON
    age_limit: Optional[int] = None
    last_progress: int = 0
    fired: bool = False
    stale: Set[int] = field(default_factory=set)

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError(f"watchdog horizon must be positive, got {self.horizon}")
        if self.age_limit is not None and self.age_limit < 1:
            raise ValueError(f"packet age limit must be positive, got {self.age_limit}")

    def observe(self, cycle: int, traversals: int, in_flight: int) -> bool:
        """Feed one cycle; True the first cycle the horizon is exceeded."""
        if traversals > 0 or in_flight == 0:
            self.last_progress = cycle
            return False
        if self.fired or cycle - self.last_progress < self.horizon:
            return False
        self.fired = True
        return True

    def report(self, cycle: int, routers: Iterable[Any], in_flight: int) -> ViolationRecord:
        """Deadlock record with what every blocked router is waiting on."""
        lines: List[str] = []
        for router in routers:
            waits = router.wait_for()
            if waits:
                lines.append(f"R{router.id}: " + "; ".join(waits))
        detail = (f"no switch traversal for {cycle - self.last_progress} cycles "
                  f"with {in_flight} flits in flight | " + " | ".join(lines))
        return ViolationRecord(cycle=cycle, router=None, kind=ViolationKind.DEADLOCK, detail=detail)

    def scan_ages(self, cycle: int, routers: Iterable[Any]) -> List[int]:
        """
        Warn once about every packet whose front flit has waited past age_limit.

        Returns the ids newly reported this scan. After MAX_AGE_WARNINGS the
        count keeps growing but the log goes quiet.
        """
        if self.age_limit is None:
            return []
        log = get_logger("watchdog")
        found: List[int] = []
        for router in routers:
            for in_port in sorted(router.inputs):
                buf = router.inputs[in_port]
                for vc, queue in enumerate(buf.queues):
                    if not queue:
                        continue
                    packet = queue[0].packet
                    age = cycle - packet.creation_cycle
                    if age <= self.age_limit or packet.id in self.stale:
                        continue
                    self.stale.add(packet.id)
                    found.append(packet.id)
                    if len(self.stale) <= MAX_AGE_WARNINGS:
                        log.warning("packet_stalled", cycle, packet=packet.id, router=router.id,
                                    port=port_label(in_port), vc=vc, age=age)
                    if len(self.stale) == MAX_AGE_WARNINGS:
                        log.warning("packet_stalled_suppressed", cycle, limit=MAX_AGE_WARNINGS)
        return found


def watchdog(cycle: int, traversals: int, in_flight: int, state: DeadlockWatchdog,
             routers: Iterable[Any]) -> Optional[ViolationRecord]:
    """One watchdog step; the Deadlock record when it fires."""
    if state.age_limit is not None and cycle % AGE_SCAN_INTERVAL == 0:
        state.scan_ages(cycle, routers)
    if state.observe(cycle, traversals, in_flight):
        return state.report(cycle, routers, in_flight)
    return None
