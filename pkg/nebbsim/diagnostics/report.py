"""
NEBBSIM Diagnostics - Violation records and the per-run violation log.

Records come from two places:
- InvariantViolation raised inside a router (buffers, ledgers, arbiters)
- the per-cycle checkers and the deadlock watchdog
"""

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Set, Tuple


class ViolationKind(Enum):
    INTERLEAVING = "Interleaving"
    CREDIT_NEGATIVE = "CreditNegative"
    CREDIT_OVERFLOW = "CreditOverflow"
    FLIT_LOSS = "FlitLoss"
    DEADLOCK = "Deadlock"
    HYBRID_LOCK = "HybridLock"


@dataclass(frozen=True)
class ViolationRecord:
    """A single cycle-stamped invariant failure."""
    cycle: int
    router: Optional[int]
    kind: ViolationKind
    detail: str

    @property
    def site(self) -> Tuple[str, Optional[int]]:
        return (self.kind.value, self.router)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "cycle": self.cycle,
            "router": self.router,
            "kind": self.kind.value,
            "detail": self.detail,
        }

    def __str__(self) -> str:
        where = f"router {self.router}" if self.router is not None else "network"
        return f"[cycle {self.cycle}] {self.kind.value} at {where}: {self.detail}"


@dataclass
class ViolationLog:
    """
    Violations of one run, at most one per (kind, site).

    Usage:
        log = ViolationLog()
        log.add(record)
        if log.has_violations: ...
    """
    records: List[ViolationRecord] = field(default_factory=list)
    _sites: Set[Tuple[str, Optional[int]]] = field(default_factory=set, repr=False)

    def add(self, record: ViolationRecord) -> bool:
        """Add a record; returns False when its (kind, site) was already logged."""
        if record.site in self._sites:
            return False
        self._sites.add(record.site)
        self.records.append(record)
        return True

    def extend(self, records: List[ViolationRecord]) -> int:
        return sum(1 for r in records if self.add(r))

    @property
    def has_violations(self) -> bool:
        return bool(self.records)

    def by_kind(self, kind: ViolationKind) -> List[ViolationRecord]:
        return [r for r in self.records if r.kind is kind]

    def compute_summary(self) -> Dict[str, Any]:
        by_kind: Dict[str, int] = {}
        for record in self.records:
            by_kind[record.kind.value] = by_kind.get(record.kind.value, 0) + 1
        return {
            "total": len(self.records),
            "by_kind": by_kind,
            "first_cycle": min((r.cycle for r in self.records), default=None),
        }

    def to_dict(self) -> Dict[str, Any]:
        return {
            "summary": self.compute_summary(),
            "records": [r.to_dict() for r in self.records],
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)
