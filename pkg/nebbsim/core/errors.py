"""
NEBBSIM Core - Error taxonomy.

Two failure families exist in a simulation:
- ConfigurationError: the requested configuration cannot be simulated.
  Raised before cycle 0.
- InvariantViolation: a state predicate failed while stepping. Carries the
  violation kind and enough context to build a cycle-stamped record.
"""

from typing import TYPE_CHECKING, Optional

if TYPE_CHECKING:
    from nebbsim.diagnostics.report import ViolationKind, ViolationRecord


class ConfigurationError(ValueError):
    """Invalid or incompatible simulation options."""


class InvariantViolation(RuntimeError):
    """
    A runtime invariant failed.

    Components deep in the router raise this without knowing the cycle or
    router index; the engine stamps both before turning it into a
    ViolationRecord.
    """

    def __init__(
        self,
        kind: "ViolationKind",
        detail: str,
        cycle: Optional[int] = None,
        router: Optional[int] = None,
    ):
        super().__init__(f"{kind.value}: {detail}")
        self.kind = kind
        self.detail = detail
        self.cycle = cycle
        self.router = router

    def stamp(self, cycle: int, router: Optional[int]) -> "InvariantViolation":
        if self.cycle is None:
            self.cycle = cycle
        if self.router is None:
            self.router = router
        return self

    def to_record(self) -> "ViolationRecord":
        from nebbsim.diagnostics.report import ViolationRecord

        return ViolationRecord(
            cycle=self.cycle if self.cycle is not None else -1,
            router=self.router,
            kind=self.kind,
            detail=self.detail,
        )

