"""
NEBBSIM Core - Bypass mechanisms.

Each mechanism fixes three things: the flow control of the standard
(buffered) pipeline, the bypass conditions, and how lookaheads competing
for one output are arbitrated.
"""

from enum import Enum

from nebbsim.core.errors import ConfigurationError


class FlowControl(Enum):
    WORMHOLE = "WH"
    CUT_THROUGH = "VCT"


class LaMode(Enum):
    """Lookahead arbitration modes."""
    CONFLICT_CHECK = "ConflictCheck"    # conflicting LAs are all discarded
    ARBITER = "Arbiter"                 # matrix arbiter per output
    HYBRID_PRIORITY = "HybridPriority"  # Max-priority LAs lock their output


class Mechanism(Enum):
    EMPTY_VC = "EmptyVC"
    EMPTY_VC_ARB = "EmptyVC+Arb"
    WH_BASELINE = "WH-Baseline"
    WH_BASELINE_ARB = "WH-Baseline+Arb"
    VCT_BASELINE = "VCT-Baseline"
    NEBB_WH = "NEBB-WH"
    NEBB_VCT = "NEBB-VCT"
    NEBB_HYBRID = "NEBB-Hybrid"

    @classmethod
    def parse(cls, name: str) -> "Mechanism":
        wanted = name.strip().lower()
        for mechanism in cls:
            if mechanism.value.lower() == wanted or mechanism.name.lower() == wanted:
                return mechanism
        if wanted in ("nebb", "hybrid"):
            return cls.NEBB_HYBRID
        if wanted in ("baseline", "wh"):
            return cls.WH_BASELINE
        known = ", ".join(m.value for m in cls)
        raise ConfigurationError(f"unknown mechanism {name!r} (known: {known})")

    @property
    def standard_flow_control(self) -> FlowControl:
        if self in (Mechanism.NEBB_VCT, Mechanism.VCT_BASELINE):
            return FlowControl.CUT_THROUGH
        return FlowControl.WORMHOLE

    @property
    def cut_through(self) -> bool:
        return self.standard_flow_control is FlowControl.CUT_THROUGH

    @property
    def la_mode(self) -> LaMode:
        if self in (Mechanism.EMPTY_VC, Mechanism.WH_BASELINE, Mechanism.VCT_BASELINE):
            return LaMode.CONFLICT_CHECK
        if self in (Mechanism.NEBB_VCT, Mechanism.NEBB_HYBRID):
            return LaMode.HYBRID_PRIORITY
        return LaMode.ARBITER

    @property
    def empty_vc(self) -> bool:
        """Packets need a free AND empty downstream VC."""
        return self in (Mechanism.EMPTY_VC, Mechanism.EMPTY_VC_ARB)

    @property
    def nebb(self) -> bool:
        return self in (Mechanism.NEBB_WH, Mechanism.NEBB_VCT, Mechanism.NEBB_HYBRID)
