"""
NEBBSIM Analysis - Metrics collection.

Quantifies a run: packet latency, accepted throughput, and how often flits
were written into a buffer instead of bypassing it. Statistics are only
collected inside the measurement window; warmup and drain cycles move
traffic but are not counted (except completions of measured packets during
drain).

This module does NOT interpret results. It counts.
"""

import math
from dataclasses import dataclass, field
from enum import Enum, auto
from typing import Any, Dict, List, Optional

import numpy as np

from nebbsim.core.flit import Flit, PacketDescriptor
from nebbsim.diagnostics.report import ViolationRecord

HISTOGRAM_BUCKETS = 200
SATURATION_FACTOR = 10.0


# =============================================================================
# HOP TAXONOMY
# =============================================================================

class HopCategory(Enum):
    """How a flit crossed one router."""
    INJECTION = auto()     # entered through a local port, always buffered
    BUFFERED = auto()      # written into an input buffer (BW, VA, SA)
    BYPASSED_WH = auto()   # crossed on a lookahead under WH rules
    BYPASSED_VCT = auto()  # crossed on a lookahead under VCT rules


@dataclass(frozen=True)
class Phases:
    warmup_end: int
    measure_end: int
    drain_end: int

    @classmethod
    def from_run(cls, cycles: int, warmup_fraction: float, drain_cycles: int = 0) -> "Phases":
        warmup_end = int(cycles * warmup_fraction)
        return cls(warmup_end, cycles, cycles + drain_cycles)

    @property
    def measure_cycles(self) -> int:
        return self.measure_end - self.warmup_end

    def in_window(self, cycle: int) -> bool:
        return self.warmup_end <= cycle < self.measure_end

    def to_dict(self) -> Dict[str, int]:
        return {
            "warmup_end": self.warmup_end,
            "measure_end": self.measure_end,
            "drain_end": self.drain_end,
        }


@dataclass
class RouterActivity:
    """Event counts that scale a router's dynamic power."""
    buffer_writes: int = 0
    buffer_reads: int = 0
    crossbar_traversals: int = 0
    la_arbitrations: int = 0
    received: int = 0

    @property
    def buffered_ratio(self) -> float:
        return self.buffer_writes / self.received if self.received else 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "buffer_writes": self.buffer_writes,
            "buffer_reads": self.buffer_reads,
            "crossbar_traversals": self.crossbar_traversals,
            "la_arbitrations": self.la_arbitrations,
            "received": self.received,
            "buffered_ratio": self.buffered_ratio,
        }


# =============================================================================
# COLLECTOR
# =============================================================================

class MetricsCollector:
    """Accumulators fed by the routers and the network interfaces."""

    def __init__(self, phases: Phases, nodes: int, routers: int):
        self.phases = phases
        self.nodes = nodes
        self.hops: Dict[HopCategory, int] = {category: 0 for category in HopCategory}
        self.latencies: List[int] = []
        self.ejected_flits = 0
        self.generated_flits = 0
        self.generated_packets = 0
        self.measured_packets = 0
        self.la_conflicts = 0
        self.discarded_las = 0
        self.activity: List[RouterActivity] = [RouterActivity() for _ in range(routers)]

    def record_hop(self, router: int, cycle: int, category: HopCategory) -> None:
        if self.phases.in_window(cycle):
            self.hops[category] += 1
            self.activity[router].crossbar_traversals += 1

    def record_generation(self, packet: PacketDescriptor) -> None:
        if self.phases.in_window(packet.creation_cycle):
            self.generated_packets += 1
            self.generated_flits += packet.size

    def record_ejection(self, flit: Flit, cycle: int) -> None:
        if self.phases.in_window(cycle):
            self.ejected_flits += 1
        packet = flit.packet
        if flit.is_tail and self.phases.in_window(packet.creation_cycle):
            self.latencies.append(cycle - packet.creation_cycle)

    def record_lookaheads(self, router: int, cycle: int, received: int, conflicts: int, discarded: int) -> None:
        if self.phases.in_window(cycle):
            self.activity[router].la_arbitrations += received
            self.la_conflicts += conflicts
            self.discarded_las += discarded

    def count(self, router: int, cycle: int, event: str, n: int = 1) -> None:
        """Bump one RouterActivity field."""
        if self.phases.in_window(cycle):
            activity = self.activity[router]
            setattr(activity, event, getattr(activity, event) + n)

    @property
    def transit_hops(self) -> int:
        return (self.hops[HopCategory.BUFFERED]
                + self.hops[HopCategory.BYPASSED_WH]
                + self.hops[HopCategory.BYPASSED_VCT])


# =============================================================================
# REPORT
# =============================================================================

CSV_COLUMNS = [
    "mechanism", "load", "avg_latency", "p99", "throughput",
    "buffered_flit_ratio", "bypassed_wh", "bypassed_vct", "saturated", "aborted",
]


@dataclass
class SimReport:
    """Aggregated results of one run."""
    mechanism: str
    load: float
    seed: int
    rng: str = "PCG64"
    avg_latency: float = math.nan
    p99: float = math.nan
    latency_histogram: List[int] = field(default_factory=list)
    throughput: float = 0.0
    offered_load: float = 0.0
    buffered_flit_ratio: float = 0.0
    bypassed_wh: int = 0
    bypassed_vct: int = 0
    buffered_hops: int = 0
    injection_hops: int = 0
    la_conflicts: int = 0
    discarded_las: int = 0
    packets_generated: int = 0
    packets_measured: int = 0
    flits_ejected: int = 0
    phases: Dict[str, int] = field(default_factory=dict)
    zero_load_latency: float = math.nan
    saturated: bool = False
    empty: bool = False
    aborted: bool = False
    violations: List[ViolationRecord] = field(default_factory=list)
    log_digest: str = ""
    per_router: List[Dict[str, Any]] = field(default_factory=list)

    def csv_row(self) -> Dict[str, Any]:
        return {
            "mechanism": self.mechanism,
            "load": self.load,
            "avg_latency": self.avg_latency,
            "p99": self.p99,
            "throughput": self.throughput,
            "buffered_flit_ratio": self.buffered_flit_ratio,
            "bypassed_wh": self.bypassed_wh,
            "bypassed_vct": self.bypassed_vct,
            "saturated": self.saturated,
            "aborted": self.aborted,
        }

    def to_dict(self) -> Dict[str, Any]:
        def clean(value: float) -> Optional[float]:
            return None if isinstance(value, float) and math.isnan(value) else value

        return {
            "mechanism": self.mechanism,
            "load": self.load,
            "seed": self.seed,
            "rng": self.rng,
            "avg_latency": clean(self.avg_latency),
            "p99": clean(self.p99),
            "latency_histogram": self.latency_histogram,
            "throughput": self.throughput,
            "offered_load": self.offered_load,
            "buffered_flit_ratio": self.buffered_flit_ratio,
            "bypassed_wh": self.bypassed_wh,
            "bypassed_vct": self.bypassed_vct,
            "buffered_hops": self.buffered_hops,
            "injection_hops": self.injection_hops,
            "la_conflicts": self.la_conflicts,
            "discarded_las": self.discarded_las,
            "packets_generated": self.packets_generated,
            "packets_measured": self.packets_measured,
            "flits_ejected": self.flits_ejected,
            "phases": self.phases,
            "zero_load_latency": clean(self.zero_load_latency),
            "saturated": self.saturated,
            "empty": self.empty,
            "aborted": self.aborted,
            "violations": [v.to_dict() for v in self.violations],
            "log_digest": self.log_digest,
            "per_router": self.per_router,
        }


def latency_histogram(latencies: List[int]) -> List[int]:
    """One-cycle buckets 0..199 plus an overflow bucket."""
    if not latencies:
        return [0] * (HISTOGRAM_BUCKETS + 1)
    clipped = np.minimum(np.asarray(latencies, dtype=np.int64), HISTOGRAM_BUCKETS)
    return np.bincount(clipped, minlength=HISTOGRAM_BUCKETS + 1).tolist()


def finalize(
    collector: MetricsCollector,
    mechanism: str,
    load: float,
    seed: int,
    zero_load_latency: float = math.nan,
) -> SimReport:
    """Turn the accumulators into a SimReport."""
    phases = collector.phases
    window = collector.nodes * max(phases.measure_cycles, 1)
    transit = collector.transit_hops
    report = SimReport(
        mechanism=mechanism,
        load=load,
        seed=seed,
        throughput=collector.ejected_flits / window,
        offered_load=collector.generated_flits / window,
        buffered_flit_ratio=collector.hops[HopCategory.BUFFERED] / transit if transit else 0.0,
        bypassed_wh=collector.hops[HopCategory.BYPASSED_WH],
        bypassed_vct=collector.hops[HopCategory.BYPASSED_VCT],
        buffered_hops=collector.hops[HopCategory.BUFFERED],
        injection_hops=collector.hops[HopCategory.INJECTION],
        la_conflicts=collector.la_conflicts,
        discarded_las=collector.discarded_las,
        packets_generated=collector.generated_packets,
        packets_measured=len(collector.latencies),
        flits_ejected=collector.ejected_flits,
        phases=phases.to_dict(),
        zero_load_latency=zero_load_latency,
        latency_histogram=latency_histogram(collector.latencies),
        per_router=[a.to_dict() for a in collector.activity],
    )
    if collector.latencies:
        values = np.asarray(collector.latencies, dtype=np.float64)
        report.avg_latency = float(values.mean())
        report.p99 = float(np.percentile(values, 99))
        if not math.isnan(zero_load_latency):
            report.saturated = report.avg_latency > SATURATION_FACTOR * zero_load_latency
    else:
        report.empty = True
    return report
