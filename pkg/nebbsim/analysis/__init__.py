"""NEBBSIM Analysis - run phases, counters and the per-run report."""

from nebbsim.analysis.metrics import (
    CSV_COLUMNS,
    HopCategory,
    MetricsCollector,
    Phases,
    RouterActivity,
    SimReport,
    finalize,
)

__all__ = [
    "CSV_COLUMNS",
    "HopCategory",
    "MetricsCollector",
    "Phases",
    "RouterActivity",
    "SimReport",
    "finalize",
]
