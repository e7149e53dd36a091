"""
NEBBSIM Export - Result tables.

Writes run reports in spreadsheet-friendly form:
- sweep CSV: one row per (mechanism, load) cell, fixed column order
- router activity CSV: per-router event counts of one run
- JSON: the full SimReport

Usage:
    from nebbsim.export import export_sweep_csv

    export_sweep_csv(reports, "results/mesh.csv")
"""

import json
from pathlib import Path
from typing import Iterable, List, Union

import pandas as pd

from nebbsim.analysis.metrics import CSV_COLUMNS, SimReport

FLOAT_FORMAT = "%.6g"


class SweepExporter:
    """
    Collects reports and writes them as one table.

    Example:
        exporter = SweepExporter()
        exporter.add_reports(reports)
        exporter.export("sweep.csv")
    """

    def __init__(self):
        self.reports: List[SimReport] = []

    def add_report(self, report: SimReport) -> None:
        self.reports.append(report)

    def add_reports(self, reports: Iterable[SimReport]) -> None:
        for report in reports:
            self.add_report(report)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([r.csv_row() for r in self.reports], columns=CSV_COLUMNS)

    def to_csv_text(self) -> str:
        return self.to_frame().to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")

    def export(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_csv_text(), encoding="utf-8")
        return path


def export_sweep_csv(reports: Iterable[SimReport], path: Union[str, Path]) -> Path:
    exporter = SweepExporter()
    exporter.add_reports(reports)
    return exporter.export(path)


def router_activity_frame(report: SimReport) -> pd.DataFrame:
    frame = pd.DataFrame(report.per_router)
    frame.insert(0, "router", range(len(frame)))
    return frame


def export_router_activity_csv(report: SimReport, path: Union[str, Path]) -> Path:
    """Per-router buffer/crossbar/LA counts; buffered_ratio scales buffer and allocator power."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    router_activity_frame(report).to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


def export_report_json(report: SimReport, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(report.to_dict(), indent=2), encoding="utf-8")
    return path
