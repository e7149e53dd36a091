"""NEBBSIM Export - CSV and JSON output of run reports."""

from nebbsim.export.csv_export import (
    SweepExporter,
    export_report_json,
    export_router_activity_csv,
    export_sweep_csv,
)

__all__ = [
    "SweepExporter",
    "export_report_json",
    "export_router_activity_csv",
    "export_sweep_csv",
]
