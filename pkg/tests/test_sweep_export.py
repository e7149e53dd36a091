import json
import os
import tempfile
import unittest

import pandas as pd

from nebbsim.analysis.metrics import CSV_COLUMNS
from nebbsim.core.errors import ConfigurationError
from nebbsim.core.mechanism import Mechanism
from nebbsim.engine import SimConfig, find_saturation, sweep
from nebbsim.engine.sweep import cell_seed, sweep_cells
from nebbsim.export import SweepExporter, export_report_json, export_router_activity_csv, export_sweep_csv
from nebbsim.logging import reset_logging

BASE = SimConfig(k=2, concentration=1, cycles=300, seed=4)
MECHANISMS = [Mechanism.WH_BASELINE, Mechanism.NEBB_HYBRID]


class CellTests(unittest.TestCase):
    def test_cell_seed(self):
        self.assertEqual(cell_seed(4, 0), cell_seed(4, 0))
        self.assertNotEqual(cell_seed(4, 0), cell_seed(4, 1))
        self.assertNotEqual(cell_seed(4, 0), cell_seed(5, 0))

    def test_mechanism_major_order(self):
        cells = sweep_cells(BASE, [0.02, 0.05, 0.1], MECHANISMS)
        self.assertEqual([(c.mechanism, c.load) for c in cells], [
            (Mechanism.WH_BASELINE, 0.02), (Mechanism.WH_BASELINE, 0.05), (Mechanism.WH_BASELINE, 0.1),
            (Mechanism.NEBB_HYBRID, 0.02), (Mechanism.NEBB_HYBRID, 0.05), (Mechanism.NEBB_HYBRID, 0.1),
        ])
        self.assertEqual([c.index for c in cells], list(range(6)))
        self.assertEqual(cells[1].config.seed, cells[4].config.seed)
        self.assertNotEqual(cells[0].config.seed, cells[1].config.seed)

    def test_loads_must_ascend(self):
        for loads in ([0.05, 0.02], [0.02, 0.02], []):
            with self.subTest(loads=loads):
                with self.assertRaises(ConfigurationError):
                    sweep_cells(BASE, loads, MECHANISMS)

    def test_invalid_cell_fails_before_running(self):
        with self.assertRaises(ConfigurationError):
            sweep_cells(BASE, [0.02, 1.5], MECHANISMS)


class SweepTests(unittest.TestCase):
    def tearDown(self):
        reset_logging()

    def test_small_sweep(self):
        seen = []
        reports = sweep(BASE, [0.02, 0.05], MECHANISMS, progress=seen.append)
        self.assertEqual(len(reports), 4)
        self.assertEqual(len(seen), 4)
        self.assertEqual([r.mechanism for r in reports], ["WH-Baseline", "WH-Baseline", "NEBB-Hybrid", "NEBB-Hybrid"])
        self.assertEqual([r.load for r in reports], [0.02, 0.05, 0.02, 0.05])
        self.assertEqual(reports[0].seed, reports[2].seed)
        self.assertEqual(reports[0].packets_generated, reports[2].packets_generated)

    def test_find_saturation_returns_highest_stable_load(self):
        best = find_saturation(BASE.with_overrides(mechanism=Mechanism.NEBB_HYBRID), [0.02, 0.04])
        self.assertEqual(best, 0.04)


class ExportTests(unittest.TestCase):
    def tearDown(self):
        reset_logging()

    def test_csv_round_trip_through_pandas(self):
        reports = sweep(BASE, [0.02, 0.05], MECHANISMS)
        with tempfile.TemporaryDirectory() as tmp:
            path = export_sweep_csv(reports, os.path.join(tmp, "out", "sweep.csv"))
            with open(path, encoding="utf-8") as handle:
                header = handle.readline().strip()
            frame = pd.read_csv(path)
        self.assertEqual(header.split(","), CSV_COLUMNS)
        self.assertEqual(len(frame), 4)
        self.assertEqual(list(frame["mechanism"]), ["WH-Baseline", "WH-Baseline", "NEBB-Hybrid", "NEBB-Hybrid"])
        self.assertFalse(frame["aborted"].any())

    def test_exporter_text_uses_short_floats(self):
        report = sweep(BASE, [0.02], [Mechanism.NEBB_HYBRID])[0]
        report.avg_latency = 12.3456789
        exporter = SweepExporter()
        exporter.add_report(report)
        text = exporter.to_csv_text()
        self.assertIn("12.3457", text)
        self.assertNotIn("\r", text)

    def test_json_and_router_activity(self):
        report = sweep(BASE, [0.02], [Mechanism.NEBB_HYBRID])[0]
        with tempfile.TemporaryDirectory() as tmp:
            json_path = export_report_json(report, os.path.join(tmp, "run.json"))
            activity_path = export_router_activity_csv(report, os.path.join(tmp, "routers.csv"))
            with open(json_path, encoding="utf-8") as handle:
                loaded = json.load(handle)
            activity = pd.read_csv(activity_path)
        self.assertEqual(loaded["mechanism"], "NEBB-Hybrid")
        self.assertEqual(loaded["seed"], report.seed)
        self.assertEqual(list(activity["router"]), [0, 1, 2, 3])
        self.assertIn("buffered_ratio", activity.columns)


if __name__ == "__main__":
    unittest.main()
