"""
Python unittest
"""
import csv
import json
import os
import tempfile
import unittest
from pathlib import Path
from types import SimpleNamespace

import numpy as np

from clbench.clbench_export import (
    RUN_CSV_HEADER,
    IoError,
    _run_rows,
    export,
    plot_paths,
    write_csv,
)
from clbench.clbench_harness import CellStats, ResultTable, SuiteResult, SweepResult
from clbench.clbench_metrics import TimedPath, load_trajectory, tracking_rmse


def curvy(n=300, offset=0.0):
    t = 0.02 * np.arange(n) + 0.123456789
    x = 10.0 * np.sin(0.1 * t) + offset
    y = 3.0 * np.cos(0.37 * t) - offset
    return TimedPath(t, np.column_stack([x, y, np.angle(np.exp(1j * 0.5 * t))]))


def small_table():
    cells = {
        ("s1", "fast"): CellStats(0.1234, 5, 5, False),
        ("s1", "slow"): CellStats(None, 0, 5, True),
        ("s2", "fast"): CellStats(0.3, 5, 5, False),
        ("s2", "slow"): CellStats(0.5, 5, 5, False),
    }
    return ResultTable(
        "adis16448 @ 1 m/s",
        "tracking_rmse",
        ["s1", "s2"],
        ["fast", "slow"],
        cells,
        {"fast": 0.01, "slow": 0.06},
        5,
    )


class TestClBenchExport(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def read_csv(self, path):
        with open(path, newline="") as f:
            return list(csv.reader(f, delimiter=";"))

    def test_trajectory_round_trip(self):
        desired, actual = curvy(), curvy(offset=0.05)
        base = tracking_rmse(desired, actual).rmse_trans
        [d_path] = export(desired, "traj", self.dir / "desired.traj")
        [a_path] = export(actual, "traj", self.dir / "actual.traj")
        reloaded = tracking_rmse(load_trajectory(d_path), load_trajectory(a_path))
        self.assertAlmostEqual(reloaded.rmse_trans, base, delta=1e-6)

        export(desired, "traj", self.dir / "desired17.traj", precision=17)
        export(actual, "traj", self.dir / "actual17.traj", precision=17)
        exact = tracking_rmse(
            load_trajectory(self.dir / "desired17.traj"),
            load_trajectory(self.dir / "actual17.traj"),
        )
        self.assertAlmostEqual(exact.rmse_trans, base, delta=1e-12)

    def test_trajectory_header(self):
        [path] = export(curvy(n=3), "traj", self.dir / "nested" / "path.traj")
        with open(path) as f:
            lines = f.read().splitlines()
        self.assertEqual(lines[0], "# t x y theta")
        self.assertEqual(len(lines), 4)
        self.assertEqual(len(lines[1].split()), 4)

    def test_table_csv_layout(self):
        [path] = export(small_table(), "csv", self.dir / "table.csv")
        rows = self.read_csv(path)
        self.assertEqual(rows[0], ["Scenario", "fast", "slow"])
        self.assertEqual(rows[1], ["s1", "0.123", "-"])
        self.assertEqual(rows[2], ["s2", "0.300", "0.500"])
        self.assertEqual([r[0] for r in rows[3:]], ["Avg. RMS", "Avg. Latency"])

    def test_table_json(self):
        [path] = export(small_table(), "json", self.dir / "table.json")
        with open(path) as f:
            data = json.load(f)
        self.assertIsNone(data["cells"]["s1|slow"]["mean"])
        self.assertEqual(data["estimators"], ["fast", "slow"])

    def test_suite_csv_per_table(self):
        suite = SuiteResult(tables=[small_table()])
        written = export(suite, "csv", self.dir / "suite.csv")
        self.assertEqual([p.name for p in written], ["suite_adis16448_1.csv"])

    def test_sweep_csv(self):
        result = SweepResult(
            "latency", [0.01, 0.03], [0.1, 0.2], [0.01, 0.02], [20, 19], [[0.1], [0.2]]
        )
        [path] = export(result, "csv", self.dir / "sweep.csv")
        rows = self.read_csv(path)
        self.assertEqual(rows[0], ["latency", "mean_rmse", "stderr", "n"])
        self.assertEqual(rows[2], ["0.03", "0.2000", "0.0200", "19"])

    def test_run_rows_unwrap_headings(self):
        k = np.arange(20)
        wrapped = np.angle(np.exp(0.5j * k))
        spinning = TimedPath(0.1 * k, np.column_stack([0.1 * k, 0.0 * k, wrapped]))
        run = SimpleNamespace(desired=spinning, actual=spinning, estimated=spinning)
        rows = _run_rows(run)
        self.assertEqual(len(rows), 20)
        self.assertEqual(len(rows[0]), len(RUN_CSV_HEADER))
        for column in (3, 6, 9):
            headings = [float(row[column]) for row in rows]
            np.testing.assert_allclose(headings, 0.5 * k, atol=1e-7)

    def test_svg_has_one_path_per_run(self):
        runs = [("a", curvy(offset=0.1)), ("b", curvy(offset=0.2))]
        path = plot_paths(self.dir / "paths.svg", curvy(), runs, "two runs")
        with open(path) as f:
            svg = f.read()
        self.assertIn('id="desired"', svg)
        self.assertIn('id="actual-0"', svg)
        self.assertIn('id="actual-1"', svg)
        self.assertNotIn('id="actual-2"', svg)

    def test_unwritable_path(self):
        blocker = self.dir / "file"
        blocker.write_text("x")
        with self.assertRaises(IoError):
            write_csv(blocker / "table.csv", ["a"], [[1]])

    def test_bad_requests(self):
        with self.assertRaises(ValueError):
            export(small_table(), "xml", self.dir / "t.xml")
        with self.assertRaises(ValueError):
            export(curvy(), "csv", self.dir / "t.csv")
        with self.assertRaises(ValueError):
            export(small_table(), "svg", self.dir / "t.svg")
        with self.assertRaises(TypeError):
            export(object(), "csv", self.dir / "t.csv")
        self.assertFalse(os.path.exists(self.dir / "t.csv"))


if __name__ == "__main__":
    unittest.main()
