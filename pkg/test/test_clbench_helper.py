"""
Python unittest
"""
import json
import math
import os
import tempfile
import unittest

import numpy as np

from clbench.clbench_helper import ClBenchError, ClBenchHelper, ConfigError


class TestClBenchHelper(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmp.cleanup()

    def write_json(self, name, data):
        path = os.path.join(self.tmp.name, name)
        with open(path, "w") as f:
            json.dump(data, f)
        return path

    def test_update_recursive(self):
        user = {"a": 1, "nested": {"x": 10}}
        template = {"a": 2, "b": 3, "nested": {"x": 0, "y": 5}}
        merged = ClBenchHelper.update_recursive(user, template)
        self.assertEqual(merged, {"a": 1, "b": 3, "nested": {"x": 10, "y": 5}})

    def test_load_config_fills_from_template(self):
        template = self.write_json(
            "template.json", {"seed": 0, "rates": {"control": 50.0, "imu": 200.0}}
        )
        config = self.write_json("config.json", {"seed": 3, "rates": {"imu": 100.0}})
        loaded = ClBenchHelper.load_config(config, template)
        self.assertEqual(loaded, {"seed": 3, "rates": {"control": 50.0, "imu": 100.0}})
        self.assertEqual(ClBenchHelper.load_config(None, template)["seed"], 0)

    def test_load_config_errors(self):
        template = self.write_json("template.json", {"seed": 0})
        missing = os.path.join(self.tmp.name, "missing.json")
        with self.assertRaises(ConfigError):
            ClBenchHelper.load_config(missing, template)
        with self.assertRaises(ConfigError):
            ClBenchHelper.load_config(None, missing)
        broken = os.path.join(self.tmp.name, "broken.json")
        with open(broken, "w") as f:
            f.write("{ not json")
        with self.assertRaises(ConfigError):
            ClBenchHelper.load_config(broken, template)

    def test_shipped_template_loads(self):
        config = ClBenchHelper.load_config()
        self.assertEqual(config["failure_threshold"], 10.0)
        self.assertEqual(len(config["suite"]["estimators"]), 5)

    def test_mean_and_stderr(self):
        mean, err = ClBenchHelper.mean_and_stderr([1.0, 2.0, 3.0, 4.0])
        self.assertAlmostEqual(mean, 2.5)
        self.assertAlmostEqual(err, math.sqrt(5.0 / 3.0) / 2.0)
        self.assertEqual(ClBenchHelper.mean_and_stderr([2.0]), (2.0, 0.0))
        self.assertTrue(all(math.isnan(v) for v in ClBenchHelper.mean_and_stderr([])))

    def test_percentile(self):
        self.assertAlmostEqual(ClBenchHelper.percentile([0.0, 10.0], 95), 9.5)
        self.assertEqual(ClBenchHelper.percentile([], 95), 0.0)

    def test_format_cell(self):
        self.assertEqual(ClBenchHelper.format_cell(0.12345), "0.123")
        self.assertEqual(ClBenchHelper.format_cell(65.0, 1), "65.0")
        self.assertEqual(ClBenchHelper.format_cell(None), "-")
        self.assertEqual(ClBenchHelper.format_cell(math.nan), "-")

    def test_to_jsonable(self):
        data = {
            "a": (1, np.float64(2.5)),
            "b": np.array([1.0, math.inf]),
            "c": np.float64(math.nan),
            3: None,
        }
        self.assertEqual(
            ClBenchHelper.to_jsonable(data),
            {"a": [1, 2.5], "b": [1.0, None], "c": None, "3": None},
        )
        json.dumps(ClBenchHelper.to_jsonable(data), allow_nan=False)

    def test_bench_msg(self):
        self.assertEqual(ClBenchError("Boom.").bench_msg(), "[clbench] Boom.")
        self.assertEqual(
            ClBenchError("Boom.", {"seed": 4}).bench_msg(), "[clbench] Boom. (seed=4)"
        )
        self.assertEqual(ClBenchError(None).bench_msg(), "[clbench] Unknown error.")


if __name__ == "__main__":
    unittest.main()
