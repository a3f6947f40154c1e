#!/usr/bin/env python3
"""
Helper functions for the clbench benchmark harness.
"""

__author__ = "The clbench developers"
__version__ = "1.0.0"
__license__ = "MIT"

import collections.abc
import json
import math
import statistics
import time
from pathlib import Path

import numpy as np

REPO_ROOT = Path(__file__).resolve().parent.parent


def timeit(method):
    def timed(*args, **kw):
        ts = time.time()
        result = method(*args, **kw)
        te = time.time()
        if "log_time_label" in kw:
            print(f"{kw['log_time_label']} took {round(te - ts)}s")
        return result

    return timed


class ClBenchError(Exception):
    def __init__(self, message, context=None):
        if message is None:
            message = "Unknown error."
        super().__init__(message)

        self.context = context or {}

    def bench_msg(self):
        prefix_string = "[clbench] "
        error_string = str(self.args[0])
        if self.context:
            details = ", ".join(f"{k}={v}" for k, v in self.context.items())
            error_string = f"{error_string} ({details})"
        return prefix_string + error_string


class ConfigError(ClBenchError):
    pass


class ClBenchHelper:
    @staticmethod
    def update_recursive(d, u):
        # only adds keys missing from d, user values win
        for k, v in u.items():
            if isinstance(v, collections.abc.Mapping):
                d[k] = ClBenchHelper.update_recursive(d.get(k, {}), v)
            elif k not in d:
                d[k] = v
        return d

    @staticmethod
    def load_config(path=None, template_path=None):
        if template_path is None:
            template_path = REPO_ROOT / "config_template.json"
        try:
            with open(template_path, "r") as template_config_file:
                template_config = json.load(template_config_file)
        except FileNotFoundError:
            raise ConfigError(f"Config template {template_path} not found.")

        if path is None:
            return template_config
        try:
            with open(path, "r") as config_file:
                config = json.load(config_file)
        except FileNotFoundError:
            raise ConfigError(f"Config file {path} not found.")
        except json.JSONDecodeError as err:
            raise ConfigError(f"Config file {path} is not valid JSON: {err}")
        # Sync missing attributes to active config
        return ClBenchHelper.update_recursive(config, template_config)

    @staticmethod
    def resolve_path(path):
        path = Path(path)
        if path.is_absolute() or path.exists():
            return path
        return REPO_ROOT / path

    @staticmethod
    def mean_and_stderr(values):
        if not values:
            return math.nan, math.nan
        mean = statistics.fmean(values)
        if len(values) < 2:
            return mean, 0.0
        return mean, statistics.stdev(values) / math.sqrt(len(values))

    @staticmethod
    def percentile(values, q):
        if len(values) == 0:
            return 0.0
        return float(np.percentile(np.asarray(values, dtype=float), q))

    @staticmethod
    def format_cell(value, digits=3):
        if value is None or (isinstance(value, float) and math.isnan(value)):
            return "-"
        return f"{value:.{digits}f}"

    @staticmethod
    def to_jsonable(obj):
        """Turn dataclasses, tuples and numpy scalars into plain JSON values."""
        if hasattr(obj, "to_dict"):
            return ClBenchHelper.to_jsonable(obj.to_dict())
        if isinstance(obj, collections.abc.Mapping):
            return {str(k): ClBenchHelper.to_jsonable(v) for k, v in obj.items()}
        if isinstance(obj, (list, tuple)):
            return [ClBenchHelper.to_jsonable(v) for v in obj]
        if isinstance(obj, np.ndarray):
            return [ClBenchHelper.to_jsonable(v) for v in obj.tolist()]
        if isinstance(obj, np.generic):
            return ClBenchHelper.to_jsonable(obj.item())
        if isinstance(obj, float) and not math.isfinite(obj):
            return None
        return obj
