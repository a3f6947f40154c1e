#!/usr/bin/env python3
"""
Result artifacts: CSV and JSON tables, plain-text trajectory files and SVG
trajectory plots.
"""

__author__ = "The clbench developers"
__version__ = "1.0.0"
__license__ = "MIT"

import csv
import json
import logging
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from clbench.clbench_harness import (  # noqa: E402
    ResultTable,
    RunResult,
    SuiteResult,
    SweepResult,
)
from clbench.clbench_helper import ClBenchError, ClBenchHelper  # noqa: E402
from clbench.clbench_metrics import TimedPath  # noqa: E402
from clbench.clbench_se2 import unwrap  # noqa: E402

logger = logging.getLogger(__name__)

FORMATS = ("csv", "json", "traj", "svg")
TRAJ_PRECISION = 9
RUN_CSV_HEADER = [
    "t",
    "desired_x",
    "desired_y",
    "desired_theta",
    "actual_x",
    "actual_y",
    "actual_theta",
    "est_x",
    "est_y",
    "est_theta",
]

matplotlib.rcParams["svg.hashsalt"] = "clbench"


class IoError(ClBenchError):
    pass


def _ensure_parent(path: Path):
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
    except OSError as err:
        raise IoError(f"Cannot create directory {path.parent}: {err.strerror}")


def write_csv(path, header, rows):
    path = Path(path)
    _ensure_parent(path)
    try:
        with open(path, "w", newline="", encoding="utf-8") as csv_file:
            csv_writer = csv.writer(csv_file, delimiter=";")
            csv_writer.writerow(header)
            csv_writer.writerows(rows)
    except OSError as err:
        raise IoError(f"Cannot write {path}: {err.strerror}")
    logger.debug(f"write_csv:: {len(rows)} lines written to {path}.")
    return path


def write_json(path, data):
    path = Path(path)
    _ensure_parent(path)
    try:
        with open(path, "w", encoding="utf-8") as json_file:
            json.dump(
                ClBenchHelper.to_jsonable(data), json_file, indent=2, sort_keys=True
            )
            json_file.write("\n")
    except OSError as err:
        raise IoError(f"Cannot write {path}: {err.strerror}")
    return path


def write_trajectory(path, traj: TimedPath, precision=TRAJ_PRECISION):
    """One `t x y theta` line per sample, `precision` significant digits."""
    path = Path(path)
    _ensure_parent(path)
    fmt = f"%.{precision}g"
    try:
        with open(path, "w", encoding="utf-8") as traj_file:
            traj_file.write("# t x y theta\n")
            for t, (x, y, theta) in zip(traj.t, traj.poses):
                traj_file.write(" ".join(fmt % v for v in (t, x, y, theta)) + "\n")
    except OSError as err:
        raise IoError(f"Cannot write {path}: {err.strerror}")
    return path


def plot_paths(path, desired: TimedPath, actuals, title=""):
    """
    Overlay the desired path (dashed) and one solid path per entry of
    `actuals`, a list of (label, TimedPath). Groups carry the ids
    `desired` and `actual-<i>`.
    """
    path = Path(path)
    _ensure_parent(path)
    fig, ax = plt.subplots(figsize=(6, 6))
    (line,) = ax.plot(
        desired.xy[:, 0], desired.xy[:, 1], "k--", linewidth=1.0, label="desired"
    )
    line.set_gid("desired")
    colors = plt.rcParams["axes.prop_cycle"].by_key()["color"]
    for i, (label, actual) in enumerate(actuals):
        (line,) = ax.plot(
            actual.xy[:, 0],
            actual.xy[:, 1],
            "-",
            color=colors[i % len(colors)],
            linewidth=1.2,
            label=label,
        )
        line.set_gid(f"actual-{i}")
    ax.set_aspect("equal", adjustable="datalim")
    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")
    if title:
        ax.set_title(title)
    ax.legend(loc="best", fontsize="small")
    try:
        fig.savefig(path, format="svg", metadata={"Date": None})
    except OSError as err:
        raise IoError(f"Cannot write {path}: {err.strerror}")
    finally:
        plt.close(fig)
    return path


def table_rows(table: ResultTable):
    return table.headers, table.rows()


def _export_run(result: RunResult, fmt, path: Path, precision=TRAJ_PRECISION):
    if fmt == "json":
        return [write_json(path, result.to_summary())]
    if fmt == "csv":
        return [write_csv(path, RUN_CSV_HEADER, _run_rows(result))]
    if fmt == "traj":
        stem = path.with_suffix("")
        return [
            write_trajectory(
                Path(f"{stem}_{kind}.traj"), getattr(result, kind), precision
            )
            for kind in ("desired", "actual", "estimated")
        ]
    cfg = result.config
    label = f"{cfg.estimator.name} ({cfg.imu.name})"
    title = f"{cfg.scenario.name} @ {cfg.v_des:g} m/s"
    return [plot_paths(path, result.desired, [(label, result.actual)], title)]


def _run_rows(result: RunResult):
    """Per-sample rows with continuous (unwrapped) headings."""
    columns = [result.desired.t]
    for traj in (result.desired, result.actual, result.estimated):
        columns += [traj.poses[:, 0], traj.poses[:, 1], unwrap(traj.poses[:, 2])]
    return [[f"{v:.9g}" for v in row] for row in zip(*columns)]


def _export_table(table: ResultTable, fmt, path: Path):
    if fmt == "json":
        return [write_json(path, table.to_dict())]
    header, rows = table_rows(table)
    return [write_csv(path, header, rows)]


def _export_suite(suite: SuiteResult, fmt, path: Path):
    if fmt == "json":
        return [write_json(path, suite.to_dict())]
    stem = path.with_suffix("")
    written = []
    for table in suite.tables:
        slug = table.title.replace(" @ ", "_").replace(" m/s", "").replace(" ", "_")
        written += _export_table(table, "csv", Path(f"{stem}_{slug}.csv"))
    return written


def _export_sweep(result: SweepResult, fmt, path: Path):
    if fmt == "json":
        return [write_json(path, result.to_dict())]
    return [write_csv(path, [result.axis, "mean_rmse", "stderr", "n"], result.rows())]


def export(result, fmt, path, precision=TRAJ_PRECISION):
    """
    Write `result` (RunResult, ResultTable, SuiteResult, SweepResult or
    TimedPath) as csv, json, traj or svg. Returns the written paths.
    """
    if fmt not in FORMATS:
        choices = ", ".join(FORMATS)
        raise ValueError(f"unknown export format '{fmt}', choose from {choices}")
    path = Path(path)
    if isinstance(result, TimedPath):
        if fmt != "traj":
            raise ValueError("trajectories export as traj only")
        return [write_trajectory(path, result, precision)]
    if isinstance(result, RunResult):
        return _export_run(result, fmt, path, precision)
    if fmt in ("traj", "svg"):
        raise ValueError(f"{type(result).__name__} cannot be exported as {fmt}")
    if isinstance(result, ResultTable):
        return _export_table(result, fmt, path)
    if isinstance(result, SuiteResult):
        return _export_suite(result, fmt, path)
    if isinstance(result, SweepResult):
        return _export_sweep(result, fmt, path)
    raise TypeError(f"cannot export {type(result).__name__}")
