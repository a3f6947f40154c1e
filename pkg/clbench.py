#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Command line interface for the clbench closed-loop benchmark.
"""

__author__ = "The clbench developers"
__version__ = "1.0.0"
__license__ = "MIT"

import argparse
import sys

from clbench.clbench_app import ClBenchApp
from clbench.clbench_harness import SWEEP_AXES
from clbench.clbench_helper import ClBenchError


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--config",
        metavar="<file>",
        type=str,
        help="Config file (defaults to config.json if present).",
    )
    common.add_argument("--seed", metavar="<u64>", type=int, help="Suite seed.")
    common.add_argument("--repeats", metavar="<n>", type=int, help="Repeats per cell.")
    common.add_argument(
        "--workers",
        metavar="<n>",
        type=int,
        help="Worker processes for suite and sweep.",
    )
    common.add_argument("--out", metavar="<dir>", type=str, help="Output directory.")
    common.add_argument(
        "--loop-mode",
        dest="loop_mode",
        choices=["closed", "open"],
        help="Feed the controller the estimate (closed) or the truth (open).",
    )

    case = argparse.ArgumentParser(add_help=False)
    case.add_argument("--scenario", metavar="<name>", type=str)
    case.add_argument(
        "--speed",
        metavar="<m/s>",
        type=float,
        help="Desired speed (defaults to the scenario's).",
    )
    case.add_argument("--estimator", metavar="<preset>", type=str)
    case.add_argument("--imu", metavar="<preset>", type=str)

    parser = argparse.ArgumentParser(description="clbench command line interface.")
    parser.add_argument("--version", action="version", version=__version__)
    subparsers = parser.add_subparsers(dest="command", required=True)

    subparsers.add_parser("run", parents=[common, case], help="Simulate a single case.")

    suite = subparsers.add_parser(
        "suite",
        parents=[common],
        help="Run the scenario x speed x estimator x IMU matrix.",
    )
    suite.add_argument("--scenarios", metavar="<a,b,...>", type=str)
    suite.add_argument("--speeds", metavar="<v,v,...>", type=str)
    suite.add_argument("--estimators", metavar="<a,b,...>", type=str)
    suite.add_argument("--imus", metavar="<a,b,...>", type=str)

    sweep = subparsers.add_parser(
        "sweep", parents=[common, case], help="Sweep one parameter axis."
    )
    sweep.add_argument("--axis", required=True, choices=sorted(SWEEP_AXES))
    sweep.add_argument(
        "--values",
        required=True,
        metavar="<v,v,...>",
        type=str,
        help="Ascending values.",
    )

    evaluate = subparsers.add_parser(
        "eval", parents=[common], help="Metrics on trajectory files."
    )
    evaluate.add_argument("reference", help="Desired (or true) trajectory file.")
    evaluate.add_argument("trajectory", help="Actual (or estimated) trajectory file.")
    evaluate.add_argument(
        "--ate",
        action="store_true",
        help="Absolute trajectory error instead of tracking RMSE.",
    )
    evaluate.add_argument(
        "--align", action="store_true", help="Rigidly align before computing ATE."
    )

    plot = subparsers.add_parser(
        "plot", parents=[common], help="SVG from trajectory files."
    )
    plot.add_argument("desired")
    plot.add_argument("actual", nargs="+")
    plot.add_argument("--labels", metavar="<a,b,...>", type=str)
    plot.add_argument("--title", type=str)
    plot.add_argument("--output", metavar="<file>", type=str)

    subparsers.add_parser("list", parents=[common], help="List scenarios and presets.")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        app = ClBenchApp(config_path=args.config)
    except ClBenchError as err:
        print(err.bench_msg(), file=sys.stderr)
        return 1
    return app.start(args)


if __name__ == "__main__":
    """ This is executed when run from the command line """
    sys.exit(main())
