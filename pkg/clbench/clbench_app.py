#!/usr/bin/env python3
"""
The clbench command line app.
"""

__author__ = "The clbench developers"
__version__ = "1.0.0"
__license__ = "MIT"

import logging
import logging.handlers
from pathlib import Path

import tabulate as tb

from clbench.clbench_export import export, plot_paths, write_json
from clbench.clbench_harness import (
    SWEEP_AXES,
    BenchSetup,
    LoopMode,
    SuiteMatrix,
    run_case,
    run_suite,
    seed_for,
    sweep,
)
from clbench.clbench_helper import ClBenchError, ClBenchHelper, timeit
from clbench.clbench_metrics import ate, load_trajectory, tracking_rmse

COMMANDS = ("run", "suite", "sweep", "eval", "plot", "list")


def _split(text, cast=str):
    if text is None:
        return None
    return tuple(cast(item.strip()) for item in text.split(",") if item.strip())


class ClBenchApp:
    logger = None

    def __init__(self, config=None, config_path=None):
        self.logger = logging.getLogger("clbench")
        formatter = logging.Formatter(
            "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
        )

        if config is None:
            self.logger.debug(">> Loading config file")
            if config_path is None and Path("config.json").exists():
                config_path = "config.json"
            config = ClBenchHelper.load_config(config_path)
        self.config = config

        if not self.logger.handlers:
            fh = logging.handlers.RotatingFileHandler(
                self.config["log_filename"], maxBytes=500000, backupCount=2
            )
            fh.setLevel(self.config["log_level"])
            fh.setFormatter(formatter)
            self.logger.addHandler(fh)
            sh = logging.StreamHandler()
            sh.setLevel(logging.ERROR)  # This gets outputted to stdout
            sh.setFormatter(formatter)
            self.logger.addHandler(sh)
        self.logger.setLevel(self.config["log_level"])

        self.setup = BenchSetup(self.config)

    def start(self, args):
        """Run one subcommand and return the process exit code."""
        self.apply_overrides(args)
        handler = getattr(self, f"cmd_{args.command}")
        try:
            handler(args)
        except ClBenchError as err:
            self.logger.error(err.bench_msg())
            return 1
        except (ValueError, OSError) as err:
            self.logger.error(f"[clbench] {err}")
            return 1
        return 0

    def apply_overrides(self, args):
        for key in ("seed", "repeats", "workers"):
            value = getattr(args, key, None)
            if value is not None:
                self.config[key] = value
        if getattr(args, "loop_mode", None):
            self.config["loop_mode"] = args.loop_mode
        if getattr(args, "out", None):
            self.config["output_dir"] = args.out

    @property
    def out_dir(self) -> Path:
        return Path(self.config["output_dir"])

    def write_summary(self, data):
        path = write_json(self.out_dir / "summary.json", data)
        print(f"Summary written to {path}.")
        return path

    def print_table(self, headers, rows, title=None):
        if title:
            print(f"\n{title}\n")
        print(tb.tabulate(rows, headers=headers, tablefmt="simple"))

    # -- commands ------------------------------------------------------------

    def cmd_run(self, args):
        scenario = args.scenario or self.config["suite"]["scenarios"][0]
        cfg = self.setup.run_config(
            scenario,
            args.speed,
            args.estimator or self.config["suite"]["estimators"][0],
            args.imu or self.config["suite"]["imus"][0],
            seed=seed_for(self.config["seed"], 0),
        )
        print(
            f"Running {scenario} at {cfg.v_des:g} m/s "
            f"with {cfg.estimator.name} / {cfg.imu.name}..."
        )
        result = run_case(cfg)
        self.logger.debug("-> cmd_run: Done")

        fmt = ClBenchHelper.format_cell
        ate_rmse = result.estimator_ate.rmse_trans if result.estimator_ate else None
        rows = [
            ["Tracking RMSE [m]", fmt(result.metrics.rmse_trans, 4)],
            ["Yaw RMSE [rad]", fmt(result.metrics.rmse_yaw, 4)],
            ["Max error [m]", fmt(result.metrics.max_err, 4)],
            ["Estimator ATE [m]", fmt(ate_rmse, 4)],
            ["Mean latency [ms]", fmt(result.latency_stats[0] * 1000.0, 1)],
            ["Peak accel [m/s^2]", fmt(result.peak_accel[0], 3)],
            ["Saturations", result.saturation_count],
            ["Dropped fixes", result.dropped_fixes],
            ["Failed", "✓" if result.failed else ""],
        ]
        self.print_table(["Metric", "Value"], rows)

        name = f"{scenario}_{cfg.v_des:g}_{cfg.estimator.name}_{cfg.imu.name}"
        stem = self.out_dir / name
        export(result, "traj", f"{stem}.traj", precision=self.config["traj_precision"])
        export(result, "svg", f"{stem}.svg")
        export(result, "csv", f"{stem}.csv")
        self.write_summary(result.to_summary())

    @timeit
    def cmd_suite(self, args, **kwargs):
        default = self.setup.default_matrix()
        matrix = SuiteMatrix(
            scenarios=_split(args.scenarios) or default.scenarios,
            speeds=_split(args.speeds, float) or default.speeds,
            estimators=_split(args.estimators) or default.estimators,
            imus=_split(args.imus) or default.imus,
        )
        repeats = int(self.config["repeats"])
        print(
            f"Running {matrix.size * repeats} runs "
            f"({matrix.size} cells x {repeats} repeats)..."
        )
        result = run_suite(
            self.setup,
            matrix,
            repeats=repeats,
            seed=int(self.config["seed"]),
            loop_mode=LoopMode(self.config["loop_mode"]),
            workers=int(self.config["workers"]),
            log_time_label="Suite",
        )
        for table in result.tables:
            title = f"{table.label}, {table.metric}"
            self.print_table(table.headers, table.rows(), title)
        export(result, "csv", self.out_dir / "suite.csv")
        self.write_summary(result.to_dict())

    def cmd_sweep(self, args):
        if args.axis not in SWEEP_AXES:
            raise ValueError(
                f"unknown sweep axis '{args.axis}', choose from {', '.join(SWEEP_AXES)}"
            )
        suite = self.config["suite"]
        base = self.setup.run_config(
            args.scenario or "straight",
            args.speed,
            args.estimator or suite["estimators"][0],
            args.imu or suite["imus"][0],
        )
        values = _split(args.values, float)
        result = sweep(
            base,
            args.axis,
            values,
            repeats=int(self.config["repeats"]),
            workers=int(self.config["workers"]),
            log_time_label="Sweep",
        )
        self.print_table([args.axis, "Mean RMSE [m]", "Std. err.", "n"], result.rows())
        export(result, "csv", self.out_dir / f"sweep_{args.axis}.csv")
        self.write_summary(result.to_dict())

    def cmd_eval(self, args):
        reference = load_trajectory(args.reference)
        path = load_trajectory(args.trajectory)
        threshold = float(self.config["failure_threshold"])
        if args.ate:
            report = ate(path, reference, align=args.align, threshold=threshold)
        else:
            report = tracking_rmse(reference, path, threshold)
        rows = [[key, value] for key, value in report.to_dict().items()]
        self.print_table(["Metric", "Value"], rows)
        self.write_summary(report.to_dict())

    def cmd_plot(self, args):
        desired = load_trajectory(args.desired)
        labels = _split(args.labels) or tuple(Path(p).stem for p in args.actual)
        if len(labels) != len(args.actual):
            raise ValueError("need one label per trajectory file")
        actuals = [(label, load_trajectory(p)) for label, p in zip(labels, args.actual)]
        target = Path(args.output) if args.output else self.out_dir / "plot.svg"
        plot_paths(target, desired, actuals, args.title or "")
        print(f"Plot written to {target}.")
        self.write_summary(
            {
                "desired": str(args.desired),
                "actual": [str(p) for p in args.actual],
                "labels": list(labels),
                "output": str(target),
            }
        )

    def cmd_list(self, args):
        scenarios = {
            name: self.setup.scenario(name) for name in self.setup.scenario_names()
        }
        imus = {name: self.setup.imu(name) for name in self.setup.imu_names()}
        presets = self.config["estimator_presets"]
        estimators = {name: presets[name] for name in self.setup.estimator_names()}

        self.print_table(
            ["Scenario", "Points", "Default speed"],
            [[n, len(s.points), s.default_v_des] for n, s in scenarios.items()],
            "Scenarios",
        )
        self.print_table(
            ["IMU", "Provenance"],
            [[n, imu.provenance] for n, imu in imus.items()],
            "IMU presets",
        )
        self.print_table(
            ["Estimator", "Latency [ms]", "Drift [m/sqrt(m)]"],
            [
                [n, p["latency"] * 1000.0, p.get("drift_rate_trans", 0.0)]
                for n, p in estimators.items()
            ],
            "Estimator presets",
        )
        self.write_summary(
            {
                "scenarios": {n: s.to_dict() for n, s in scenarios.items()},
                "imus": {n: imu.to_dict() for n, imu in imus.items()},
                "estimators": estimators,
            }
        )
