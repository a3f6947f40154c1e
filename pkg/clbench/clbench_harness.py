#!/usr/bin/env python3
"""
Benchmark orchestration: single closed/open-loop runs, the scenario x speed x
estimator x IMU suite with repeats, and one-axis sweeps.
"""

__author__ = "The clbench developers"
__version__ = "1.0.0"
__license__ = "MIT"

import enum
import logging
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np
import progressbar

from clbench.clbench_controller import (
    FlatGains,
    IntegrationDiverged,
    ReferenceTrajectory,
    SingularOffset,
    TrackingGains,
    generate_reference,
    velocity_command,
)
from clbench.clbench_estimators import (
    EstimatorConfig,
    EstimatorMode,
    resolve_estimator_class,
)
from clbench.clbench_helper import ClBenchError, ClBenchHelper, ConfigError, timeit
from clbench.clbench_metrics import (
    FAILURE_THRESHOLD,
    MetricReport,
    NoAssociation,
    TimedPath,
    ate,
    tracking_rmse,
)
from clbench.clbench_se2 import BodyVelocity, Pose2
from clbench.clbench_sensors import (
    CameraSchedule,
    ImuBias,
    ImuModel,
    frame_times,
    imu_sample,
    load_imu_preset,
)
from clbench.clbench_trajectory import (
    DesiredTrajectory,
    TrajectoryLimits,
    WaypointList,
    fit_spline,
    load_scenario,
    motion_profile,
)
from clbench.clbench_vehicle import (
    TruthHistory,
    VehicleLimits,
    VehicleState,
    actual_accel,
    clamp_velocity,
    step,
    within_limits,
)

logger = logging.getLogger(__name__)

DEFAULT_ESTIMATOR_CLASS = "clbench.clbench_estimators.LooseFusionEstimator"
BASE_TICK_HZ = 1000
ZERO_VELOCITY = BodyVelocity()


class ReferenceGenFailed(ClBenchError):
    pass


class RunFailed(ClBenchError):
    pass


class LoopMode(str, enum.Enum):
    CLOSED = "closed"
    OPEN = "open"


def _ticks(rate, what):
    ticks = BASE_TICK_HZ / rate
    if abs(ticks - round(ticks)) > 1e-9 or round(ticks) < 1:
        raise ConfigError(f"{what} rate {rate} Hz does not divide the 1 ms base tick.")
    return int(round(ticks))


@dataclass(frozen=True)
class Rates:
    control: float = 50.0
    imu: float = 200.0
    camera: float = 30.0

    def __post_init__(self):
        imu_ticks = _ticks(self.imu, "IMU")
        control_ticks = _ticks(self.control, "Control")
        if control_ticks % imu_ticks:
            raise ConfigError(
                "The control period must be a multiple of the IMU period."
            )
        if self.camera <= 0:
            raise ConfigError("Camera rate must be positive.")

    @property
    def imu_ticks(self):
        return _ticks(self.imu, "IMU")

    @property
    def control_every(self):
        return _ticks(self.control, "Control") // self.imu_ticks

    def to_dict(self):
        return {"control": self.control, "imu": self.imu, "camera": self.camera}


@dataclass(frozen=True)
class RunConfig:
    scenario: WaypointList
    v_des: float
    estimator: EstimatorConfig
    flat_gains: FlatGains = FlatGains()
    tracking_gains: TrackingGains = TrackingGains()
    vehicle_limits: VehicleLimits = VehicleLimits()
    trajectory_limits: TrajectoryLimits = TrajectoryLimits()
    seed: int = 0
    warmup: float = 10.0
    settle_time: float = 2.0
    rates: Rates = Rates()
    camera_first_frame: float = 0.0
    loop_mode: LoopMode = LoopMode.CLOSED
    estimator_class: str = DEFAULT_ESTIMATOR_CLASS
    reference_rate: Optional[float] = None
    reference_substeps: int = 4
    failure_threshold: float = FAILURE_THRESHOLD
    abort_error: float = 2.0 * FAILURE_THRESHOLD
    repeat: int = 0

    def __post_init__(self):
        object.__setattr__(self, "loop_mode", LoopMode(self.loop_mode))
        if self.warmup < 0:
            raise ConfigError("Warmup must be non-negative.")
        if self.estimator.imu.rate != self.rates.imu:
            imu = replace(self.estimator.imu, rate=self.rates.imu)
            object.__setattr__(self, "estimator", replace(self.estimator, imu=imu))

    @property
    def imu(self) -> ImuModel:
        return self.estimator.imu

    @property
    def context(self):
        return {
            "scenario": self.scenario.name,
            "v_des": self.v_des,
            "estimator": self.estimator.name,
            "imu": self.imu.name,
            "seed": self.seed,
        }

    @property
    def reference_key(self):
        return (
            self.scenario,
            self.v_des,
            self.flat_gains,
            self.trajectory_limits,
            self.vehicle_limits,
            self.reference_rate or self.rates.control,
            self.reference_substeps,
            self.settle_time,
        )

    def to_dict(self):
        return {
            "scenario": self.scenario.name,
            "v_des": self.v_des,
            "estimator": self.estimator.to_dict(),
            "flat_gains": self.flat_gains.to_dict(),
            "tracking_gains": self.tracking_gains.to_dict(),
            "vehicle_limits": self.vehicle_limits.to_dict(),
            "trajectory_limits": self.trajectory_limits.to_dict(),
            "seed": self.seed,
            "warmup": self.warmup,
            "settle_time": self.settle_time,
            "rates": self.rates.to_dict(),
            "camera_first_frame": self.camera_first_frame,
            "loop_mode": self.loop_mode.value,
            "estimator_class": self.estimator_class,
            "reference_rate": self.reference_rate or self.rates.control,
            "reference_substeps": self.reference_substeps,
            "failure_threshold": self.failure_threshold,
            "abort_error": self.abort_error,
            "repeat": self.repeat,
        }


@dataclass
class RunResult:
    config: RunConfig
    desired: TimedPath
    actual: TimedPath
    estimated: TimedPath
    metrics: MetricReport
    estimator_ate: Optional[MetricReport]
    latency_stats: Tuple[float, float]
    saturation_count: int
    dropped_fixes: int
    corrections: int = 0
    peak_est_error: float = 0.0
    residual_stats: Tuple[float, float] = (0.0, 0.0)
    peak_accel: Tuple[float, float] = (0.0, 0.0)
    aborted: bool = False
    error: str = ""

    @property
    def failed(self):
        return self.metrics.failed

    @property
    def duration(self):
        """Simulated seconds covered by the recorded actual path."""
        return float(self.actual.t[-1] - self.actual.t[0])

    def score(self):
        """Table value: tracking RMSE in closed loop, estimator ATE in open loop."""
        if self.config.loop_mode == LoopMode.OPEN and self.estimator_ate is not None:
            return self.estimator_ate.rmse_trans, self.estimator_ate.failed
        return self.metrics.rmse_trans, self.metrics.failed

    def to_summary(self):
        return {
            "config": self.config.to_dict(),
            "metrics": self.metrics.to_dict(),
            "estimator_ate": (
                self.estimator_ate.to_dict() if self.estimator_ate else None
            ),
            "latency_mean": self.latency_stats[0],
            "latency_p95": self.latency_stats[1],
            "saturation_count": self.saturation_count,
            "dropped_fixes": self.dropped_fixes,
            "corrections": self.corrections,
            "peak_est_error": self.peak_est_error,
            "residual_mean": self.residual_stats[0],
            "residual_max": self.residual_stats[1],
            "peak_accel": self.peak_accel[0],
            "peak_alpha": self.peak_accel[1],
            "duration": self.duration,
            "aborted": self.aborted,
            "error": self.error,
        }


def seed_for(suite_seed: int, repeat: int) -> int:
    """
    64-bit run seed derived from the suite seed and the repeat index. Every
    cell of one repeat gets the same seed, so estimators are compared on
    common random numbers.
    """
    seq = np.random.SeedSequence([int(suite_seed), int(repeat)])
    state = seq.generate_state(1, dtype=np.uint64)
    return int(state[0])


def build_trajectory(cfg: RunConfig) -> DesiredTrajectory:
    return fit_spline(cfg.scenario, cfg.v_des, cfg.trajectory_limits)


def build_reference(cfg: RunConfig, traj: DesiredTrajectory) -> ReferenceTrajectory:
    g0 = Pose2(*traj.points[0], traj.heading(0.0))
    try:
        return generate_reference(
            traj,
            cfg.flat_gains,
            g0,
            cfg.reference_rate or cfg.rates.control,
            limits=cfg.vehicle_limits,
            substeps=cfg.reference_substeps,
            settle_time=cfg.settle_time,
        )
    except (IntegrationDiverged, SingularOffset) as err:
        raise ReferenceGenFailed(err.bench_msg(), cfg.context)


def run_case(
    cfg: RunConfig,
    desired: Optional[DesiredTrajectory] = None,
    reference: Optional[ReferenceTrajectory] = None,
) -> RunResult:
    """
    Simulate one run. The loop advances on the IMU grid of the 1 ms base
    clock; at every tick the IMU reading is processed first, then camera
    captures and due visual fixes, then the controller.
    """
    try:
        traj = desired if desired is not None else build_trajectory(cfg)
        ref = reference if reference is not None else build_reference(cfg, traj)
        return _simulate(cfg, traj, ref)
    except (ReferenceGenFailed, RunFailed):
        raise
    except ClBenchError as err:
        raise RunFailed(err.bench_msg(), cfg.context)


def _simulate(
    cfg: RunConfig, traj: DesiredTrajectory, ref: ReferenceTrajectory
) -> RunResult:
    rates = cfg.rates
    imu_ticks = rates.imu_ticks
    period = imu_ticks / BASE_TICK_HZ
    control_every = rates.control_every
    output_every = max(1, _ticks(cfg.estimator.output_rate, "Output") // imu_ticks)
    warmup_k = int(round(cfg.warmup / period))
    if abs(warmup_k * period - cfg.warmup) > 1e-9:
        raise ConfigError("Warmup must be a multiple of the IMU period.")
    warmup = warmup_k * period
    total_k = warmup_k + int(math.ceil(ref.duration / period - 1e-9))
    horizon = total_k * period

    imu_seq, fix_seq, jitter_seq = np.random.SeedSequence(cfg.seed).spawn(3)
    imu_rng = np.random.default_rng(imu_seq)
    fix_rng = np.random.default_rng(fix_seq)
    jitter_rng = np.random.default_rng(jitter_seq)

    est_cfg = cfg.estimator
    if cfg.loop_mode == LoopMode.OPEN:
        est_cfg = replace(est_cfg, mode=EstimatorMode.GROUND_TRUTH)
    camera = CameraSchedule(rate=rates.camera, first_frame=cfg.camera_first_frame)
    g0 = Pose2(*ref.poses[0])
    estimator_class = resolve_estimator_class(cfg.estimator_class)
    estimator = estimator_class(est_cfg, fix_rng, jitter_rng, camera.period, g0, 0.0)

    limits = cfg.vehicle_limits
    truth = TruthHistory(VehicleState(g0, ZERO_VELOCITY, 0.0))
    bias = ImuBias.initial(est_cfg.imu)
    frames = frame_times(camera, horizon)
    next_frame = 0

    cmd = ZERO_VELOCITY
    published = g0
    saturation = 0
    accel = (0.0, 0.0)
    peak_accel = (0.0, 0.0)
    peak_est_error = 0.0
    aborted = False
    log_t, log_actual, log_est = [], [], []

    state = truth.latest
    prev_state = None
    for k in range(total_k + 1):
        t = k * imu_ticks / BASE_TICK_HZ
        if prev_state is not None:
            reading, bias = imu_sample(
                prev_state, state, est_cfg.imu, bias, imu_rng, dt=period
            )
            estimator.propagate(reading)
        while next_frame < len(frames) and frames[next_frame] <= t + 1e-12:
            # hardware-synced camera: exposure stamped on the triggering IMU tick
            estimator.capture(truth, t)
            next_frame += 1
        estimator.apply_fixes(t, truth_pose=state.pose)
        if k % output_every == 0:
            published = estimator.output(t, state.pose)

        if k % control_every == 0:
            if k >= warmup_k:
                tau = t - warmup
                g_star, v_star = ref.sample(tau)
                raw = velocity_command(published, g_star, v_star, cfg.tracking_gains)
                cmd, saturated = clamp_velocity(raw, limits)
                if saturated:
                    saturation += 1
                    logger.debug(
                        f"Command saturated at t={tau:.3f} s: "
                        f"raw=({raw.nu:.3f}, {raw.omega:.3f}) "
                        f"accel=({accel[0]:.3f}, {accel[1]:.3f})"
                    )
                est = estimator.estimate
                log_t.append(tau)
                log_actual.append((state.pose.x, state.pose.y, state.pose.theta))
                log_est.append((est.x, est.y, est.theta))
                est_error = math.hypot(est.x - state.pose.x, est.y - state.pose.y)
                peak_est_error = max(peak_est_error, est_error)
                off_track = math.hypot(g_star.x - state.pose.x, g_star.y - state.pose.y)
                if off_track > cfg.abort_error:
                    aborted = True
                    logger.warning(
                        f"Run aborted at t={tau:.2f} s: "
                        f"actual path left the reference ({cfg.context})"
                    )
                    break

        if k == total_k:
            break
        prev_state = state
        t_next = (k + 1) * imu_ticks / BASE_TICK_HZ
        state = step(state, cmd, limits, period, t_next=t_next)
        accel = actual_accel(prev_state, state)
        peak_accel = (
            max(peak_accel[0], abs(accel[0])),
            max(peak_accel[1], abs(accel[1])),
        )
        if not within_limits(prev_state, state, limits):
            raise RunFailed(
                f"Vehicle left its limits at t={t_next:.3f} s: "
                f"vel=({state.vel.nu:.6f}, {state.vel.omega:.6f}) "
                f"accel=({accel[0]:.6f}, {accel[1]:.6f})",
                cfg.context,
            )
        truth.append(state)

    if len(log_t) < 2:
        raise RunFailed("Run produced fewer than two trajectory samples.", cfg.context)

    tau = np.asarray(log_t)
    d_pos, _, _ = traj.eval(tau)
    desired = TimedPath(tau, np.column_stack([d_pos, traj.heading(tau)]))
    actual = TimedPath(tau, log_actual)
    estimated = TimedPath(tau, log_est)

    metrics = tracking_rmse(desired, actual, cfg.failure_threshold)
    if aborted:
        metrics = replace(metrics, failed=True)
    try:
        estimator_ate = ate(
            estimated, actual, align=True, threshold=cfg.failure_threshold
        )
    except NoAssociation:
        estimator_ate = None

    latencies = estimator.telemetry.latencies
    latency_stats = (
        float(np.mean(latencies)) if latencies else 0.0,
        ClBenchHelper.percentile(latencies, 95),
    )
    residuals = estimator.telemetry.residuals
    residual_stats = (0.0, 0.0)
    if residuals:
        residual_stats = (float(np.mean(residuals)), float(np.max(residuals)))
    logger.debug(
        f"-> run_case: Done {cfg.context} rmse={metrics.rmse_trans:.4f} "
        f"peak_accel=({peak_accel[0]:.3f}, {peak_accel[1]:.3f})"
    )
    return RunResult(
        config=cfg,
        desired=desired,
        actual=actual,
        estimated=estimated,
        metrics=metrics,
        estimator_ate=estimator_ate,
        latency_stats=latency_stats,
        saturation_count=int(saturation),
        dropped_fixes=estimator.telemetry.dropped_fixes,
        corrections=estimator.telemetry.corrections,
        peak_est_error=peak_est_error,
        residual_stats=residual_stats,
        peak_accel=peak_accel,
        aborted=aborted,
    )


# -- aggregation ---------------------------------------------------------------


@dataclass(frozen=True)
class CellStats:
    mean: Optional[float]
    n_ok: int
    n_total: int
    failed: bool

    def render(self, digits=3):
        if self.failed:
            return "-"
        text = ClBenchHelper.format_cell(self.mean, digits)
        if self.n_ok < self.n_total:
            text += f" ({self.n_ok}/{self.n_total})"
        return text

    def to_dict(self):
        return {
            "mean": self.mean,
            "n_ok": self.n_ok,
            "n_total": self.n_total,
            "failed": self.failed,
        }


def aggregate_cell(scores, threshold=FAILURE_THRESHOLD) -> CellStats:
    """
    `scores` is a list of (rmse, failed). The mean is taken over the runs
    that did not fail; the cell fails when every run failed or when the
    mean over all runs exceeds the threshold.
    """
    ok = [value for value, failed in scores if not failed]
    finite = [v for v, _ in scores if v is not None and math.isfinite(v)]
    mean_all = statistics.fmean(finite) if finite else math.inf
    failed = not ok or mean_all > threshold
    return CellStats(
        mean=statistics.fmean(ok) if ok else None,
        n_ok=len(ok),
        n_total=len(scores),
        failed=failed,
    )


@dataclass
class ResultTable:
    title: str
    metric: str
    scenarios: List[str]
    estimators: List[str]
    cells: Dict[Tuple[str, str], CellStats]
    avg_latency: Dict[str, float]
    repeats: int
    profile: str = ""

    @property
    def label(self):
        return f"{self.title} ({self.profile})" if self.profile else self.title

    def avg_rms(self, estimator):
        means = [
            self.cells[(scenario, estimator)].mean
            for scenario in self.scenarios
            if (scenario, estimator) in self.cells
            and not self.cells[(scenario, estimator)].failed
        ]
        return statistics.fmean(means) if means else None

    def avg_latency_ms(self):
        return {e: self.avg_latency.get(e, math.nan) * 1000.0 for e in self.estimators}

    def rows(self):
        rows = []
        for scenario in self.scenarios:
            row = [scenario]
            for estimator in self.estimators:
                cell = self.cells.get((scenario, estimator))
                row.append(cell.render() if cell else "-")
            rows.append(row)
        fmt = ClBenchHelper.format_cell
        rows.append(["Avg. RMS"] + [fmt(self.avg_rms(e)) for e in self.estimators])
        latency_ms = self.avg_latency_ms()
        rows.append(
            ["Avg. Latency"] + [fmt(latency_ms[e], 1) for e in self.estimators]
        )
        return rows

    @property
    def headers(self):
        return ["Scenario"] + list(self.estimators)

    def to_dict(self):
        return {
            "title": self.title,
            "profile": self.profile,
            "metric": self.metric,
            "repeats": self.repeats,
            "scenarios": list(self.scenarios),
            "estimators": list(self.estimators),
            "cells": {
                f"{s}|{e}": c.to_dict() for (s, e), c in sorted(self.cells.items())
            },
            "avg_rms": {e: self.avg_rms(e) for e in self.estimators},
            "avg_latency_ms": self.avg_latency_ms(),
        }


def build_table(
    title,
    results,
    scenarios,
    estimators,
    repeats,
    threshold=FAILURE_THRESHOLD,
    profile="",
) -> ResultTable:
    scores = {}
    latencies = {}
    metric = "tracking_rmse"
    for result in results:
        key = (result.config.scenario.name, result.config.estimator.name)
        scores.setdefault(key, []).append(result.score())
        estimator = result.config.estimator.name
        latencies.setdefault(estimator, []).append(result.latency_stats[0])
        if result.config.loop_mode == LoopMode.OPEN:
            metric = "ate_aligned"
    cells = {key: aggregate_cell(values, threshold) for key, values in scores.items()}
    avg_latency = {name: statistics.fmean(values) for name, values in latencies.items()}
    return ResultTable(
        title,
        metric,
        list(scenarios),
        list(estimators),
        cells,
        avg_latency,
        repeats,
        profile,
    )


# -- suite and sweep -------------------------------------------------------------


@dataclass(frozen=True)
class SuiteMatrix:
    scenarios: Tuple[str, ...]
    speeds: Tuple[float, ...]
    estimators: Tuple[str, ...]
    imus: Tuple[str, ...]

    @property
    def size(self):
        return (
            len(self.scenarios)
            * len(self.speeds)
            * len(self.estimators)
            * len(self.imus)
        )


@dataclass
class SuiteResult:
    tables: List[ResultTable]
    runs: List[dict] = field(default_factory=list)
    results: List[RunResult] = field(default_factory=list, repr=False)

    def table(self, imu, v_des):
        title = _table_title(imu, v_des)
        for table in self.tables:
            if table.title == title:
                return table
        raise KeyError(title)

    def to_dict(self):
        return {"tables": [t.to_dict() for t in self.tables], "runs": self.runs}


def _table_title(imu, v_des):
    return f"{imu} @ {v_des:g} m/s"


def _failed_result(cfg: RunConfig, message: str) -> RunResult:
    stub = TimedPath([0.0, 1.0], [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
    metrics = MetricReport(math.inf, math.inf, math.inf, 0, True)
    return RunResult(
        config=cfg,
        desired=stub,
        actual=stub,
        estimated=stub,
        metrics=metrics,
        estimator_ate=None,
        latency_stats=(cfg.estimator.latency, cfg.estimator.latency),
        saturation_count=0,
        dropped_fixes=0,
        aborted=True,
        error=message,
    )


def _execute_job(job):
    cfg, traj, ref = job
    try:
        return run_case(cfg, traj, ref)
    except ClBenchError as err:
        logger.warning(err.bench_msg())
        return _failed_result(cfg, err.bench_msg())


def _prepare_jobs(configs):
    """Attach cached desired and reference trajectories to every run config."""
    cache = {}
    jobs = []
    for cfg in configs:
        key = cfg.reference_key
        if key not in cache:
            try:
                traj = build_trajectory(cfg)
                cache[key] = (traj, build_reference(cfg, traj))
            except ClBenchError as err:
                logger.warning(err.bench_msg())
                cache[key] = (None, None)
        traj, ref = cache[key]
        jobs.append((cfg, traj, ref))
    return jobs


def _run_jobs(jobs, workers=1, progress=True):
    runnable = [job for job in jobs if job[2] is not None]
    if workers and workers > 1:
        executor = ProcessPoolExecutor(max_workers=workers)
        outputs = executor.map(_execute_job, runnable)
    else:
        executor = None
        outputs = map(_execute_job, runnable)

    results = []
    bar = progressbar.ProgressBar(max_value=len(jobs)) if progress else None
    try:
        for cfg, _, ref in jobs:
            if ref is None:
                results.append(_failed_result(cfg, "reference generation failed"))
            else:
                results.append(next(outputs))
            if bar:
                bar.update(len(results))
    finally:
        if executor is not None:
            executor.shutdown()
    if bar:
        bar.finish()
    return results


@timeit
def run_suite(
    setup,
    matrix: SuiteMatrix,
    repeats: int = 5,
    seed: int = 0,
    loop_mode=LoopMode.CLOSED,
    workers=1,
    progress=True,
    keep_results=False,
    **kwargs,
) -> SuiteResult:
    """
    Run every (imu, speed, scenario, estimator) cell `repeats` times and build
    one table per IMU and speed. Every cell of a repeat shares that repeat's
    seed.
    """
    if repeats < 1:
        raise ValueError("repeats must be at least 1")
    configs = []
    for imu in matrix.imus:
        for v_des in matrix.speeds:
            for scenario in matrix.scenarios:
                for estimator in matrix.estimators:
                    for repeat in range(repeats):
                        configs.append(
                            setup.run_config(
                                scenario,
                                v_des,
                                estimator,
                                imu,
                                seed=seed_for(seed, repeat),
                                loop_mode=loop_mode,
                                repeat=repeat,
                            )
                        )
    logger.debug(f"-> run_suite: {len(configs)} runs")
    results = _run_jobs(_prepare_jobs(configs), workers, progress)

    tables = []
    threshold = setup.failure_threshold
    for imu in matrix.imus:
        for v_des in matrix.speeds:
            subset = [
                r
                for r in results
                if r.config.imu.name == imu and r.config.v_des == v_des
            ]
            estimators = setup.order_by_latency(matrix.estimators)
            table = build_table(
                _table_title(imu, v_des),
                subset,
                matrix.scenarios,
                estimators,
                repeats,
                threshold,
                profile=motion_profile(v_des).value,
            )
            tables.append(table)
    return SuiteResult(
        tables=tables,
        runs=[r.to_summary() for r in results],
        results=results if keep_results else [],
    )


SWEEP_AXES = {
    "latency": "estimator",
    "drift_rate_trans": "estimator",
    "drift_rate_rot": "estimator",
    "fix_noise_trans": "estimator",
    "fix_noise_rot": "estimator",
    "c_p": "flat_gains",
    "c_d": "flat_gains",
    "c_lambda": "flat_gains",
    "epsilon": "flat_gains",
    "lambda0": "flat_gains",
    "k_x": "tracking_gains",
    "k_y": "tracking_gains",
    "k_theta": "tracking_gains",
}


def with_axis(base: RunConfig, axis: str, value: float) -> RunConfig:
    if axis not in SWEEP_AXES:
        choices = ", ".join(SWEEP_AXES)
        raise ConfigError(f"Unknown sweep axis '{axis}'. Choose from {choices}.")
    group = SWEEP_AXES[axis]
    return replace(base, **{group: replace(getattr(base, group), **{axis: value})})


@dataclass
class SweepResult:
    axis: str
    values: List[float]
    means: List[float]
    stderrs: List[float]
    counts: List[int]
    scores: List[List[float]]

    def rows(self):
        fmt = ClBenchHelper.format_cell
        return [
            [value, fmt(mean, 4), fmt(err, 4), n]
            for value, mean, err, n in zip(
                self.values, self.means, self.stderrs, self.counts
            )
        ]

    def to_dict(self):
        return {
            "axis": self.axis,
            "values": self.values,
            "mean_rmse": self.means,
            "stderr": self.stderrs,
            "n": self.counts,
            "rmse": self.scores,
        }


@timeit
def sweep(
    base: RunConfig,
    axis: str,
    values,
    repeats: int = 20,
    seeds=None,
    workers=1,
    progress=True,
    **kwargs,
) -> SweepResult:
    """
    Mean tracking RMSE (with standard error over seeds) for each value of one
    parameter axis. Every value is run with the same seeds.
    """
    values = [float(v) for v in values]
    if not values:
        raise ValueError("sweep needs at least one value")
    if any(b < a for a, b in zip(values[:-1], values[1:])):
        raise ValueError("sweep values must be sorted ascending")
    if seeds is None:
        seeds = [seed_for(base.seed, r) for r in range(repeats)]
    elif len(seeds) != repeats:
        raise ValueError("need exactly one seed per repeat")

    configs = [
        replace(with_axis(base, axis, value), seed=s, repeat=r)
        for value in values
        for r, s in enumerate(seeds)
    ]
    results = _run_jobs(_prepare_jobs(configs), workers, progress)

    means, stderrs, counts, scores = [], [], [], []
    for i in range(len(values)):
        chunk = results[i * len(seeds) : (i + 1) * len(seeds)]
        ok = [r.metrics.rmse_trans for r in chunk if not r.failed]
        mean, err = ClBenchHelper.mean_and_stderr(ok)
        means.append(mean)
        stderrs.append(err)
        counts.append(len(ok))
        scores.append([r.metrics.rmse_trans for r in chunk])
    return SweepResult(axis, values, means, stderrs, counts, scores)


# -- configuration -----------------------------------------------------------


class BenchSetup:
    """Resolves scenario, IMU and estimator names from a loaded config dict."""

    def __init__(self, config):
        self.config = config
        self._scenarios = {}
        self._imus = {}

    @property
    def scenario_dir(self) -> Path:
        return ClBenchHelper.resolve_path(self.config["scenario_dir"])

    @property
    def imu_dir(self) -> Path:
        return ClBenchHelper.resolve_path(self.config["imu_preset_dir"])

    @property
    def failure_threshold(self):
        return float(self.config.get("failure_threshold", FAILURE_THRESHOLD))

    def scenario_names(self):
        return sorted(p.stem for p in self.scenario_dir.glob("*.json"))

    def imu_names(self):
        return sorted(p.stem for p in self.imu_dir.glob("*.json"))

    def estimator_names(self):
        return self.order_by_latency(self.config["estimator_presets"].keys())

    def order_by_latency(self, names):
        presets = self.config["estimator_presets"]
        return sorted(names, key=lambda n: (presets.get(n, {}).get("latency", 0.0), n))

    def scenario(self, name) -> WaypointList:
        if name not in self._scenarios:
            path = self.scenario_dir / f"{name}.json"
            if not path.exists():
                raise ConfigError(
                    f"Unknown scenario '{name}'.",
                    {"scenario_dir": str(self.scenario_dir)},
                )
            self._scenarios[name] = load_scenario(path)
        return self._scenarios[name]

    def imu(self, name) -> ImuModel:
        if name not in self._imus:
            path = self.imu_dir / f"{name}.json"
            if not path.exists():
                raise ConfigError(
                    f"Unknown IMU preset '{name}'.",
                    {"imu_preset_dir": str(self.imu_dir)},
                )
            self._imus[name] = load_imu_preset(path)
        return self._imus[name]

    def estimator(self, name, imu: ImuModel) -> EstimatorConfig:
        presets = self.config["estimator_presets"]
        if name not in presets:
            raise ConfigError(f"Unknown estimator preset '{name}'.")
        return EstimatorConfig.from_dict(name, presets[name], imu)

    def default_matrix(self) -> SuiteMatrix:
        suite = self.config["suite"]
        return SuiteMatrix(
            scenarios=tuple(suite["scenarios"]),
            speeds=tuple(float(v) for v in suite["speeds"]),
            estimators=tuple(suite["estimators"]),
            imus=tuple(suite["imus"]),
        )

    def run_config(
        self, scenario, v_des, estimator, imu, seed=None, loop_mode=None, repeat=0
    ) -> RunConfig:
        c = self.config
        wp = self.scenario(scenario)
        rates = Rates(
            control=float(c["rates"]["control"]),
            imu=float(c["rates"]["imu"]),
            camera=float(c["camera"]["rate"]),
        )
        imu_model = replace(self.imu(imu), rate=rates.imu)
        return RunConfig(
            scenario=wp,
            v_des=float(v_des if v_des is not None else wp.default_v_des),
            estimator=self.estimator(estimator, imu_model),
            flat_gains=FlatGains(**c["flat_gains"]),
            tracking_gains=TrackingGains(**c["tracking_gains"]),
            vehicle_limits=VehicleLimits(**c["vehicle_limits"]),
            trajectory_limits=TrajectoryLimits(**c["trajectory_limits"]),
            seed=int(c["seed"] if seed is None else seed),
            warmup=float(c["warmup"]),
            settle_time=float(c["settle_time"]),
            rates=rates,
            camera_first_frame=float(c["camera"]["first_frame"]),
            loop_mode=LoopMode(loop_mode or c["loop_mode"]),
            estimator_class=c["estimator_class"],
            reference_rate=c["reference"].get("rate"),
            reference_substeps=int(c["reference"]["substeps"]),
            failure_threshold=self.failure_threshold,
            abort_error=float(c["abort_error"]),
            repeat=repeat,
        )
