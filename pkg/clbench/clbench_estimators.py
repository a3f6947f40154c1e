#!/usr/bin/env python3
"""
Parametric surrogates for VI-SLAM pose tracking.

A visual fix is the true pose at capture time perturbed by a distance-keyed
drift random walk and white noise, made available `latency` seconds later.
The loose-fusion estimator dead-reckons on the IMU stream and, when a fix
arrives, rewinds to its capture time, resets the pose and replays the
buffered IMU readings.
"""

__author__ = "The clbench developers"
__version__ = "1.0.0"
__license__ = "MIT"

import abc
import enum
import heapq
import logging
import math
from dataclasses import dataclass, field, replace
from importlib import import_module
from typing import Optional, Tuple

from clbench.clbench_helper import ClBenchError, ConfigError
from clbench.clbench_se2 import (
    IDENTITY,
    BodyVelocity,
    Pose2,
    compose,
    exp_twist,
    interpolate,
)
from clbench.clbench_sensors import ImuBias, ImuModel, ImuReading

logger = logging.getLogger(__name__)

TIME_EPS = 1e-9


class StaleFix(ClBenchError):
    pass


class EstimatorMode(str, enum.Enum):
    CLOSED_LOOP_ESTIMATE = "closed_loop_estimate"
    GROUND_TRUTH = "ground_truth"


@dataclass(frozen=True)
class EstimatorConfig:
    name: str = "custom"
    latency: float = 0.0
    output_rate: float = 200.0
    drift_rate_trans: float = 0.0
    drift_rate_rot: float = 0.0
    fix_noise_trans: float = 0.0
    fix_noise_rot: float = 0.0
    fix_noise_vel: float = 0.0
    latency_jitter: float = 0.0
    imu: ImuModel = ImuModel()
    mode: EstimatorMode = EstimatorMode.CLOSED_LOOP_ESTIMATE
    options: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "mode", EstimatorMode(self.mode))
        if self.latency < 0:
            raise ValueError(f"estimator {self.name}: latency must be non-negative")
        if self.output_rate <= 0:
            raise ValueError(f"estimator {self.name}: output rate must be positive")
        knobs = (
            self.drift_rate_trans,
            self.drift_rate_rot,
            self.fix_noise_trans,
            self.fix_noise_rot,
            self.fix_noise_vel,
        )
        if min(knobs) < 0:
            raise ValueError(
                f"estimator {self.name}: drift and noise must be non-negative"
            )
        if not 0.0 <= self.latency_jitter < 1.0:
            raise ValueError(f"estimator {self.name}: latency jitter must be in [0, 1)")

    @classmethod
    def from_dict(cls, name, data, imu: ImuModel):
        fields = cls.__dataclass_fields__
        known = {k: v for k, v in data.items() if k in fields and k != "imu"}
        known.setdefault("name", name)
        return cls(imu=imu, **known)

    def to_dict(self):
        return {
            "name": self.name,
            "latency": self.latency,
            "output_rate": self.output_rate,
            "drift_rate_trans": self.drift_rate_trans,
            "drift_rate_rot": self.drift_rate_rot,
            "fix_noise_trans": self.fix_noise_trans,
            "fix_noise_rot": self.fix_noise_rot,
            "fix_noise_vel": self.fix_noise_vel,
            "latency_jitter": self.latency_jitter,
            "imu": self.imu.to_dict(),
            "mode": self.mode.value,
            "options": dict(self.options),
        }


@dataclass(frozen=True)
class DriftState:
    pose: Pose2 = IDENTITY
    odometer: float = 0.0


@dataclass(frozen=True)
class VisualFix:
    t_capture: float
    t_available: float
    pose_meas: Pose2
    vel_meas: BodyVelocity
    drift: DriftState = DriftState()

    def __post_init__(self):
        if self.t_available < self.t_capture:
            raise ValueError("a fix cannot be available before it is captured")

    @property
    def latency(self):
        return self.t_available - self.t_capture


@dataclass(frozen=True)
class EstimatorState:
    t: float = 0.0
    pose_est: Pose2 = IDENTITY
    vel_est: BodyVelocity = BodyVelocity()
    vel_lat: float = 0.0
    bias_est: ImuBias = ImuBias()
    imu_buffer: Tuple[ImuReading, ...] = ()
    drift_accum: DriftState = DriftState()
    buffer_span: float = math.inf


def initial_state(
    cfg: EstimatorConfig, pose=IDENTITY, t=0.0, frame_period=1.0 / 30.0
) -> EstimatorState:
    imu_period = 1.0 / cfg.imu.rate
    span = cfg.latency * (1.0 + cfg.latency_jitter) + frame_period + 2.0 * imu_period
    return EstimatorState(t=t, pose_est=pose, buffer_span=span)


def _dead_reckon(t, pose, vel, lateral, bias, imu: ImuReading):
    """
    Advance pose, velocity and lateral velocity from t to imu.t. Velocities
    change at the start of the reading's interval, so a replay that starts
    mid-interval only moves the pose.
    """
    nu = vel.nu
    omega = imu.gyro - bias.gz
    span = imu.t - t
    start = imu.t - imu.dt
    if t <= start + TIME_EPS:
        nu += (imu.accel[0] - bias.ax + omega * lateral) * imu.dt
        lateral += (imu.accel[1] - bias.ay - omega * nu) * imu.dt
        if t >= start - TIME_EPS:
            span = imu.dt
    if span > 0:
        pose = compose(pose, exp_twist(nu, omega, span, lateral))
    return pose, BodyVelocity(nu, omega), lateral


def propagate(
    st: EstimatorState, imu: ImuReading, dt: Optional[float] = None
) -> EstimatorState:
    if imu.t < st.t - TIME_EPS:
        raise ValueError(f"IMU reading at {imu.t} precedes estimator time {st.t}")
    if dt is not None and abs((imu.t - st.t) - dt) > TIME_EPS:
        raise ValueError("dt does not match the reading timestamp")
    pose, vel, lateral = _dead_reckon(
        st.t, st.pose_est, st.vel_est, st.vel_lat, st.bias_est, imu
    )
    cutoff = imu.t - st.buffer_span
    buffer = st.imu_buffer
    if buffer and buffer[0].t <= cutoff:
        buffer = tuple(r for r in buffer if r.t > cutoff)
    return replace(
        st,
        t=imu.t,
        pose_est=pose,
        vel_est=vel,
        vel_lat=lateral,
        imu_buffer=buffer + (imu,),
    )


def make_fix(
    truth_history,
    cfg: EstimatorConfig,
    drift_accum: DriftState,
    rng,
    t_capture: float,
    jitter_rng=None,
) -> VisualFix:
    """
    Visual pose for t_capture: truth composed with the accumulated drift and
    fix noise. Drift takes one random-walk step whose std grows with the
    square root of the distance travelled since the previous fix.
    """
    truth = truth_history.pose_at(t_capture)
    odometer = truth_history.odometer_at(t_capture)
    distance = max(odometer - drift_accum.odometer, 0.0)

    drift_pose = drift_accum.pose
    if distance > 0 and (cfg.drift_rate_trans > 0 or cfg.drift_rate_rot > 0):
        root = math.sqrt(distance)
        n = rng.standard_normal(3)
        drift_pose = compose(
            drift_pose,
            Pose2(
                cfg.drift_rate_trans * root * n[0],
                cfg.drift_rate_trans * root * n[1],
                cfg.drift_rate_rot * root * n[2],
            ),
        )

    pose_meas = compose(truth, drift_pose)
    if cfg.fix_noise_trans > 0 or cfg.fix_noise_rot > 0:
        n = rng.standard_normal(3)
        pose_meas = compose(
            pose_meas,
            Pose2(
                cfg.fix_noise_trans * n[0],
                cfg.fix_noise_trans * n[1],
                cfg.fix_noise_rot * n[2],
            ),
        )

    vel_meas = truth_history.velocity_at(t_capture)
    if cfg.fix_noise_vel > 0:
        nu = vel_meas.nu + cfg.fix_noise_vel * rng.standard_normal()
        vel_meas = BodyVelocity(nu, vel_meas.omega)

    latency = cfg.latency
    if cfg.latency_jitter > 0:
        source = jitter_rng if jitter_rng is not None else rng
        latency *= 1.0 + source.uniform(-cfg.latency_jitter, cfg.latency_jitter)

    return VisualFix(
        t_capture=t_capture,
        t_available=t_capture + latency,
        pose_meas=pose_meas,
        vel_meas=vel_meas,
        drift=DriftState(drift_pose, odometer),
    )


def correct(st: EstimatorState, fix: VisualFix, now: float) -> EstimatorState:
    """
    Rewind to the capture time, reset pose and velocity to the fix and
    replay the buffered IMU readings up to `now`.
    """
    if fix.t_available > now + TIME_EPS:
        raise ValueError(f"fix available at {fix.t_available} applied at {now}")
    buffer = st.imu_buffer
    coverage = buffer[0].t - buffer[0].dt if buffer else st.t
    if fix.t_capture < coverage - TIME_EPS:
        raise StaleFix(
            "Fix captured before the IMU buffer starts.",
            {"t_capture": round(fix.t_capture, 6), "buffer_start": round(coverage, 6)},
        )

    t = fix.t_capture
    pose = fix.pose_meas
    vel = fix.vel_meas
    lateral = 0.0
    kept = []
    for reading in buffer:
        if reading.t <= fix.t_capture + TIME_EPS or reading.t > now + TIME_EPS:
            continue
        pose, vel, lateral = _dead_reckon(t, pose, vel, lateral, st.bias_est, reading)
        t = reading.t
        kept.append(reading)
    return replace(
        st,
        t=max(t, fix.t_capture),
        pose_est=pose,
        vel_est=vel,
        vel_lat=lateral,
        imu_buffer=tuple(kept),
    )


def output(
    st: EstimatorState,
    cfg: EstimatorConfig,
    now: float,
    truth_pose: Optional[Pose2] = None,
) -> Pose2:
    if cfg.mode == EstimatorMode.GROUND_TRUTH:
        if truth_pose is None:
            raise ValueError("ground-truth mode needs the true pose")
        return truth_pose
    if now > st.t + TIME_EPS:
        vel = st.vel_est
        twist = exp_twist(vel.nu, vel.omega, now - st.t, st.vel_lat)
        return compose(st.pose_est, twist)
    return st.pose_est


@dataclass
class EstimatorTelemetry:
    corrections: int = 0
    dropped_fixes: int = 0
    latencies: list = field(default_factory=list)
    residuals: list = field(default_factory=list)


class AbstractPoseEstimator(abc.ABC):
    """
    Run-owned estimator. The simulation loop feeds IMU readings, asks for a
    visual fix at every camera capture and applies fixes once available.
    """

    def __init__(
        self,
        cfg: EstimatorConfig,
        rng,
        jitter_rng=None,
        frame_period=1.0 / 30.0,
        pose=IDENTITY,
        t0=0.0,
    ):
        self.cfg = cfg
        self.rng = rng
        self.jitter_rng = jitter_rng
        self.frame_period = frame_period
        self.telemetry = EstimatorTelemetry()

    @abc.abstractmethod
    def propagate(self, reading: ImuReading):
        raise NotImplementedError

    @abc.abstractmethod
    def capture(self, truth_history, t_capture: float) -> VisualFix:
        raise NotImplementedError

    @abc.abstractmethod
    def apply_fixes(self, now: float, truth_pose: Optional[Pose2] = None) -> int:
        raise NotImplementedError

    @property
    @abc.abstractmethod
    def estimate(self) -> Pose2:
        raise NotImplementedError

    @abc.abstractmethod
    def output(self, now: float, truth_pose: Optional[Pose2] = None) -> Pose2:
        raise NotImplementedError


class LooseFusionEstimator(AbstractPoseEstimator):
    def __init__(
        self,
        cfg: EstimatorConfig,
        rng,
        jitter_rng=None,
        frame_period=1.0 / 30.0,
        pose=IDENTITY,
        t0=0.0,
    ):
        super().__init__(cfg, rng, jitter_rng, frame_period, pose, t0)
        self.state = initial_state(cfg, pose, t0, frame_period)
        self._pending = []
        self._sequence = 0

    @property
    def estimate(self) -> Pose2:
        return self.state.pose_est

    def propagate(self, reading: ImuReading):
        self.state = propagate(self.state, reading)

    def capture(self, truth_history, t_capture: float) -> VisualFix:
        fix = make_fix(
            truth_history,
            self.cfg,
            self.state.drift_accum,
            self.rng,
            t_capture,
            self.jitter_rng,
        )
        self.state = replace(self.state, drift_accum=fix.drift)
        heapq.heappush(self._pending, (fix.t_available, self._sequence, fix))
        self._sequence += 1
        return fix

    def correct(self, fix: VisualFix, now: float) -> EstimatorState:
        return correct(self.state, fix, now)

    def apply_fixes(self, now: float, truth_pose: Optional[Pose2] = None) -> int:
        applied = 0
        while self._pending and self._pending[0][0] <= now + TIME_EPS:
            _, _, fix = heapq.heappop(self._pending)
            try:
                self.state = self.correct(fix, now)
            except StaleFix as err:
                self.telemetry.dropped_fixes += 1
                logger.warning(err.bench_msg())
                continue
            applied += 1
            self.telemetry.corrections += 1
            self.telemetry.latencies.append(fix.latency)
            if truth_pose is not None:
                est = self.state.pose_est
                err = math.hypot(est.x - truth_pose.x, est.y - truth_pose.y)
                self.telemetry.residuals.append(err)
        return applied

    def output(self, now: float, truth_pose: Optional[Pose2] = None) -> Pose2:
        return output(self.state, self.cfg, now, truth_pose)


def blend_states(
    before: EstimatorState, after: EstimatorState, weight: float
) -> EstimatorState:
    """Move a fraction `weight` of the way from `before` to `after`."""
    pose = interpolate(before.pose_est, after.pose_est, weight)
    vel = BodyVelocity(
        before.vel_est.nu + weight * (after.vel_est.nu - before.vel_est.nu),
        after.vel_est.omega,
    )
    return replace(after, pose_est=pose, vel_est=vel)


def resolve_estimator_class(dotted_path: str):
    module_name, class_name = dotted_path.rsplit(".", maxsplit=1)
    try:
        module = import_module(module_name)
        estimator_class = getattr(module, class_name)
    except ModuleNotFoundError:
        raise ConfigError(f"Estimator module '{module_name}' not found.")
    except AttributeError:
        raise ConfigError(
            f"Estimator class '{class_name}' not found in module '{module_name}'."
        )
    if not (
        isinstance(estimator_class, type)
        and issubclass(estimator_class, AbstractPoseEstimator)
    ):
        raise ConfigError(
            f"Estimator '{dotted_path}' must derive from AbstractPoseEstimator."
        )
    return estimator_class
