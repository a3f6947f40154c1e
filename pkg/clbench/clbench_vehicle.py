#!/usr/bin/env python3
"""
Differential-drive (unicycle) ground truth under commanded body velocities.
"""

__author__ = "The clbench developers"
__version__ = "1.0.0"
__license__ = "MIT"

import bisect
import logging
from dataclasses import dataclass
from typing import Tuple

from clbench.clbench_se2 import BodyVelocity, Pose2, compose, exp_twist

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class VehicleLimits:
    v_max: float = 1.65
    omega_max: float = 2.0
    a_max: float = 1.0
    alpha_max: float = 2.0

    def __post_init__(self):
        for name in ("v_max", "omega_max", "a_max", "alpha_max"):
            if not getattr(self, name) > 0:
                raise ValueError(f"vehicle limit {name} must be positive")

    def to_dict(self):
        return {
            "v_max": self.v_max,
            "omega_max": self.omega_max,
            "a_max": self.a_max,
            "alpha_max": self.alpha_max,
        }


@dataclass(frozen=True, slots=True)
class VehicleState:
    pose: Pose2 = Pose2()
    vel: BodyVelocity = BodyVelocity()
    t: float = 0.0
    # forward acceleration applied over the step that ended at t
    accel: float = 0.0


def _clip(value, low, high):
    return low if value < low else high if value > high else value


def clamp_velocity(
    cmd: BodyVelocity, limits: VehicleLimits
) -> Tuple[BodyVelocity, bool]:
    nu = _clip(cmd.nu, -limits.v_max, limits.v_max)
    omega = _clip(cmd.omega, -limits.omega_max, limits.omega_max)
    saturated = nu != cmd.nu or omega != cmd.omega
    if not saturated:
        return cmd, False
    return BodyVelocity(nu, omega), True


def step(
    s: VehicleState,
    cmd: BodyVelocity,
    limits: VehicleLimits,
    dt: float,
    t_next=None,
) -> VehicleState:
    """
    Rate-limit the command against the current velocity, clamp it, then move
    along the exact constant-twist arc for dt. `t_next` pins the new
    timestamp to a clock grid instead of accumulating s.t + dt.

    The forward velocity is reached through a constant acceleration held
    for dt, and that acceleration is recorded on the new state so an ideal
    accelerometer reproduces the velocity bit for bit. Rounding can leave
    |nu| an ulp above v_max.
    """
    if not 0.0 < dt <= 0.1:
        raise ValueError(f"vehicle step dt={dt} outside (0, 0.1]")
    target = _clip(cmd.nu, -limits.v_max, limits.v_max)
    accel = _clip((target - s.vel.nu) / dt, -limits.a_max, limits.a_max)
    nu = s.vel.nu + accel * dt
    dw = limits.alpha_max * dt
    omega = _clip(cmd.omega, s.vel.omega - dw, s.vel.omega + dw)
    omega = _clip(omega, -limits.omega_max, limits.omega_max)
    pose = compose(s.pose, exp_twist(nu, omega, dt))
    t = s.t + dt if t_next is None else t_next
    return VehicleState(pose, BodyVelocity(nu, omega), t, accel)


def actual_accel(prev: VehicleState, next: VehicleState) -> Tuple[float, float]:
    dt = next.t - prev.t
    if dt <= 0:
        raise ValueError("states must be strictly increasing in time")
    return (next.vel.nu - prev.vel.nu) / dt, (next.vel.omega - prev.vel.omega) / dt


def within_limits(
    prev: VehicleState, next: VehicleState, limits: VehicleLimits, tol=1e-9
) -> bool:
    a, alpha = actual_accel(prev, next)
    return (
        abs(next.vel.nu) <= limits.v_max + tol
        and abs(next.vel.omega) <= limits.omega_max + tol
        and abs(a) <= limits.a_max + tol
        and abs(alpha) <= limits.alpha_max + tol
    )


class TruthHistory:
    """
    Append-only record of the simulated ground truth.

    Between two recorded states the vehicle moves with the later state's
    velocity, so poses at any time inside the record are exact.
    """

    def __init__(self, initial: VehicleState):
        self.times = [initial.t]
        self.states = [initial]
        self.odometer = [0.0]

    def append(self, state: VehicleState):
        if state.t <= self.times[-1]:
            raise ValueError("truth states must be strictly increasing in time")
        prev_t = self.times[-1]
        self.odometer.append(self.odometer[-1] + abs(state.vel.nu) * (state.t - prev_t))
        self.times.append(state.t)
        self.states.append(state)

    @property
    def latest(self) -> VehicleState:
        return self.states[-1]

    def _locate(self, t):
        if t < self.times[0] - 1e-12 or t > self.times[-1] + 1e-12:
            raise ValueError(
                f"t={t} outside recorded truth [{self.times[0]}, {self.times[-1]}]"
            )
        k = bisect.bisect_right(self.times, t) - 1
        return min(max(k, 0), len(self.times) - 1)

    def pose_at(self, t) -> Pose2:
        k = self._locate(t)
        if k == len(self.times) - 1 or t <= self.times[k]:
            return self.states[k].pose
        vel = self.states[k + 1].vel
        twist = exp_twist(vel.nu, vel.omega, t - self.times[k])
        return compose(self.states[k].pose, twist)

    def velocity_at(self, t) -> BodyVelocity:
        k = self._locate(t)
        if k == len(self.times) - 1 or t <= self.times[k]:
            return self.states[k].vel
        return self.states[k + 1].vel

    def odometer_at(self, t) -> float:
        k = self._locate(t)
        if k == len(self.times) - 1 or t <= self.times[k]:
            return self.odometer[k]
        return self.odometer[k] + abs(self.states[k + 1].vel.nu) * (t - self.times[k])
