#!/usr/bin/env python3
"""
Flatness-based tracking controller.

The reference stage drives a virtual unicycle with the near-identity
flat control law, tracking a point held a distance lambda ahead of the
robot, and records the resulting poses g*(t) and body velocities V*(t).
The real-time stage turns the relative pose error into velocity commands.
"""

__author__ = "The clbench developers"
__version__ = "1.0.0"
__license__ = "MIT"

import logging
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from clbench.clbench_helper import ClBenchError
from clbench.clbench_se2 import BodyVelocity, Pose2, relative_error, wrap_angle
from clbench.clbench_vehicle import VehicleLimits, clamp_velocity

logger = logging.getLogger(__name__)

MIN_OFFSET = 1e-9
DIVERGENCE_FACTOR = 10.0
DIVERGENCE_TIME = 2.0


class SingularOffset(ClBenchError):
    pass


class IntegrationDiverged(ClBenchError):
    pass


@dataclass(frozen=True)
class FlatGains:
    c_p: float = 9.0
    c_d: float = 6.0
    c_lambda: float = 1.0
    epsilon: float = 0.02
    lambda0: float = 0.1

    def __post_init__(self):
        if min(self.c_p, self.c_d, self.c_lambda, self.epsilon) <= 0:
            raise ValueError("flat gains must be strictly positive")
        if not self.lambda0 > self.epsilon:
            raise ValueError("lambda0 must exceed epsilon")

    def to_dict(self):
        return {
            "c_p": self.c_p,
            "c_d": self.c_d,
            "c_lambda": self.c_lambda,
            "epsilon": self.epsilon,
            "lambda0": self.lambda0,
        }


@dataclass(frozen=True)
class TrackingGains:
    k_x: float = 1.5
    k_y: float = 2.0
    k_theta: float = 3.0

    def __post_init__(self):
        if min(self.k_x, self.k_y, self.k_theta) <= 0:
            raise ValueError("tracking gains must be strictly positive")

    def to_dict(self):
        return {"k_x": self.k_x, "k_y": self.k_y, "k_theta": self.k_theta}


@dataclass(frozen=True)
class OffsetState:
    lam: float
    lam_dot: float = 0.0


class ControlAccel(NamedTuple):
    u1: float
    u2: float


def _flat_terms(x, y, theta, nu, omega, lam, lam_dot, px, py, vx, vy, gains):
    c = math.cos(theta)
    s = math.sin(theta)
    # d* - d - lambda R e1
    ex = px - x - lam * c
    ey = py - y - lam * s
    # R_lambda^-1 = diag(1, 1/lambda) R^T
    p1 = c * ex + s * ey
    p2 = (-s * ex + c * ey) / lam
    f1 = c * vx + s * vy
    f2 = (-s * vx + c * vy) / lam
    # omega_hat = [[0, -lam*omega], [omega/lam, lam_dot/lam]]
    wv1 = -lam * omega * omega
    wv2 = omega * nu / lam + lam_dot * omega / lam
    # (omega_hat - c_lambda I) e1
    we1 = -gains.c_lambda
    we2 = omega / lam
    u1 = (
        gains.c_p * p1
        + gains.c_d * (f1 - nu)
        - gains.c_d * lam_dot
        - wv1
        - we1 * lam_dot
    )
    u2 = gains.c_p * p2 + gains.c_d * (f2 - omega) - wv2 - we2 * lam_dot
    return u1, u2


def flat_control(
    g: Pose2,
    V: BodyVelocity,
    off: OffsetState,
    d_star,
    d_star_dot,
    gains: FlatGains,
) -> ControlAccel:
    if off.lam < MIN_OFFSET:
        raise SingularOffset(f"offset lambda={off.lam} makes R_lambda singular")
    u1, u2 = _flat_terms(
        g.x,
        g.y,
        g.theta,
        V.nu,
        V.omega,
        off.lam,
        off.lam_dot,
        d_star[0],
        d_star[1],
        d_star_dot[0],
        d_star_dot[1],
        gains,
    )
    return ControlAccel(u1, u2)


def offset_at(gains: FlatGains, t: float) -> OffsetState:
    decay = math.exp(-gains.c_lambda * t)
    lam = gains.epsilon + (gains.lambda0 - gains.epsilon) * decay
    return OffsetState(lam, -gains.c_lambda * (lam - gains.epsilon))


def step_offset(off: OffsetState, gains: FlatGains, dt: float) -> OffsetState:
    if dt <= 0:
        raise ValueError("dt must be positive")
    lam = gains.epsilon + (off.lam - gains.epsilon) * math.exp(-gains.c_lambda * dt)
    return OffsetState(lam, -gains.c_lambda * (lam - gains.epsilon))


class ReferenceTrajectory:
    """Uniformly sampled g*(t), V*(t); immutable after generation."""

    def __init__(self, rate, poses, vels, name=""):
        self.rate = float(rate)
        self.poses = np.asarray(poses, dtype=float)
        self.vels = np.asarray(vels, dtype=float)
        self.name = name
        self.times = np.arange(len(self.poses)) / self.rate

    @property
    def duration(self):
        return (len(self.poses) - 1) / self.rate

    @property
    def samples(self):
        return [
            (float(t), Pose2(*p), BodyVelocity(*v))
            for t, p, v in zip(self.times, self.poses, self.vels)
        ]

    def index_of(self, t):
        k = int(round(t * self.rate))
        return min(max(k, 0), len(self.poses) - 1)

    def sample(self, t):
        k = self.index_of(t)
        x, y, theta = self.poses[k]
        nu, omega = self.vels[k]
        if t > self.duration:
            nu = omega = 0.0
        return Pose2(x, y, theta), BodyVelocity(nu, omega)


def generate_reference(
    traj,
    gains: FlatGains,
    g0: Pose2,
    rate: float,
    limits: Optional[VehicleLimits] = None,
    substeps: int = 4,
    settle_time: float = 0.0,
) -> ReferenceTrajectory:
    """
    Integrate the virtual unicycle under the flat control law from g0 at rest.

    Fixed-step RK4 with `substeps` steps per output sample; the offset
    lambda(t) follows its closed form. With `limits`, u and V are saturated
    so the reference stays feasible for the vehicle.
    """
    if rate <= 0 or substeps < 1:
        raise ValueError("rate and substeps must be positive")
    if not all(math.isfinite(v) for v in (g0.x, g0.y, g0.theta)):
        raise ValueError("initial pose must be finite")

    n_samples = int(math.ceil((traj.duration + settle_time) * rate - 1e-9)) + 1
    h = 1.0 / (rate * substeps)
    n_half = 2 * substeps * (n_samples - 1) + 1
    stage_times = np.arange(n_half) * (0.5 * h)
    p_star, v_star, _ = traj.eval(stage_times)
    px, py = p_star[:, 0].tolist(), p_star[:, 1].tolist()
    vx, vy = v_star[:, 0].tolist(), v_star[:, 1].tolist()
    lam_t = [offset_at(gains, t) for t in stage_times.tolist()]

    if limits is not None:
        a_lim, alpha_lim = limits.a_max, limits.alpha_max
        v_lim, w_lim = limits.v_max, limits.omega_max
    else:
        a_lim = alpha_lim = v_lim = w_lim = math.inf

    def deriv(j, state):
        x, y, th, nu, om = state
        off = lam_t[j]
        u1, u2 = _flat_terms(
            x, y, th, nu, om, off.lam, off.lam_dot, px[j], py[j], vx[j], vy[j], gains
        )
        u1 = min(max(u1, -a_lim), a_lim)
        u2 = min(max(u2, -alpha_lim), alpha_lim)
        return (nu * math.cos(th), nu * math.sin(th), om, u1, u2)

    def axpy(state, k, a):
        return tuple(si + a * ki for si, ki in zip(state, k))

    state = (g0.x, g0.y, g0.theta, 0.0, 0.0)
    poses = np.empty((n_samples, 3))
    vels = np.empty((n_samples, 2))
    poses[0] = (g0.x, g0.y, wrap_angle(g0.theta))
    vels[0] = (0.0, 0.0)

    err0 = max(math.hypot(px[0] - g0.x, py[0] - g0.y), gains.lambda0)
    diverged_since = None
    j = 0
    for k in range(1, n_samples):
        for _ in range(substeps):
            k1 = deriv(j, state)
            k2 = deriv(j + 1, axpy(state, k1, 0.5 * h))
            k3 = deriv(j + 1, axpy(state, k2, 0.5 * h))
            k4 = deriv(j + 2, axpy(state, k3, h))
            state = tuple(
                s + h / 6.0 * (a + 2.0 * b + 2.0 * c + d)
                for s, a, b, c, d in zip(state, k1, k2, k3, k4)
            )
            x, y, th, nu, om = state
            state = (
                x, y, th,
                min(max(nu, -v_lim), v_lim),
                min(max(om, -w_lim), w_lim),
            )
            j += 2
        x, y, th, nu, om = state
        if not all(math.isfinite(v) for v in state):
            raise IntegrationDiverged(
                "Reference state became non-finite.",
                {"t": k / rate, "scenario": getattr(traj, "name", "")},
            )
        poses[k] = (x, y, wrap_angle(th))
        vels[k] = (nu, om)

        err = math.hypot(px[j] - x, py[j] - y)
        t = k / rate
        if err > DIVERGENCE_FACTOR * err0:
            if diverged_since is None:
                diverged_since = t
            elif t - diverged_since > DIVERGENCE_TIME:
                raise IntegrationDiverged(
                    f"Reference error {err:.3f} m stayed above "
                    f"{DIVERGENCE_FACTOR * err0:.3f} m "
                    f"for more than {DIVERGENCE_TIME} s.",
                    {"t": t, "scenario": getattr(traj, "name", "")},
                )
        else:
            diverged_since = None

    logger.debug(f"-> generate_reference: {n_samples} samples at {rate} Hz")
    return ReferenceTrajectory(rate, poses, vels, name=getattr(traj, "name", ""))


def velocity_command(
    g_est: Pose2,
    g_star: Pose2,
    v_star: BodyVelocity,
    k: TrackingGains,
    limits: Optional[VehicleLimits] = None,
) -> BodyVelocity:
    ex, ey, eth = relative_error(g_est, g_star)
    cmd = BodyVelocity(
        k.k_x * ex + v_star.nu,
        k.k_theta * eth + k.k_y * ey + v_star.omega,
    )
    if limits is not None:
        cmd, _ = clamp_velocity(cmd, limits)
    return cmd
