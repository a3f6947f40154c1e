#!/usr/bin/env python3
"""
Planar rigid-body pose algebra (SE(2)) shared by every clbench module.
"""

__author__ = "The clbench developers"
__version__ = "1.0.0"
__license__ = "MIT"

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

TWO_PI = 2.0 * math.pi


def wrap_angle(theta: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    wrapped = math.remainder(theta, TWO_PI)
    if wrapped <= -math.pi:
        return math.pi
    return wrapped


@dataclass(frozen=True, slots=True)
class Pose2:
    x: float = 0.0
    y: float = 0.0
    theta: float = 0.0

    def __post_init__(self):
        if not -math.pi < self.theta <= math.pi:
            object.__setattr__(self, "theta", wrap_angle(self.theta))

    @property
    def position(self):
        return (self.x, self.y)

    def as_array(self):
        return np.array([self.x, self.y, self.theta])

    def to_dict(self):
        return {"x": self.x, "y": self.y, "theta": self.theta}


@dataclass(frozen=True, slots=True)
class BodyVelocity:
    nu: float = 0.0
    omega: float = 0.0

    def to_dict(self):
        return {"nu": self.nu, "omega": self.omega}


class PoseError(NamedTuple):
    x: float
    y: float
    theta: float


IDENTITY = Pose2()


def compose(a: Pose2, b: Pose2) -> Pose2:
    c = math.cos(a.theta)
    s = math.sin(a.theta)
    return Pose2(
        a.x + c * b.x - s * b.y,
        a.y + s * b.x + c * b.y,
        wrap_angle(a.theta + b.theta),
    )


def inverse(p: Pose2) -> Pose2:
    c = math.cos(p.theta)
    s = math.sin(p.theta)
    return Pose2(-c * p.x - s * p.y, s * p.x - c * p.y, wrap_angle(-p.theta))


def relative_error(g: Pose2, g_star: Pose2) -> PoseError:
    """Body-frame coordinates of g^-1 g*."""
    if g == g_star:
        return PoseError(0.0, 0.0, 0.0)
    e = compose(inverse(g), g_star)
    return PoseError(e.x, e.y, e.theta)


def exp_twist(nu: float, omega: float, dt: float, lateral: float = 0.0) -> Pose2:
    """
    Displacement of a body moving with constant forward velocity nu, yaw
    rate omega and sideways velocity `lateral` for dt seconds, expressed in
    the starting body frame. A unicycle has lateral = 0.
    """
    phi = omega * dt
    dist = nu * dt
    if abs(phi) < 1e-6:
        phi2 = phi * phi
        sin_ratio = 1.0 - phi2 / 6.0 + phi2 * phi2 / 120.0
        cos_ratio = phi / 2.0 - phi * phi2 / 24.0
    else:
        sin_ratio = math.sin(phi) / phi
        cos_ratio = (1.0 - math.cos(phi)) / phi
    if lateral == 0.0:
        return Pose2(dist * sin_ratio, dist * cos_ratio, wrap_angle(phi))
    side = lateral * dt
    return Pose2(
        dist * sin_ratio - side * cos_ratio,
        dist * cos_ratio + side * sin_ratio,
        wrap_angle(phi),
    )


def interpolate(a: Pose2, b: Pose2, alpha: float) -> Pose2:
    """Linear in position, shortest arc in heading."""
    dtheta = wrap_angle(b.theta - a.theta)
    return Pose2(
        a.x + alpha * (b.x - a.x),
        a.y + alpha * (b.y - a.y),
        wrap_angle(a.theta + alpha * dtheta),
    )


def unwrap(thetas):
    return np.unwrap(np.asarray(thetas, dtype=float))
