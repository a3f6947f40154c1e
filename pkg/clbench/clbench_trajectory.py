#!/usr/bin/env python3
"""
Desired trajectory d*(t) through scenario waypoints.

The path is a natural cubic spline over a chord-length parameter. It is
retimed along exact arc length with a speed profile that accelerates from
rest, cruises at v_des and decelerates to rest, slowed down on curves so
that the total acceleration (tangential and centripetal) stays within a_max.
"""

__author__ = "The clbench developers"
__version__ = "1.0.0"
__license__ = "MIT"

import enum
import json
import logging
import math
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.interpolate import CubicSpline

from clbench.clbench_helper import ClBenchError

logger = logging.getLogger(__name__)

MIN_SEPARATION = 1e-6
ARC_STEP = 0.05
CURVATURE_SHARE = 0.6
CURVATURE_MARGIN = 1.05
GAUSS_NODES, GAUSS_WEIGHTS = leggauss(16)
EVAL_CHUNK = 20000


class DegenerateWaypoints(ClBenchError):
    pass


class InfeasibleSpeed(ClBenchError):
    pass


class MotionProfile(str, enum.Enum):
    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"


@dataclass(frozen=True)
class TrajectoryLimits:
    v_max: float = 1.65
    a_max: float = 0.5

    def to_dict(self):
        return {"v_max": self.v_max, "a_max": self.a_max}


@dataclass(frozen=True)
class WaypointList:
    name: str
    points: Tuple[Tuple[float, float], ...]
    default_v_des: float = 1.0
    corner_cut: float = 0.0
    spacing: float = 0.0
    source_points: Tuple[Tuple[float, float], ...] = field(default=(), compare=False)

    def __post_init__(self):
        points = tuple((float(x), float(y)) for x, y in self.points)
        object.__setattr__(self, "points", points)
        if len(points) < 2:
            raise DegenerateWaypoints(
                "A waypoint list needs at least two points.", {"scenario": self.name}
            )
        for k in range(1, len(points)):
            if math.dist(points[k - 1], points[k]) <= MIN_SEPARATION:
                raise DegenerateWaypoints(
                    f"Waypoints {k - 1} and {k} coincide.", {"scenario": self.name}
                )

    def to_dict(self):
        return {
            "name": self.name,
            "points": [list(p) for p in self.points],
            "default_v_des": self.default_v_des,
            "corner_cut": self.corner_cut,
            "spacing": self.spacing,
        }


def motion_profile(v_des: float) -> MotionProfile:
    if v_des <= 0:
        raise ValueError("v_des must be positive")
    if v_des < 0.75:
        return MotionProfile.LOW
    if v_des < 1.25:
        return MotionProfile.MEDIUM
    return MotionProfile.HIGH


def expand_corners(points, corner_cut=0.0, spacing=0.0):
    """
    Round the interior corners of a polyline and densify its straight runs.

    Each interior corner is replaced by the two points `corner_cut` before
    and after it; straight runs longer than `spacing` get evenly spaced
    intermediate points. Both keep a natural spline close to the polyline.
    """
    pts = [np.asarray(p, dtype=float) for p in points]
    if corner_cut <= 0 and spacing <= 0:
        return [tuple(p) for p in pts]

    # (point, chord_follows) where chord_follows marks a rounded corner chord
    expanded = [(pts[0], False)]
    for k in range(1, len(pts) - 1):
        d_in = pts[k] - pts[k - 1]
        d_out = pts[k + 1] - pts[k]
        len_in = np.linalg.norm(d_in)
        len_out = np.linalg.norm(d_out)
        u_in = d_in / len_in
        u_out = d_out / len_out
        cross = u_in[0] * u_out[1] - u_in[1] * u_out[0]
        dot = float(u_in @ u_out)
        if corner_cut <= 0 or abs(cross) < 1e-9 or dot < -0.999:
            expanded.append((pts[k], False))
            continue
        r = min(corner_cut, 0.45 * len_in, 0.45 * len_out)
        expanded.append((pts[k] - r * u_in, True))
        expanded.append((pts[k] + r * u_out, False))
    expanded.append((pts[-1], False))

    result = [tuple(expanded[0][0])]
    for (a, chord), (b, _) in zip(expanded[:-1], expanded[1:]):
        if spacing > 0 and not chord:
            n = int(math.ceil(np.linalg.norm(b - a) / spacing))
            for j in range(1, n):
                result.append(tuple(a + (b - a) * (j / n)))
        result.append(tuple(b))
    return result


def load_scenario(path) -> WaypointList:
    try:
        with open(path, "r") as scenario_file:
            data = json.load(scenario_file)
    except FileNotFoundError:
        raise DegenerateWaypoints(f"Scenario file {path} not found.")
    corner_cut = float(data.get("corner_cut", 0.0))
    spacing = float(data.get("spacing", 0.0))
    source = tuple(tuple(p) for p in data["waypoints"])
    points = expand_corners(source, corner_cut, spacing)
    logger.debug(f"-> load_scenario: {data['name']} with {len(points)} points")
    return WaypointList(
        name=data["name"],
        points=tuple(points),
        default_v_des=float(data.get("default_v_des", 1.0)),
        corner_cut=corner_cut,
        spacing=spacing,
        source_points=source,
    )


class DesiredTrajectory:
    """
    Time-parameterised spline d*(t). Use fit_spline() to build one; treat
    instances as immutable.
    """

    def __init__(self, wp: WaypointList, v_des: float, limits: TrajectoryLimits):
        self.name = wp.name
        self.v_des = v_des
        self.limits = limits
        self.points = np.asarray(wp.points, dtype=float)

        chords = np.linalg.norm(np.diff(self.points, axis=0), axis=1)
        self.knots = np.concatenate(([0.0], np.cumsum(chords)))
        self.spline = CubicSpline(self.knots, self.points, bc_type="natural")
        self._d1 = self.spline.derivative(1)
        self._d2 = self.spline.derivative(2)

        seg_arc = self._arc_from_knot(
            np.arange(len(self.knots) - 1), self.knots[1:]
        )
        self.knot_arc = np.concatenate(([0.0], np.cumsum(seg_arc)))
        self.length = float(self.knot_arc[-1])
        self._build_lookup()
        self._build_time_law()

    # -- geometry ---------------------------------------------------------

    def _segment_of(self, s):
        idx = np.searchsorted(self.knots, s, side="right") - 1
        return np.clip(idx, 0, len(self.knots) - 2)

    def _arc_from_knot(self, idx, s):
        a = self.knots[idx]
        half = 0.5 * (s - a)
        nodes = a[:, None] + half[:, None] * (GAUSS_NODES[None, :] + 1.0)
        speed = np.linalg.norm(self._d1(nodes), axis=-1)
        return half * (speed @ GAUSS_WEIGHTS)

    def arc_length(self, s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        idx = self._segment_of(s)
        return self.knot_arc[idx] + self._arc_from_knot(idx, s)

    def _build_lookup(self):
        per_segment = 32
        table_s = [
            np.linspace(a, b, per_segment, endpoint=False)
            for a, b in zip(self.knots[:-1], self.knots[1:])
        ]
        self._table_s = np.concatenate(table_s + [self.knots[-1:]])
        self._table_arc = self.arc_length(self._table_s)

    def param_of_arc(self, sigma):
        """Invert arc length with Newton steps seeded from a lookup table."""
        sigma = np.clip(np.atleast_1d(np.asarray(sigma, dtype=float)), 0.0, self.length)
        s = np.interp(sigma, self._table_arc, self._table_s)
        s_end = self.knots[-1]
        for _ in range(12):
            speed = np.linalg.norm(self._d1(s), axis=-1)
            step = (self.arc_length(s) - sigma) / speed
            s = np.clip(s - step, 0.0, s_end)
            if np.max(np.abs(step)) < 1e-13:
                break
        return s

    def curvature(self, s):
        d1 = self._d1(s)
        d2 = self._d2(s)
        cross = d1[..., 0] * d2[..., 1] - d1[..., 1] * d2[..., 0]
        return np.abs(cross) / np.linalg.norm(d1, axis=-1) ** 3

    # -- time law -----------------------------------------------------------

    def _build_time_law(self):
        a_max = self.limits.a_max
        n = max(2, int(math.ceil(self.length / ARC_STEP - 1e-9)))
        self.sigma_nodes = self.length * np.arange(n + 1) / n
        self.d_sigma = self.length / n

        n_samples = 5
        sigma_samples = (
            self.sigma_nodes[:-1, None]
            + self.d_sigma * np.linspace(0.0, 1.0, n_samples)[None, :]
        )
        kappa = self.curvature(self.param_of_arc(sigma_samples.ravel()))
        kappa_bar = CURVATURE_MARGIN * kappa.reshape(n, n_samples).max(axis=1)

        kappa_node = np.zeros(n + 1)
        kappa_node[:-1] = kappa_bar
        kappa_node[1:] = np.maximum(kappa_node[1:], kappa_bar)
        with np.errstate(divide="ignore"):
            v_curve = np.sqrt(CURVATURE_SHARE * a_max / kappa_node)
        v_lim = np.minimum(self.v_des, v_curve)
        v_lim[0] = v_lim[-1] = 0.0

        w = np.maximum(v_lim[:-1], v_lim[1:])
        a_avail = np.sqrt(np.maximum(a_max**2 - (w**2 * kappa_bar) ** 2, 0.0))

        v = v_lim.copy()
        for i in range(n):
            reachable = math.sqrt(v[i] ** 2 + 2.0 * a_avail[i] * self.d_sigma)
            v[i + 1] = min(v[i + 1], reachable)
        for i in range(n - 1, -1, -1):
            v[i] = min(v[i], math.sqrt(v[i + 1] ** 2 + 2.0 * a_avail[i] * self.d_sigma))

        self.v_nodes = v
        self.a_intervals = (v[1:] ** 2 - v[:-1] ** 2) / (2.0 * self.d_sigma)
        tau = 2.0 * self.d_sigma / (v[:-1] + v[1:])
        self.t_nodes = np.concatenate(([0.0], np.cumsum(tau)))
        self.duration = float(self.t_nodes[-1])
        logger.debug(
            f"-> time law: {self.name} length {self.length:.2f} m, "
            f"duration {self.duration:.2f} s"
        )

    def arc_at_time(self, t):
        """Arc length, speed and tangential acceleration along the path at t."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        tc = np.clip(t, 0.0, self.duration)
        last = len(self.a_intervals) - 1
        i = np.clip(np.searchsorted(self.t_nodes, tc, side="right") - 1, 0, last)
        tau = tc - self.t_nodes[i]
        a = self.a_intervals[i]
        v0 = self.v_nodes[i]
        sigma = np.minimum(
            self.sigma_nodes[i] + v0 * tau + 0.5 * a * tau**2, self.length
        )
        sigma_dot = np.maximum(v0 + a * tau, 0.0)
        outside = (t <= 0.0) | (t >= self.duration)
        sigma_dot = np.where(outside, 0.0, sigma_dot)
        sigma_ddot = np.where(outside, 0.0, a)
        return sigma, sigma_dot, sigma_ddot

    def time_at_arc(self, sigma):
        sigma = np.clip(np.atleast_1d(np.asarray(sigma, dtype=float)), 0.0, self.length)
        last = len(self.a_intervals) - 1
        i = np.clip(np.searchsorted(self.sigma_nodes, sigma, side="right") - 1, 0, last)
        ds = sigma - self.sigma_nodes[i]
        v0 = self.v_nodes[i]
        a = self.a_intervals[i]
        denom = v0 + np.sqrt(np.maximum(v0**2 + 2.0 * a * ds, 0.0))
        safe = np.where(denom > 0.0, denom, 1.0)
        return self.t_nodes[i] + np.where(denom > 0.0, 2.0 * ds / safe, 0.0)

    @property
    def waypoint_times(self):
        return self.time_at_arc(self.knot_arc)

    # -- evaluation ---------------------------------------------------------

    def eval(self, t):
        """
        Position, velocity and acceleration of d* at t (scalar or array).

        Outside [0, duration] the first/last waypoint is returned with zero
        velocity and acceleration.
        """
        scalar = np.ndim(t) == 0
        if not scalar and np.size(t) > EVAL_CHUNK:
            t = np.asarray(t, dtype=float)
            parts = [
                self.eval(t[k : k + EVAL_CHUNK]) for k in range(0, len(t), EVAL_CHUNK)
            ]
            return tuple(np.concatenate(arrays) for arrays in zip(*parts))
        sigma, sigma_dot, sigma_ddot = self.arc_at_time(t)
        s = self.param_of_arc(sigma)
        p = self.spline(s)
        d1 = self._d1(s)
        d2 = self._d2(s)
        speed = np.linalg.norm(d1, axis=-1)
        s_dot = sigma_dot / speed
        along = np.einsum("ij,ij->i", d1, d2) / speed
        s_ddot = (sigma_ddot - along * s_dot**2) / speed
        vel = d1 * s_dot[:, None]
        acc = d2 * (s_dot**2)[:, None] + d1 * s_ddot[:, None]
        if scalar:
            return p[0], vel[0], acc[0]
        return p, vel, acc

    def heading(self, t):
        """Direction of the path tangent at d*(t)."""
        scalar = np.ndim(t) == 0
        sigma, _, _ = self.arc_at_time(t)
        d1 = self._d1(self.param_of_arc(sigma))
        theta = np.arctan2(d1[:, 1], d1[:, 0])
        return float(theta[0]) if scalar else theta


def fit_spline(
    wp: WaypointList, v_des: float, limits: TrajectoryLimits
) -> DesiredTrajectory:
    if v_des <= 0 or v_des > limits.v_max:
        raise InfeasibleSpeed(
            f"Desired speed {v_des} m/s outside (0, {limits.v_max}].",
            {"scenario": wp.name},
        )
    return DesiredTrajectory(wp, v_des, limits)
