#!/usr/bin/env python3
"""
Evaluation metrics: closed-loop tracking RMSE, ATE with optional rigid
alignment, and navigation failure classification.
"""

__author__ = "The clbench developers"
__version__ = "1.0.0"
__license__ = "MIT"

import logging
import math
from dataclasses import dataclass

import numpy as np

from clbench.clbench_helper import ClBenchError
from clbench.clbench_se2 import Pose2

logger = logging.getLogger(__name__)

FAILURE_THRESHOLD = 10.0
ASSOCIATION_TOLERANCE = 0.01


class NoOverlap(ClBenchError):
    pass


class NoAssociation(ClBenchError):
    pass


class TimedPath:
    """Time-ordered poses stored as arrays: t (N,), poses (N, 3) as x, y, theta."""

    def __init__(self, t, poses):
        self.t = np.asarray(t, dtype=float).reshape(-1)
        self.poses = np.asarray(poses, dtype=float).reshape(-1, 3)
        if len(self.t) != len(self.poses):
            raise ValueError("timestamps and poses differ in length")
        if len(self.t) < 2:
            raise ValueError("a path needs at least two samples")
        if np.any(np.diff(self.t) <= 0):
            raise ValueError("path timestamps must be strictly increasing")

    @classmethod
    def from_samples(cls, samples):
        t = [s[0] for s in samples]
        poses = [(p.x, p.y, p.theta) for _, p in samples]
        return cls(t, poses)

    @property
    def samples(self):
        return [(float(t), Pose2(*p)) for t, p in zip(self.t, self.poses)]

    @property
    def xy(self):
        return self.poses[:, :2]

    def __len__(self):
        return len(self.t)

    def transformed(self, pose: Pose2):
        """Apply a rigid transform (world frame change) to every sample."""
        c, s = math.cos(pose.theta), math.sin(pose.theta)
        rot = np.array([[c, -s], [s, c]])
        xy = self.xy @ rot.T + np.array([pose.x, pose.y])
        theta = np.angle(np.exp(1j * (self.poses[:, 2] + pose.theta)))
        return TimedPath(self.t, np.column_stack([xy, theta]))

    def interpolate(self, t):
        """Linear in position, shortest arc in heading; t must lie in range."""
        t = np.asarray(t, dtype=float)
        x = np.interp(t, self.t, self.poses[:, 0])
        y = np.interp(t, self.t, self.poses[:, 1])
        idx = np.clip(np.searchsorted(self.t, t, side="right") - 1, 0, len(self.t) - 2)
        t0 = self.t[idx]
        t1 = self.t[idx + 1]
        alpha = np.clip((t - t0) / (t1 - t0), 0.0, 1.0)
        th0 = self.poses[idx, 2]
        dth = np.angle(np.exp(1j * (self.poses[idx + 1, 2] - th0)))
        theta = np.angle(np.exp(1j * (th0 + alpha * dth)))
        return np.column_stack([x, y, theta])


@dataclass(frozen=True)
class MetricReport:
    rmse_trans: float
    rmse_yaw: float
    max_err: float
    n_samples: int
    failed: bool
    label: str = "tracking_rmse"

    def to_dict(self):
        return {
            "label": self.label,
            "rmse_trans": self.rmse_trans,
            "rmse_yaw": self.rmse_yaw,
            "max_err": self.max_err,
            "n_samples": self.n_samples,
            "failed": self.failed,
        }


def classify_failure(rmse: float, threshold: float = FAILURE_THRESHOLD) -> bool:
    if rmse < 0:
        raise ValueError("rmse must be non-negative")
    return rmse > threshold


def _report(trans_err, yaw_err, label, threshold=FAILURE_THRESHOLD):
    rmse = float(np.sqrt(np.mean(trans_err**2)))
    return MetricReport(
        rmse_trans=rmse,
        rmse_yaw=float(np.sqrt(np.mean(yaw_err**2))),
        max_err=float(np.max(trans_err)),
        n_samples=int(len(trans_err)),
        failed=classify_failure(rmse, threshold),
        label=label,
    )


def tracking_rmse(
    desired: TimedPath, actual: TimedPath, threshold: float = FAILURE_THRESHOLD
) -> MetricReport:
    """World-frame error of `actual` against `desired` at actual's timestamps."""
    inside = (actual.t >= desired.t[0] - 1e-12) & (actual.t <= desired.t[-1] + 1e-12)
    if not np.any(inside):
        raise NoOverlap(
            "Desired and actual paths do not overlap in time.",
            {
                "desired": (float(desired.t[0]), float(desired.t[-1])),
                "actual": (float(actual.t[0]), float(actual.t[-1])),
            },
        )
    ref = desired.interpolate(actual.t[inside])
    act = actual.poses[inside]
    trans_err = np.linalg.norm(act[:, :2] - ref[:, :2], axis=1)
    yaw_err = np.angle(np.exp(1j * (act[:, 2] - ref[:, 2])))
    return _report(trans_err, yaw_err, "tracking_rmse", threshold)


def associate(
    first: TimedPath, second: TimedPath, tolerance: float = ASSOCIATION_TOLERANCE
):
    """Index pairs of nearest timestamps within `tolerance` seconds."""
    idx = np.clip(np.searchsorted(second.t, first.t), 1, len(second.t) - 1)
    left = second.t[idx - 1]
    right = second.t[idx]
    nearest = np.where(np.abs(first.t - left) <= np.abs(right - first.t), idx - 1, idx)
    ok = np.abs(second.t[nearest] - first.t) <= tolerance + 1e-12
    return np.nonzero(ok)[0], nearest[ok]


def align_rigid(model, data):
    """
    Closed-form least-squares rotation and translation (scale fixed to 1)
    mapping `model` points (N, 2) onto `data` points (N, 2).
    """
    mu_m = model.mean(axis=0)
    mu_d = data.mean(axis=0)
    m = model - mu_m
    d = data - mu_d
    w = d.T @ m
    u, _, vh = np.linalg.svd(w)
    s = np.eye(2)
    if np.linalg.det(u) * np.linalg.det(vh) < 0:
        s[1, 1] = -1.0
    rot = u @ s @ vh
    trans = mu_d - rot @ mu_m
    return rot, trans


def ate(
    estimated: TimedPath,
    truth: TimedPath,
    align: bool = False,
    tolerance: float = ASSOCIATION_TOLERANCE,
    threshold: float = FAILURE_THRESHOLD,
) -> MetricReport:
    i_est, i_true = associate(estimated, truth, tolerance)
    if len(i_est) == 0:
        raise NoAssociation(f"No timestamp pairs within {tolerance * 1000:.0f} ms.")
    est = estimated.poses[i_est]
    ref = truth.poses[i_true]
    est_xy = est[:, :2]
    yaw = est[:, 2]
    if align and len(i_est) >= 2:
        rot, trans = align_rigid(est_xy, ref[:, :2])
        est_xy = est_xy @ rot.T + trans
        yaw = yaw + math.atan2(rot[1, 0], rot[0, 0])
    trans_err = np.linalg.norm(est_xy - ref[:, :2], axis=1)
    yaw_err = np.angle(np.exp(1j * (yaw - ref[:, 2])))
    label = "ate_aligned" if align else "ate"
    return _report(trans_err, yaw_err, label, threshold)


def load_trajectory(path) -> TimedPath:
    """Read a plain-text `t x y theta` file (blank lines and # comments skipped)."""
    data = np.loadtxt(path, comments="#", ndmin=2)
    if data.shape[1] != 4:
        raise ValueError(f"{path}: expected 4 columns (t x y theta)")
    return TimedPath(data[:, 0], data[:, 1:])
