"""
Python unittest
"""
import math
import os
import tempfile
import unittest

import numpy as np

from clbench.clbench_metrics import (
    NoAssociation,
    NoOverlap,
    TimedPath,
    associate,
    ate,
    classify_failure,
    load_trajectory,
    tracking_rmse,
)
from clbench.clbench_se2 import Pose2


def line_path(n=101, dt=0.1, speed=1.0, y=0.0, t0=0.0):
    t = t0 + dt * np.arange(n)
    poses = np.column_stack([speed * (t - t0), np.full(n, y), np.zeros(n)])
    return TimedPath(t, poses)


def wiggly_path(n=200, seed=0):
    rng = np.random.default_rng(seed)
    t = 0.05 * np.arange(n)
    theta = np.cumsum(rng.uniform(-0.2, 0.2, n))
    x = np.cumsum(0.05 * np.cos(theta))
    y = np.cumsum(0.05 * np.sin(theta))
    return TimedPath(t, np.column_stack([x, y, np.angle(np.exp(1j * theta))]))


class TestTrackingRmse(unittest.TestCase):
    def test_identical(self):
        path = wiggly_path()
        report = tracking_rmse(path, path)
        self.assertEqual(report.rmse_trans, 0.0)
        self.assertEqual(report.max_err, 0.0)
        self.assertFalse(report.failed)
        self.assertEqual(report.n_samples, len(path))

    def test_constant_lateral_offset(self):
        report = tracking_rmse(line_path(), line_path(y=0.3))
        self.assertAlmostEqual(report.rmse_trans, 0.3, places=12)
        self.assertAlmostEqual(report.max_err, 0.3, places=12)
        self.assertAlmostEqual(report.rmse_yaw, 0.0, places=12)

    def test_half_the_samples_off(self):
        desired = line_path(n=100)
        poses = desired.poses.copy()
        poses[50:, 1] = 0.4
        report = tracking_rmse(desired, TimedPath(desired.t, poses))
        self.assertAlmostEqual(report.rmse_trans, 0.4 / math.sqrt(2), places=12)
        self.assertAlmostEqual(report.max_err, 0.4, places=12)

    def test_rigid_transform_invariance(self):
        desired = wiggly_path(seed=1)
        poses = desired.poses.copy()
        poses[:, :2] += np.random.default_rng(2).normal(0.0, 0.1, (len(desired), 2))
        actual = TimedPath(desired.t, poses)
        g = Pose2(12.0, -3.0, 1.1)
        moved = tracking_rmse(desired.transformed(g), actual.transformed(g))
        base = tracking_rmse(desired, actual)
        self.assertAlmostEqual(moved.rmse_trans, base.rmse_trans, places=9)
        self.assertAlmostEqual(moved.rmse_yaw, base.rmse_yaw, places=9)

    def test_resampling_invariance(self):
        dense = line_path(n=201, dt=0.05, speed=1.0)
        sparse = line_path(n=21, dt=0.5, speed=1.0)
        actual = line_path(n=97, dt=0.1, speed=1.0, y=0.2, t0=0.13)
        self.assertAlmostEqual(
            tracking_rmse(dense, actual).rmse_trans,
            tracking_rmse(sparse, actual).rmse_trans,
            places=12,
        )

    def test_only_overlap_counted(self):
        desired = line_path(n=11, dt=0.1)
        actual = line_path(n=21, dt=0.1)
        self.assertEqual(tracking_rmse(desired, actual).n_samples, 11)

    def test_no_overlap(self):
        with self.assertRaises(NoOverlap):
            tracking_rmse(line_path(n=10), line_path(n=10, t0=100.0))

    def test_failure_flag(self):
        report = tracking_rmse(line_path(), line_path(y=12.0))
        self.assertTrue(report.failed)
        relaxed = tracking_rmse(line_path(), line_path(y=12.0), threshold=15.0)
        self.assertFalse(relaxed.failed)

    def test_path_validation(self):
        with self.assertRaises(ValueError):
            TimedPath([0.0, 0.0], [[0, 0, 0], [1, 0, 0]])
        with self.assertRaises(ValueError):
            TimedPath([0.0], [[0, 0, 0]])


class TestAte(unittest.TestCase):
    def test_identical(self):
        path = wiggly_path()
        self.assertEqual(ate(path, path).rmse_trans, 0.0)
        self.assertLess(ate(path, path, align=True).rmse_trans, 1e-12)

    def test_rigid_offset_removed(self):
        truth = wiggly_path(seed=3)
        estimated = truth.transformed(Pose2(4.0, -7.0, 2.3))
        self.assertGreater(ate(estimated, truth).rmse_trans, 1.0)
        report = ate(estimated, truth, align=True)
        self.assertLess(report.rmse_trans, 1e-9)
        self.assertLess(report.rmse_yaw, 1e-9)
        self.assertEqual(report.label, "ate_aligned")

    def test_matches_grid_search(self):
        truth = TimedPath([0.0, 1.0, 2.0], [[0, 0, 0], [1, 0, 0], [1, 1, 0]])
        estimated = TimedPath(
            [0.0, 1.0, 2.0], [[0.3, 0.1, 0], [1.2, 0.4, 0], [1.5, 1.1, 0]]
        )
        report = ate(estimated, truth, align=True)
        # the best translation for a fixed rotation is the centroid offset
        thetas = np.linspace(-math.pi, math.pi, 400001)
        c, s = np.cos(thetas), np.sin(thetas)
        est = estimated.xy - estimated.xy.mean(axis=0)
        ref = truth.xy - truth.xy.mean(axis=0)
        rx = c[:, None] * est[None, :, 0] - s[:, None] * est[None, :, 1]
        ry = s[:, None] * est[None, :, 0] + c[:, None] * est[None, :, 1]
        sq = (rx - ref[None, :, 0]) ** 2 + (ry - ref[None, :, 1]) ** 2
        rmse = np.sqrt(np.mean(sq, axis=1))
        self.assertAlmostEqual(report.rmse_trans, rmse.min(), delta=1e-4)

    def test_alignment_never_worse(self):
        for seed in range(10):
            truth = wiggly_path(seed=seed)
            noisy = truth.poses.copy()
            rng = np.random.default_rng(seed + 100)
            noisy[:, :2] += rng.normal(0.0, 0.2, (len(truth), 2))
            estimated = TimedPath(truth.t, noisy)
            aligned = ate(estimated, truth, align=True).rmse_trans
            self.assertLessEqual(aligned, ate(estimated, truth).rmse_trans + 1e-12)

    def test_association_tolerance(self):
        truth = line_path(n=50, dt=0.1)
        shifted = line_path(n=50, dt=0.1, t0=0.005)
        i_first, i_second = associate(shifted, truth)
        self.assertEqual(len(i_first), 50)
        np.testing.assert_array_equal(i_first, i_second)
        with self.assertRaises(NoAssociation):
            ate(line_path(n=50, dt=0.1, t0=0.05), truth)


class TestFailure(unittest.TestCase):
    def test_threshold(self):
        self.assertTrue(classify_failure(10.01))
        self.assertFalse(classify_failure(9.99))
        self.assertFalse(classify_failure(10.0))
        self.assertTrue(classify_failure(2.0, threshold=1.0))
        with self.assertRaises(ValueError):
            classify_failure(-1.0)


class TestLoadTrajectory(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmp.cleanup()

    def write(self, name, text):
        path = os.path.join(self.tmp.name, name)
        with open(path, "w") as f:
            f.write(text)
        return path

    def test_load(self):
        path = self.write(
            "run.traj",
            "# t x y theta\n0.0 0 0 0\n\n0.5 0.5 0.1 0.2\n1.0 1.0 0.2 0.3\n",
        )
        traj = load_trajectory(path)
        self.assertEqual(len(traj), 3)
        np.testing.assert_allclose(traj.poses[1], [0.5, 0.1, 0.2])

    def test_wrong_columns(self):
        path = self.write("bad.traj", "0.0 0 0\n1.0 1 0\n")
        with self.assertRaises(ValueError):
            load_trajectory(path)


if __name__ == "__main__":
    unittest.main()
