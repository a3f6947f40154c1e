"""
Python unittest
"""
import math
import unittest

import numpy as np

from clbench.clbench_trajectory import (
    DegenerateWaypoints,
    InfeasibleSpeed,
    MotionProfile,
    TrajectoryLimits,
    WaypointList,
    expand_corners,
    fit_spline,
    load_scenario,
    motion_profile,
)


class TestClBenchTrajectory(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.limits = TrajectoryLimits(v_max=1.65, a_max=0.5)
        cls.line = fit_spline(WaypointList("line", [(0, 0), (10, 0)]), 1.0, cls.limits)
        cls.s1 = load_scenario("scenarios/s1.json")
        cls.s1_traj = fit_spline(cls.s1, 1.0, cls.limits)

    def interior_times(self, traj, count=40):
        """Midpoints of time-law intervals, where d* is smooth."""
        idx = np.linspace(0, len(traj.t_nodes) - 2, count).astype(int)
        return 0.5 * (traj.t_nodes[idx] + traj.t_nodes[idx + 1])

    def test_straight_duration(self):
        self.assertAlmostEqual(self.line.duration, 12.0, places=6)
        self.assertAlmostEqual(self.line.length, 10.0, places=9)

    def test_straight_endpoints(self):
        p, v, _ = self.line.eval(0.0)
        np.testing.assert_allclose(p, [0, 0], atol=1e-12)
        np.testing.assert_allclose(v, [0, 0], atol=1e-12)
        p, v, _ = self.line.eval(self.line.duration)
        np.testing.assert_allclose(p, [10, 0], atol=1e-9)
        np.testing.assert_allclose(v, [0, 0], atol=1e-12)

    def test_straight_cruise_speed(self):
        _, v, a = self.line.eval(6.0)
        self.assertAlmostEqual(np.linalg.norm(v), 1.0, delta=1e-6)
        np.testing.assert_allclose(a, [0, 0], atol=1e-9)

    def test_eval_clamps_outside(self):
        p, v, a = self.line.eval(np.array([-1.0, self.line.duration + 5.0]))
        np.testing.assert_allclose(p, [[0, 0], [10, 0]], atol=1e-9)
        np.testing.assert_allclose(v, 0.0, atol=1e-12)
        np.testing.assert_allclose(a, 0.0, atol=1e-12)

    def test_passes_through_waypoints(self):
        p, _, _ = self.s1_traj.eval(self.s1_traj.waypoint_times)
        np.testing.assert_allclose(p, np.asarray(self.s1.points), atol=1e-9)

    def test_limits_respected(self):
        t = np.arange(0.0, self.s1_traj.duration, 0.01)
        _, v, a = self.s1_traj.eval(t)
        self.assertLessEqual(np.max(np.linalg.norm(v, axis=1)), self.limits.v_max)
        peak = np.max(np.linalg.norm(a, axis=1))
        self.assertLessEqual(peak, self.limits.a_max + 1e-9)

    def test_derivatives_match_finite_differences(self):
        h = 1e-3
        for traj, acc_tol in ((self.line, 1e-6), (self.s1_traj, 1e-5)):
            t = self.interior_times(traj)
            p_plus, v_plus, _ = traj.eval(t + h)
            p_minus, v_minus, _ = traj.eval(t - h)
            _, v, a = traj.eval(t)
            np.testing.assert_allclose((p_plus - p_minus) / (2 * h), v, atol=1e-6)
            np.testing.assert_allclose((v_plus - v_minus) / (2 * h), a, atol=acc_tol)

    def test_scalar_and_vector_eval_agree(self):
        t = np.array([1.0, 7.3, 20.0])
        p, v, a = self.s1_traj.eval(t)
        for k, tk in enumerate(t):
            ps, vs, as_ = self.s1_traj.eval(float(tk))
            np.testing.assert_allclose(ps, p[k], atol=1e-12)
            np.testing.assert_allclose(vs, v[k], atol=1e-12)
            np.testing.assert_allclose(as_, a[k], atol=1e-12)

    def test_heading(self):
        self.assertAlmostEqual(self.line.heading(5.0), 0.0)
        headings = self.s1_traj.heading(self.s1_traj.waypoint_times)
        self.assertAlmostEqual(headings[-1], math.pi / 2, places=2)

    def test_time_and_arc_invert(self):
        sigma = np.linspace(0.0, self.s1_traj.length, 50)
        back, _, _ = self.s1_traj.arc_at_time(self.s1_traj.time_at_arc(sigma))
        np.testing.assert_allclose(back, sigma, atol=1e-9)

    def test_long_scenario_duration_envelope(self):
        l1 = load_scenario("scenarios/l1.json")
        traj = fit_spline(l1, 1.5, self.limits)
        self.assertGreater(traj.length, 200.0)
        self.assertTrue(30.0 <= traj.duration <= 480.0)

    def test_scenario_lengths(self):
        bounds = (
            ("s1", 40, 60),
            ("s2", 40, 60),
            ("m1", 100, 140),
            ("m2", 100, 140),
            ("l2", 200, 280),
        )
        for name, low, high in bounds:
            traj = fit_spline(load_scenario(f"scenarios/{name}.json"), 1.0, self.limits)
            self.assertTrue(low <= traj.length <= high, f"{name}: {traj.length}")

    def test_degenerate_waypoints(self):
        with self.assertRaises(DegenerateWaypoints):
            WaypointList("single", [(0, 0)])
        with self.assertRaises(DegenerateWaypoints):
            WaypointList("repeated", [(0, 0), (1, 1), (1, 1)])

    def test_infeasible_speed(self):
        wp = WaypointList("line", [(0, 0), (10, 0)])
        with self.assertRaises(InfeasibleSpeed):
            fit_spline(wp, 2.0, self.limits)
        with self.assertRaises(InfeasibleSpeed):
            fit_spline(wp, 0.0, self.limits)

    def test_motion_profile(self):
        self.assertEqual(motion_profile(0.5), MotionProfile.LOW)
        self.assertEqual(motion_profile(1.0), MotionProfile.MEDIUM)
        self.assertEqual(motion_profile(1.5), MotionProfile.HIGH)
        self.assertEqual(motion_profile(0.74), MotionProfile.LOW)
        self.assertEqual(motion_profile(1.25), MotionProfile.HIGH)
        with self.assertRaises(ValueError):
            motion_profile(0.0)

    def test_expand_corners(self):
        points = expand_corners([(0, 0), (10, 0), (10, 10)], corner_cut=1.0)
        self.assertEqual(points, [(0.0, 0.0), (9.0, 0.0), (10.0, 1.0), (10.0, 10.0)])
        dense = expand_corners([(0, 0), (10, 0)], spacing=3.0)
        self.assertEqual(len(dense), 5)
        self.assertEqual(expand_corners([(0, 0), (1, 1)]), [(0.0, 0.0), (1.0, 1.0)])

    def test_spline_cuts_written_corners(self):
        self.assertEqual(self.s1.source_points[1], (15, 0))
        self.assertNotIn((15.0, 0.0), self.s1.points)
        t = np.linspace(0.0, self.s1_traj.duration, 5000)
        p, _, _ = self.s1_traj.eval(t)
        for corner in self.s1.source_points[1:-1]:
            gap = np.linalg.norm(p - np.asarray(corner, dtype=float), axis=1)
            self.assertGreater(gap.min(), 0.3, corner)

    def test_scenarios_start_at_origin(self):
        for name in ("straight", "s1", "s2", "m1", "m2", "l1", "l2"):
            wp = load_scenario(f"scenarios/{name}.json")
            self.assertEqual(wp.points[0], (0.0, 0.0))


if __name__ == "__main__":
    unittest.main()
