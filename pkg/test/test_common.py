"""
Python unittest
"""
import json
import logging
import unittest
from dataclasses import replace

import numpy as np

from clbench.clbench_harness import BenchSetup
from clbench.clbench_sensors import ImuModel
from clbench.clbench_se2 import BodyVelocity, Pose2
from clbench.clbench_vehicle import TruthHistory, VehicleState


class FixedTarget:
    """Stand-in for DesiredTrajectory: d*(t) = start + velocity * t."""

    def __init__(self, start, velocity=(0.0, 0.0), duration=10.0, name="fixed"):
        self.start = np.asarray(start, dtype=float)
        self.velocity = np.asarray(velocity, dtype=float)
        self.duration = duration
        self.name = name

    def eval(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        p = self.start[None, :] + t[:, None] * self.velocity[None, :]
        v = np.repeat(self.velocity[None, :], len(t), axis=0)
        return p, v, np.zeros_like(p)


def straight_history(speed=1.0, duration=10.0, dt=0.005, start=Pose2()):
    """Truth record of constant-speed straight driving sampled every dt."""
    history = TruthHistory(VehicleState(start, BodyVelocity(speed, 0.0), 0.0))
    n = int(round(duration / dt))
    for k in range(1, n + 1):
        t = k * dt
        pose = Pose2(start.x + speed * t, start.y, start.theta)
        history.append(VehicleState(pose, BodyVelocity(speed, 0.0), t))
    return history


class TestCommon(unittest.TestCase):
    class ArgsObject(object):
        pass

    def setUp(self):
        logging.disable(logging.CRITICAL)
        # CONFIG
        with open("test/test_config.json", "r") as f:
            self.config = json.load(f)
        self.setup = BenchSetup(self.config)
        self.ideal_imu = ImuModel(name="ideal")

    def tearDown(self):
        logging.disable(logging.NOTSET)

    def make_run_config(
        self,
        scenario="straight",
        v_des=1.0,
        estimator="exact",
        imu="adis16448",
        ideal_imu=True,
        **changes,
    ):
        cfg = self.setup.run_config(scenario, v_des, estimator, imu)
        if ideal_imu:
            cfg = replace(cfg, estimator=replace(cfg.estimator, imu=self.ideal_imu))
        estimator_changes = changes.pop("estimator_changes", None)
        if estimator_changes:
            cfg = replace(cfg, estimator=replace(cfg.estimator, **estimator_changes))
        return replace(cfg, **changes) if changes else cfg

    def make_args(self, command, **values):
        args = self.ArgsObject()
        args.command = command
        for key in ("config", "seed", "repeats", "workers", "out", "loop_mode"):
            setattr(args, key, None)
        for key, value in values.items():
            setattr(args, key, value)
        return args


if __name__ == "__main__":
    unittest.main()
