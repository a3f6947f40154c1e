#!/usr/bin/env python3
"""
Planar IMU and camera trigger models feeding the estimator surrogates.
"""

__author__ = "The clbench developers"
__version__ = "1.0.0"
__license__ = "MIT"

import json
import logging
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Tuple

from clbench.clbench_helper import ConfigError
from clbench.clbench_vehicle import VehicleState

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ImuModel:
    name: str = "custom"
    accel_noise_density: float = 0.0
    gyro_noise_density: float = 0.0
    accel_bias_rw: float = 0.0
    gyro_bias_rw: float = 0.0
    rate: float = 200.0
    accel_bias: Tuple[float, float] = (0.0, 0.0)
    gyro_bias: float = 0.0
    provenance: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "accel_bias", tuple(float(b) for b in self.accel_bias))
        densities = (
            self.accel_noise_density,
            self.gyro_noise_density,
            self.accel_bias_rw,
            self.gyro_bias_rw,
        )
        if min(densities) < 0:
            raise ValueError(f"IMU model {self.name}: densities must be non-negative")
        if self.rate <= 0:
            raise ValueError(f"IMU model {self.name}: rate must be positive")

    @classmethod
    def from_dict(cls, data):
        known = {k: v for k, v in data.items() if k in cls.__dataclass_fields__}
        return cls(**known)

    def to_dict(self):
        return {
            "name": self.name,
            "accel_noise_density": self.accel_noise_density,
            "gyro_noise_density": self.gyro_noise_density,
            "accel_bias_rw": self.accel_bias_rw,
            "gyro_bias_rw": self.gyro_bias_rw,
            "rate": self.rate,
            "accel_bias": list(self.accel_bias),
            "gyro_bias": self.gyro_bias,
        }


class ImuBias(NamedTuple):
    ax: float = 0.0
    ay: float = 0.0
    gz: float = 0.0

    @classmethod
    def initial(cls, model: ImuModel):
        return cls(model.accel_bias[0], model.accel_bias[1], model.gyro_bias)


@dataclass(frozen=True, slots=True)
class ImuReading:
    t: float
    accel: Tuple[float, float]
    gyro: float
    dt: float


@dataclass(frozen=True)
class CameraSchedule:
    rate: float = 30.0
    first_frame: float = 0.0
    baseline: float = 0.11

    def __post_init__(self):
        if self.rate <= 0:
            raise ValueError("camera rate must be positive")

    @property
    def period(self):
        return 1.0 / self.rate

    def to_dict(self):
        return {
            "rate": self.rate,
            "first_frame": self.first_frame,
            "baseline": self.baseline,
        }


def load_imu_preset(path) -> ImuModel:
    try:
        with open(path, "r") as preset_file:
            data = json.load(preset_file)
    except FileNotFoundError:
        raise ConfigError(f"IMU preset {path} not found.")
    return ImuModel.from_dict(data)


def imu_sample(
    prev: VehicleState,
    next: VehicleState,
    model: ImuModel,
    bias: ImuBias,
    rng,
    dt=None,
):
    """
    One IMU reading covering (prev.t, next.t].

    The forward channel reports the acceleration the vehicle applied over
    the interval, the lateral channel the centripetal acceleration and the
    gyro the yaw rate. Bias and white noise (density * sqrt(rate)) are added
    on top; the bias then takes one random-walk step (density * sqrt(dt)).
    `dt` is the integration step of the truth, when the caller knows it.
    """
    if next.t <= prev.t:
        raise ValueError("IMU truth states must be strictly increasing in time")
    if dt is None:
        dt = next.t - prev.t
    accel_x = next.accel + bias.ax
    accel_y = next.vel.nu * next.vel.omega + bias.ay
    gyro = next.vel.omega + bias.gz

    if model.accel_noise_density > 0 or model.gyro_noise_density > 0:
        sigma_a = model.accel_noise_density * math.sqrt(model.rate)
        sigma_g = model.gyro_noise_density * math.sqrt(model.rate)
        n = rng.standard_normal(3)
        accel_x += sigma_a * n[0]
        accel_y += sigma_a * n[1]
        gyro += sigma_g * n[2]

    if model.accel_bias_rw > 0 or model.gyro_bias_rw > 0:
        sqrt_dt = math.sqrt(dt)
        w = rng.standard_normal(3)
        bias = ImuBias(
            bias.ax + model.accel_bias_rw * sqrt_dt * w[0],
            bias.ay + model.accel_bias_rw * sqrt_dt * w[1],
            bias.gz + model.gyro_bias_rw * sqrt_dt * w[2],
        )

    return ImuReading(next.t, (float(accel_x), float(accel_y)), float(gyro), dt), bias


def frame_times(sched: CameraSchedule, horizon: float):
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    times = []
    k = 0
    while True:
        t = sched.first_frame + k / sched.rate
        if t > horizon + 1e-9:
            break
        times.append(t)
        k += 1
    return times
