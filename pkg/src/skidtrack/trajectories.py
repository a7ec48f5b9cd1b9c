"""Reference trajectories for the benchmark protocol.

Three profiles: a straight line at cruise speed, a constant-rate circle of
radius 1 m, and a bow-shaped figure whose speed and turn rate are slow
sinusoids (the speed crosses zero twice per cycle, forcing near-pure rotations
at the cusps).

The reference pose is obtained by integrating an ideal robot (no lateral
offset, no slip) along the profile with the same fixed-step scheme the
simulator uses, so reference and plant states refine together.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .controller import DesiredState
from .errors import OutOfRange
from .geometry import Pose2D

STRAIGHT_SPEED = 0.3  # m/s
CIRCLE_SPEED = 0.2  # m/s
CIRCLE_RATE = 0.2  # rad/s -> radius 1 m
BOW_AMPLITUDE = 0.2
BOW_FREQ = 0.1  # rad/s of the modulation

# one bow lobe spans a full modulation period
BOW_LOBE = 2.0 * math.pi / BOW_FREQ

DEFAULT_DURATIONS = {
    "straight": 30.0,
    "circular": 35.0,
    "bow": 2.0 * BOW_LOBE,
}


@dataclass(frozen=True, slots=True)
class TrajectorySpec:
    kind: str
    duration: float

    def __post_init__(self) -> None:
        if self.kind not in DEFAULT_DURATIONS:
            raise ValueError(f"unknown trajectory kind {self.kind!r}")
        if self.duration <= 0.0:
            raise ValueError("duration must be positive")

    @classmethod
    def make(cls, kind: str, duration: float | None = None) -> "TrajectorySpec":
        if duration is None:
            duration = DEFAULT_DURATIONS.get(kind)
            if duration is None:
                raise ValueError(f"unknown trajectory kind {kind!r}")
        return cls(kind, duration)


def profile(
    spec: TrajectorySpec, t: float
) -> tuple[float, float, float, float]:
    """(v_d, v_d_dot, omega_d, omega_d_dot) at time t; t must lie in the span."""
    if t < 0.0 or t > spec.duration:
        raise OutOfRange(f"t = {t} outside [0, {spec.duration}]")
    return _profile_unchecked(spec.kind, t)


def _profile_unchecked(kind: str, t: float) -> tuple[float, float, float, float]:
    if kind == "straight":
        return STRAIGHT_SPEED, 0.0, 0.0, 0.0
    if kind == "circular":
        return CIRCLE_SPEED, 0.0, CIRCLE_RATE, 0.0
    # bow
    ph = BOW_FREQ * t
    return (
        BOW_AMPLITUDE * math.sin(ph),
        BOW_AMPLITUDE * BOW_FREQ * math.cos(ph),
        BOW_AMPLITUDE * math.cos(ph),
        -BOW_AMPLITUDE * BOW_FREQ * math.sin(ph),
    )


def _ideal_rate(
    kind: str, t: float, x: float, y: float, theta: float
) -> tuple[float, float, float]:
    v, _, w, _ = _profile_unchecked(kind, t)
    return v * math.cos(theta), v * math.sin(theta), w


def integrate_reference(
    spec: TrajectorySpec, t_end: float, dt: float = 1e-3
) -> tuple[float, float, float]:
    """Reference pose at t_end via classic fourth-order steps from the origin."""
    if t_end < 0.0 or t_end > spec.duration:
        raise OutOfRange(f"t = {t_end} outside [0, {spec.duration}]")
    x = y = theta = 0.0
    n = int(round(t_end / dt))
    h = t_end / n if n else dt
    kind = spec.kind
    for i in range(n):
        t = i * h
        k1 = _ideal_rate(kind, t, x, y, theta)
        k2 = _ideal_rate(kind, t + h / 2, x + h / 2 * k1[0], y + h / 2 * k1[1], theta + h / 2 * k1[2])
        k3 = _ideal_rate(kind, t + h / 2, x + h / 2 * k2[0], y + h / 2 * k2[1], theta + h / 2 * k2[2])
        k4 = _ideal_rate(kind, t + h, x + h * k3[0], y + h * k3[1], theta + h * k3[2])
        x += h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        y += h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        theta += h / 6 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])
    return x, y, theta


def desired_pose(spec: TrajectorySpec, t: float, dt: float = 1e-3) -> Pose2D:
    x, y, theta = integrate_reference(spec, t, dt)
    return Pose2D(x, y, theta)


def desired_state(
    spec: TrajectorySpec, t: float, pose: Pose2D
) -> DesiredState:
    """Bundle a previously integrated reference pose with the profile at t."""
    v, v_dot, w, w_dot = profile(spec, t)
    return DesiredState(pose, v, v_dot, w, w_dot)
