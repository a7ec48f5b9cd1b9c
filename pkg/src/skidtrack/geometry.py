"""Planar kinematics of a four-wheel skid-steering platform.

Velocities live in the body frame: x forward, y left, yaw counter-clockwise.
Slip is tracked at vehicle level with two scalars: a longitudinal slip ratio
and a lateral skid speed.  All operations are pure functions over small frozen
dataclasses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import (
    DegenerateICR,
    DegenerateSlip,
    ICRAtInfinity,
    UndefinedAngle,
    UndefinedSlip,
)

TWO_PI = 2.0 * math.pi

# Physical cap on |slip ratio|; beyond it wheel-speed conversions are singular.
SLIP_CAP = 0.95
# Below this rotation-center offset the skid/yaw coupling term is meaningless.
X0_FLOOR = 1e-3
# Ideal forward speeds below this make the slip ratio undefined.
V_EPS = 1e-6
# Yaw rates below this put the rotation center at infinity.
OMEGA_EPS = 1e-6


def wrap_angle(angle: float) -> float:
    """Normalize an angle to (-pi, pi]."""
    return math.pi - (math.pi - angle) % TWO_PI


@dataclass(frozen=True, slots=True)
class Pose2D:
    """Planar pose; heading is normalized to (-pi, pi] on construction."""

    x: float
    y: float
    theta: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "theta", wrap_angle(self.theta))


@dataclass(frozen=True, slots=True)
class BodyTwist:
    """Body-frame velocity: forward, lateral, yaw."""

    v_x: float
    v_y: float
    omega: float

    @property
    def speed(self) -> float:
        return math.hypot(self.v_x, self.v_y)

    @property
    def heading(self) -> float:
        """Direction of travel relative to the body x axis, in (-pi, pi]."""
        if self.speed == 0.0:
            raise UndefinedAngle("velocity heading undefined for zero-magnitude twist")
        return wrap_angle(math.atan2(self.v_y, self.v_x))


@dataclass(frozen=True, slots=True)
class WheelSpeeds:
    """Angular speeds of the left and right wheel pairs, rad/s."""

    omega_left: float
    omega_right: float


@dataclass(frozen=True, slots=True)
class SlipState:
    """Vehicle-level slip: longitudinal ratio s_v and lateral skid speed (m/s).

    s_v < 1 strictly (s_v = 1 would mean no forward motion at any wheel speed);
    |s_v| is additionally capped at SLIP_CAP to keep conversions well posed.
    """

    s_v: float
    sigma_v: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.s_v) and math.isfinite(self.sigma_v)):
            raise ValueError("slip components must be finite")
        if abs(self.s_v) > SLIP_CAP:
            raise ValueError(f"|s_v| = {abs(self.s_v):.4f} exceeds cap {SLIP_CAP}")


ZERO_SLIP = SlipState(0.0, 0.0)


@dataclass(frozen=True, slots=True)
class RobotGeometry:
    """Chassis constants.

    wheel_radius  effective wheel radius r (m)
    half_track    half the lateral wheel separation c (m)
    rear_offset   distance a from center to the rear axle (m)
    front_offset  distance b from center to the front axle (m)
    x0            longitudinal offset of the instantaneous rotation center (m),
                  kept within [x0_min, x0_max]
    """

    wheel_radius: float
    half_track: float
    rear_offset: float
    front_offset: float
    x0: float = 0.0
    x0_min: float = field(default=-0.15)
    x0_max: float = field(default=0.15)

    def __post_init__(self) -> None:
        for name in ("wheel_radius", "half_track", "rear_offset", "front_offset"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        if not (self.x0_min <= self.x0 <= self.x0_max):
            raise ValueError(
                f"x0 = {self.x0} outside [{self.x0_min}, {self.x0_max}]"
            )


def pose_rate(pose: Pose2D, twist: BodyTwist) -> tuple[float, float, float]:
    """World-frame pose derivative for a body-frame twist."""
    c, s = math.cos(pose.theta), math.sin(pose.theta)
    return (
        twist.v_x * c - twist.v_y * s,
        twist.v_x * s + twist.v_y * c,
        twist.omega,
    )


def ideal_velocities(
    wheels: WheelSpeeds, geom: RobotGeometry
) -> tuple[float, float, float]:
    """No-slip body velocities (v_Ix, omega_I, v_Iy) implied by wheel speeds.

    The lateral component follows the rotation-center model: an offset x0
    couples yaw into lateral motion, v_Iy = x0 * omega_I.
    """
    r = geom.wheel_radius
    v_ix = r * (wheels.omega_left + wheels.omega_right) / 2.0
    omega_i = r * (wheels.omega_right - wheels.omega_left) / (2.0 * geom.half_track)
    v_iy = geom.x0 * omega_i
    return v_ix, omega_i, v_iy


def twist_with_slip(
    wheels: WheelSpeeds, slip: SlipState, geom: RobotGeometry
) -> tuple[float, float]:
    """Realized forward speed xi and yaw rate rho under vehicle-level slip.

    xi  = (r/2)(omega_R + omega_L)(1 - s_v)
    rho = (r/2c)(omega_R - omega_L) + sigma_v / x0
    """
    if slip.sigma_v != 0.0 and abs(geom.x0) < X0_FLOOR:
        raise DegenerateICR(
            f"skid/yaw coupling needs |x0| >= {X0_FLOOR}, got {geom.x0}"
        )
    r = geom.wheel_radius
    xi = (r / 2.0) * (wheels.omega_right + wheels.omega_left) * (1.0 - slip.s_v)
    rho = (r / (2.0 * geom.half_track)) * (wheels.omega_right - wheels.omega_left)
    if slip.sigma_v != 0.0:
        rho += slip.sigma_v / geom.x0
    return xi, rho


def slip_from_velocities(v_ix: float, v_x: float) -> float:
    """Longitudinal slip ratio s_v = (v_Ix - v_x) / v_Ix."""
    if abs(v_ix) <= V_EPS:
        raise UndefinedSlip(f"ideal forward speed {v_ix} too small for a slip ratio")
    return (v_ix - v_x) / v_ix


def skid_from_velocities(v_iy: float, v_y: float) -> float:
    """Lateral skid speed sigma_v = v_Iy - v_y."""
    return v_iy - v_y


def angle_skid(ideal: BodyTwist, actual: BodyTwist) -> float:
    """Angle between the ideal and actual velocity directions, in (-pi, pi].

    Exact +/- pi deviations land on +pi by the wrap convention.
    """
    if ideal.speed == 0.0 or actual.speed == 0.0:
        raise UndefinedAngle("angle skid undefined for a zero-magnitude twist")
    return wrap_angle(
        math.atan2(ideal.v_y, ideal.v_x) - math.atan2(actual.v_y, actual.v_x)
    )


def side_velocity_map(
    v_x: float, omega: float, geom: RobotGeometry
) -> tuple[float, float, float, float]:
    """Longitudinal speeds of the left/right sides and lateral speeds of the
    front/back axles, from the body twist and the rotation-center offset."""
    v_l = v_x - geom.half_track * omega
    v_r = v_x + geom.half_track * omega
    v_f = (-geom.x0 + geom.front_offset) * omega
    v_b = (-geom.x0 - geom.rear_offset) * omega
    return v_l, v_r, v_f, v_b


def wheel_speeds_from_sides(
    v_left: float, v_right: float, s_left: float, s_right: float, geom: RobotGeometry
) -> WheelSpeeds:
    """Wheel speeds needed to realize side speeds under per-side slip ratios."""
    for s in (s_left, s_right):
        if s >= SLIP_CAP:
            raise DegenerateSlip(f"side slip ratio {s} at or beyond cap {SLIP_CAP}")
    r = geom.wheel_radius
    return WheelSpeeds(
        omega_left=v_left / (r * (1.0 - s_left)),
        omega_right=v_right / (r * (1.0 - s_right)),
    )


def icr_position(twist: BodyTwist) -> tuple[float, float]:
    """Body-frame instantaneous center of rotation (x0, y0) = (-v_y, v_x)/omega."""
    if abs(twist.omega) <= OMEGA_EPS:
        raise ICRAtInfinity(f"yaw rate {twist.omega} too small for a finite center")
    return -twist.v_y / twist.omega, twist.v_x / twist.omega


def full_pose_rate(
    pose: Pose2D, xi: float, rho: float, x0: float
) -> tuple[float, float, float]:
    """Pose derivative under the rotation-center kinematics.

    x_dot = xi cos(theta) + x0 rho sin(theta)
    y_dot = xi sin(theta) - x0 rho cos(theta)
    theta_dot = rho

    This derivative annihilates the lateral constraint row
    [-sin(theta), cos(theta), x0] by construction.
    """
    c, s = math.cos(pose.theta), math.sin(pose.theta)
    return (xi * c + x0 * rho * s, xi * s - x0 * rho * c, rho)
