"""Sliding-mode trajectory-tracking controller with slip/skid compensation.

The tracking error is expressed in the robot frame (along-track, cross-track,
heading).  Two sliding manifolds combine errors and error rates:

    s1 = lambda1 * eps1 + eps1_dot        (longitudinal channel)
    s2 = lambda2 * eps2 + eps2_dot        (lateral/heading channel)

The command is an equivalent part that cancels the modeled manifold drift plus
a reaching part that drives the state onto the manifolds, optionally smoothed
by a boundary layer.  A final feedforward stage rescales the commands with the
estimated slip ratio and skid speed.

All functions are pure; `step` composes them for one control tick.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .dynamics import DynamicsParams, UncertaintyEnvelope
from .errors import DegenerateSlip
from .geometry import SLIP_CAP, X0_FLOOR, BodyTwist, Pose2D, wrap_angle

# Half-width of the window around the equivalent-control singularity in which
# the closed-form limit replaces the raw quotient.
SINGULARITY_EPS = 1e-4
# Floor for the reaching-amplitude denominator, m.
DENOM_FLOOR = 1e-2
# Equivalent yaw control is capped at this fraction of the yaw saturation.
EQ_YAW_CAP_RATIO = 0.5
# Yaw reaching is capped at this multiple of the yaw saturation.
REACH_YAW_CAP_RATIO = 2.0


@dataclass(frozen=True, slots=True)
class ControllerGains:
    """Tuning constants for both manifolds plus actuator and model settings.

    lambda1, lambda2   manifold slopes; must exceed 1 for the boundary layer
                       to be attractive
    k1, k2             reaching amplitudes (already net of the worst-case
                       manifold drift; no separate drift knob exists)
    gamma1, gamma2     boundary-layer half-widths
    x0_hat             rotation-center offset assumed by the control model
    x0_reach           offset scale in the lateral reaching amplitude
    v_max, omega_max   command saturation bounds
    x0_comp            offset used to convert estimated skid into a yaw trim
    use_sat            True: boundary-layer smoothing; False: hard switching
    """

    lambda1: float = 1.5
    lambda2: float = 1.2
    k1: float = 5.5
    k2: float = 2.5
    gamma1: float = 0.1
    gamma2: float = 0.1
    x0_hat: float = 0.0
    x0_reach: float = 0.15
    v_max: float = 0.5
    omega_max: float = 0.3
    x0_comp: float = 0.1
    use_sat: bool = True

    def __post_init__(self) -> None:
        for name in ("gamma1", "gamma2", "k1", "k2", "v_max", "omega_max"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        if abs(self.x0_comp) < X0_FLOOR:
            raise ValueError(f"|x0_comp| must be at least {X0_FLOOR}")
        if self.x0_reach <= DENOM_FLOOR:
            raise ValueError(f"x0_reach must exceed {DENOM_FLOOR}")


@dataclass(frozen=True, slots=True)
class DesiredState:
    """Reference pose plus the velocity profile and its rates at one instant."""

    pose: Pose2D
    v: float
    v_dot: float
    omega: float
    omega_dot: float


@dataclass(frozen=True, slots=True)
class CommandPair:
    """Raw controller output and the slip-compensated, saturated command."""

    v_r: float
    omega_r: float
    v_c: float
    omega_c: float


def validate_gains(gains: ControllerGains) -> list[str]:
    """Check the static feasibility conditions; return one line per violation.

    The cross-track boundary-layer width additionally obeys a state-dependent
    bound (see `gamma1_bound`); that one cannot be checked statically and is
    reported by the CLI as an advisory only.
    """
    findings: list[str] = []
    if gains.lambda1 <= 1.0:
        findings.append(
            "manifold-slope condition lambda1 > 1 violated "
            f"(lambda1 = {gains.lambda1})"
        )
    if gains.lambda2 <= 1.0:
        findings.append(
            "manifold-slope condition lambda2 > 1 violated "
            f"(lambda2 = {gains.lambda2})"
        )
    bound = 4.0 * gains.lambda2 * gains.k2
    if gains.gamma2 > bound:
        findings.append(
            "boundary-layer width condition gamma2 <= 4*lambda2*k2 violated "
            f"(gamma2 = {gains.gamma2}, bound = {bound})"
        )
    return findings


def gamma1_bound(eps1: float, gains: ControllerGains) -> float:
    """State-dependent upper bound on gamma1 at a given along-track error.

    Shrinks to zero with eps1: near the origin the longitudinal boundary layer
    must be thin for the layer dynamics to stay contracting.  Advisory only.
    """
    scale = abs(gains.x0_hat) + abs(eps1)
    if scale == 0.0:
        return 0.0
    denom = gains.k1 + 16.0 * gains.k2 * gains.k2 * gains.lambda2 / scale + abs(eps1)
    return gains.lambda1 * eps1 * eps1 / denom


def global_error(desired: Pose2D, actual: Pose2D) -> tuple[float, float, float]:
    """World-frame tracking error (desired minus actual), heading wrapped."""
    return (
        desired.x - actual.x,
        desired.y - actual.y,
        wrap_angle(desired.theta - actual.theta),
    )


def local_error(
    e: tuple[float, float, float], theta: float
) -> tuple[float, float, float]:
    """Rotate the world-frame error into the robot frame.

    eps1: along-track, eps2: cross-track, eps3: heading.
    """
    c, s = math.cos(theta), math.sin(theta)
    e_x, e_y, e_theta = e
    return (c * e_x + s * e_y, -s * e_x + c * e_y, e_theta)


def error_rates(
    eps: tuple[float, float, float],
    v_x: float,
    omega: float,
    desired: DesiredState,
    x0: float,
) -> tuple[float, float, float]:
    """Local-frame error rates under the rotation-center kinematic model."""
    e1, e2, e3 = eps
    sin3, cos3 = math.sin(e3), math.cos(e3)
    d1 = omega * e2 + desired.v * cos3 + desired.omega * x0 * sin3 - v_x
    d2 = (x0 - e1) * omega + desired.v * sin3 - desired.omega * x0 * cos3
    d3 = desired.omega - omega
    return d1, d2, d3


def manifolds(
    eps: tuple[float, float, float],
    eps_dot: tuple[float, float, float],
    gains: ControllerGains,
) -> tuple[float, float]:
    s1 = gains.lambda1 * eps[0] + eps_dot[0]
    s2 = gains.lambda2 * eps[1] + eps_dot[1]
    return s1, s2


def h_terms(
    eps: tuple[float, float, float],
    v_x: float,
    omega: float,
    desired: DesiredState,
    gains: ControllerGains,
    params: DynamicsParams,
    x0: float,
) -> tuple[float, float]:
    """Manifold drift terms: everything in (s1_dot, s2_dot) except the commands.

    s1_dot = h1 + eps2 * omega_cmd / c2 - v_cmd / c1
    s2_dot = h2 + (x0 - eps1) * omega_cmd / c2
    """
    e1, e2, e3 = eps
    lam1, lam2 = gains.lambda1, gains.lambda2
    vd, vdd = desired.v, desired.v_dot
    wd, wdd = desired.omega, desired.omega_dot
    sin3, cos3 = math.sin(e3), math.cos(e3)

    # drift part of the yaw channel of the plant, reused by both terms
    dyn_w = -(params.c5 / params.c2) * v_x * omega - (params.c6 / params.c2) * omega

    h1 = (
        dyn_w * e2
        + omega * (-omega * e1 + vd * sin3 - wd * x0 * cos3 + omega * x0 + lam1 * e2)
        - lam1 * v_x
        + (-(params.c3 / params.c1) * omega * omega + (params.c4 / params.c1) * v_x)
        + vd * (-(wd - omega) * sin3 + lam1 * cos3)
        + vdd * cos3
        + wdd * x0 * sin3
        + wd * (x0 * (wd - omega) * cos3 + lam1 * x0 * sin3)
    )
    h2 = (
        -omega * (omega * e2 + vd * cos3 + wd * x0 * sin3 - v_x)
        + (x0 - e1) * dyn_w
        + vdd * sin3
        + (wd - omega) * vd * cos3
        - wdd * x0 * cos3
        + (wd - omega) * wd * x0 * sin3
        + lam2 * ((x0 - e1) * omega + vd * sin3 - wd * x0 * cos3)
    )
    return h1, h2


def h2_slope(
    v_x: float, omega: float, gains: ControllerGains, params: DynamicsParams
) -> float:
    """d h2 / d eps1: exact, since h2 is affine in the along-track error."""
    return ((params.c5 * v_x + params.c6) / params.c2 - gains.lambda2) * omega


def equivalent_control(
    h1: float,
    h2: float,
    eps: tuple[float, float, float],
    slope: float,
    gains: ControllerGains,
    params: DynamicsParams,
) -> tuple[float, float]:
    """Commands that null the modeled manifold drift.

    The yaw channel divides by (x0_hat - eps1); inside a small window around
    that zero the quotient is replaced by its closed-form limit (h2 is affine
    in eps1, so the limit of h2/d as d -> 0 on the h2 = 0 manifold is -slope).

    The shared quotient is then magnitude-limited so the yaw drift
    cancellation never requests more than half the yaw saturation.  Near the
    offset zero the raw quotient grows without bound; anything beyond actuator
    scale is clipped by saturation anyway, and under plant mismatch the
    residual numerator turns that unbounded quotient into full-scale chatter
    on both channels (the speed channel imports q through the e2 cross term).
    Always finite; never raises.
    """
    e1, e2 = eps[0], eps[1]
    d = gains.x0_hat - e1
    if abs(d) >= SINGULARITY_EPS:
        q = h2 / d
    else:
        q = -slope
    q_cap = EQ_YAW_CAP_RATIO * gains.omega_max / params.c2
    if q > q_cap:
        q = q_cap
    elif q < -q_cap:
        q = -q_cap
    omega_eq = -params.c2 * q
    v_eq = params.c1 * (h1 - e2 * q)
    return v_eq, omega_eq


def compute_h_bounds(
    eps: tuple[float, float, float],
    v_x: float,
    omega: float,
    desired: DesiredState,
    gains: ControllerGains,
    envelope: UncertaintyEnvelope,
    x0: float,
) -> tuple[float, float]:
    """Per-tick worst-case magnitudes of the drift terms over the envelope.

    The drift terms depend on the plant constants only through the four ratios
    c5/c2, c6/c2, c3/c1, c4/c1; interval arithmetic over those ratios at the
    current state gives tight bounds, inflated by a 10 % margin.
    """
    e1, e2, e3 = eps
    lam1, lam2 = gains.lambda1, gains.lambda2
    vd, vdd = desired.v, desired.v_dot
    wd, wdd = desired.omega, desired.omega_dot
    sin3, cos3 = math.sin(e3), math.cos(e3)

    lo, hi = envelope.lower(), envelope.upper()
    # positive parameters: ratio intervals are [num_lo/den_hi, num_hi/den_lo]
    r52 = (lo.c5 / hi.c2, hi.c5 / lo.c2)
    r62 = (lo.c6 / hi.c2, hi.c6 / lo.c2)
    r31 = (lo.c3 / hi.c1, hi.c3 / lo.c1)
    r41 = (lo.c4 / hi.c1, hi.c4 / lo.c1)

    def span(coeff: float, box: tuple[float, float]) -> tuple[float, float]:
        a, b = coeff * box[0], coeff * box[1]
        return (a, b) if a <= b else (b, a)

    def add(
        acc: tuple[float, float], piece: tuple[float, float]
    ) -> tuple[float, float]:
        return acc[0] + piece[0], acc[1] + piece[1]

    rest1 = (
        omega * (-omega * e1 + vd * sin3 - wd * x0 * cos3 + omega * x0 + lam1 * e2)
        - lam1 * v_x
        + vd * (-(wd - omega) * sin3 + lam1 * cos3)
        + vdd * cos3
        + wdd * x0 * sin3
        + wd * (x0 * (wd - omega) * cos3 + lam1 * x0 * sin3)
    )
    box1 = (rest1, rest1)
    box1 = add(box1, span(-v_x * omega * e2, r52))
    box1 = add(box1, span(-omega * e2, r62))
    box1 = add(box1, span(-omega * omega, r31))
    box1 = add(box1, span(v_x, r41))

    rest2 = (
        -omega * (omega * e2 + vd * cos3 + wd * x0 * sin3 - v_x)
        + vdd * sin3
        + (wd - omega) * vd * cos3
        - wdd * x0 * cos3
        + (wd - omega) * wd * x0 * sin3
        + lam2 * ((x0 - e1) * omega + vd * sin3 - wd * x0 * cos3)
    )
    box2 = (rest2, rest2)
    box2 = add(box2, span(-(x0 - e1) * v_x * omega, r52))
    box2 = add(box2, span(-(x0 - e1) * omega, r62))

    h1_bar = 1.1 * max(abs(box1[0]), abs(box1[1]))
    h2_bar = 1.1 * max(abs(box2[0]), abs(box2[1]))
    return h1_bar, h2_bar


def _sat(u: float) -> float:
    return -1.0 if u < -1.0 else (1.0 if u > 1.0 else u)


def _sign(u: float) -> float:
    return -1.0 if u < 0.0 else (1.0 if u > 0.0 else 0.0)


def reaching_control(
    s1: float,
    s2: float,
    eps: tuple[float, float, float],
    gains: ControllerGains,
    envelope: UncertaintyEnvelope,
    h_bounds: tuple[float, float],
    direction: float = 1.0,
) -> tuple[float, float]:
    """Switching commands that drive the state onto both manifolds.

    Amplitudes are the net margins (k_i minus the worst-case drift bound from
    `h_bounds`), scaled by the upper-envelope plant constants; the yaw
    amplitude additionally divides by a floored offset denominator.  The speed
    channel folds in the yaw switching term through the e2 cross term before
    applying its own margin.

    The yaw term is magnitude-limited to twice the yaw saturation.  Outside
    the |eps1| < x0_reach ball the floored denominator would otherwise inflate
    the amplitude a hundredfold, and through the e2 cross term that garbage
    would set the sign of the speed channel (observed as driving away from the
    reference after a high-slip transient).

    `direction` lets the caller orient the yaw switching term along the
    closed-loop sensitivity of the second manifold to the yaw command; the
    default +1 keeps the open-loop convention.
    """
    e1, e2 = eps[0], eps[1]
    h1_bar, h2_bar = h_bounds
    up = envelope.upper()
    nom = envelope.nominal

    if gains.use_sat:
        sw1 = _sat(s1 / gains.gamma1)
        sw2 = _sat(s2 / gains.gamma2)
    else:
        sw1 = _sign(s1)
        sw2 = _sign(s2)

    denom = max(gains.x0_reach - abs(e1), DENOM_FLOOR)
    omega_rc = -(up.c2 / denom) * (-h2_bar + gains.k2) * sw2 * direction
    w_cap = REACH_YAW_CAP_RATIO * gains.omega_max
    if omega_rc > w_cap:
        omega_rc = w_cap
    elif omega_rc < -w_cap:
        omega_rc = -w_cap
    v_rc = -up.c1 * (h1_bar + e2 * omega_rc / nom.c2 - gains.k1) * sw1
    return v_rc, omega_rc


def compensate(
    v_r: float, omega_r: float, estimate, gains: ControllerGains
) -> tuple[float, float]:
    """Feedforward rescaling with the estimated slip ratio and skid speed.

    The forward command is stretched by 1/(1 - s_hat) so the post-slip ground
    speed matches the request; the yaw command gets a trim sigma_hat/x0_comp
    that counters the skid-induced yaw deficit.
    """
    if estimate.s_v > SLIP_CAP:
        raise DegenerateSlip(f"estimated slip {estimate.s_v} at or beyond {SLIP_CAP}")
    v_c = v_r / (1.0 - estimate.s_v)
    omega_c = omega_r + estimate.sigma_v / gains.x0_comp
    return v_c, omega_c


def saturate_command(
    v: float, omega: float, gains: ControllerGains
) -> tuple[float, float]:
    v = -gains.v_max if v < -gains.v_max else (gains.v_max if v > gains.v_max else v)
    omega = (
        -gains.omega_max
        if omega < -gains.omega_max
        else (gains.omega_max if omega > gains.omega_max else omega)
    )
    return v, omega


@dataclass(frozen=True, slots=True)
class ControlTick:
    """One tick of the control pipeline with all intermediate quantities."""

    e: tuple[float, float, float]
    eps: tuple[float, float, float]
    eps_dot: tuple[float, float, float]
    s1: float
    s2: float
    h1: float
    h2: float
    v_r: float
    omega_r: float
    v_c: float
    omega_c: float


def control_tick(
    desired: DesiredState,
    pose: Pose2D,
    twist: BodyTwist,
    slip_estimate,
    gains: ControllerGains,
    envelope: UncertaintyEnvelope,
) -> ControlTick:
    """Run the full pipeline once and keep the intermediates.

    `slip_estimate` of None disables the compensation stage (pure sliding-mode
    variant); otherwise it must expose `s_v` and `sigma_v`.
    """
    nom = envelope.nominal
    e = global_error(desired.pose, pose)
    eps = local_error(e, pose.theta)
    eps_dot = error_rates(eps, twist.v_x, twist.omega, desired, gains.x0_hat)
    s1, s2 = manifolds(eps, eps_dot, gains)
    h1, h2 = h_terms(eps, twist.v_x, twist.omega, desired, gains, nom, gains.x0_hat)
    slope = h2_slope(twist.v_x, twist.omega, gains, nom)
    v_eq, omega_eq = equivalent_control(h1, h2, eps, slope, gains, nom)
    h_bounds = compute_h_bounds(
        eps, twist.v_x, twist.omega, desired, gains, envelope, gains.x0_hat
    )
    # Yaw reaching must descend s2 through the closed loop, not the raw
    # kinematics: once the velocity lag settles, the sensitivity of s2_dot to
    # the yaw command tracks lambda2*(x0 - eps1) - v_d*cos(eps3).  The
    # instantaneous coefficient sign(x0_hat - eps1) instead latches on turns
    # (its zero crossing stalls and the switching term points the wrong way).
    # x0 here is the best available estimate of the physical axle offset; the
    # compensation constant is calibrated as its negative, and x0_hat stays 0
    # in the model terms, so -x0_comp is that estimate.  Near stops (v_d ~ 0)
    # the offset term dominates and the sign would otherwise flip the wrong
    # way exactly where heading authority is scarce.
    x0_est = -gains.x0_comp
    g = gains.lambda2 * (x0_est - eps[0]) - desired.v * math.cos(eps[2])
    direction = _sign(g) or 1.0
    v_rc, omega_rc = reaching_control(
        s1, s2, eps, gains, envelope, h_bounds, direction=direction
    )
    v_r = v_eq + v_rc
    omega_r = omega_eq + omega_rc
    if slip_estimate is None:
        v_c, omega_c = v_r, omega_r
    else:
        v_c, omega_c = compensate(v_r, omega_r, slip_estimate, gains)
    v_c, omega_c = saturate_command(v_c, omega_c, gains)
    return ControlTick(e, eps, eps_dot, s1, s2, h1, h2, v_r, omega_r, v_c, omega_c)


def step(
    desired: DesiredState,
    pose: Pose2D,
    twist: BodyTwist,
    slip_estimate,
    gains: ControllerGains,
    envelope: UncertaintyEnvelope,
) -> CommandPair:
    """One control tick; returns the raw and the compensated+saturated commands."""
    tick = control_tick(desired, pose, twist, slip_estimate, gains, envelope)
    return CommandPair(tick.v_r, tick.omega_r, tick.v_c, tick.omega_c)
