"""Closed-loop experiment runner.

One experiment advances an 8-state system on a fixed control grid:

  reference pose (3)   ideal robot following the velocity profile
  actual pose (3)      unicycle kinematics driven by the slip-modified twist
  plant twist (2)      first-order velocity channels driven by the commands

Per tick: sample ground-truth slip, form the estimate, run one controller
tick on the realized twist, then integrate the coupled smooth dynamics over
the tick with commands and slip held (classic fourth-order steps, optionally
subdivided).  Slip modifies the kinematics as

  xi  = v * (1 - s_v)              ground forward speed
  rho = omega + sigma_v / x0_true  realized yaw rate

so the compensation trim sigma_hat/x0_comp cancels the skid-induced yaw
disturbance when the estimate is right and x0_comp = -x0_true.

Everything is deterministic given the config seeds; repeated runs produce
byte-identical CSVs.
"""

from __future__ import annotations

import math
import os
import tempfile
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .controller import (
    ControllerGains,
    DesiredState,
    control_tick,
    validate_gains,
)
from .dynamics import DynamicsParams, UncertaintyEnvelope, sample_params
from .errors import DegenerateICR, InfeasibleGains, NumericalFailure
from .estimator import Estimator, EstimatorConfig
from .geometry import X0_FLOOR, BodyTwist, Pose2D, wrap_angle
from .terrain import SlipProcess, SlipProcessConfig
from .trajectories import TrajectorySpec, _profile_unchecked, profile

COLUMNS = (
    "t",
    "x_d",
    "y_d",
    "theta_d",
    "x",
    "y",
    "theta",
    "e_x",
    "e_y",
    "e_theta",
    "eps1",
    "eps2",
    "eps3",
    "s1",
    "s2",
    "v_r",
    "omega_r",
    "v_c",
    "omega_c",
    "s_v_true",
    "sigma_v_true",
    "s_v_hat",
    "sigma_v_hat",
    "dis",
)

AUX_COLUMNS = ("xi", "rho", "h1", "h2")

DEFAULT_DT = 1e-2
# Rotation-center longitudinal offset of the simulated plant (m).  Negative
# puts the ICR behind the axle midpoint, which damps the lateral coupling in
# the pose kinematics; a positive offset feeds yaw back into lateral drift
# with the destabilizing sign.  The controller-side compensation constant
# x0_comp is calibrated as -x0_true so the skid trim cancels at the plant.
DEFAULT_X0_TRUE = -0.10
INITIAL_ERROR = (0.3, 0.1, 0.0)  # (e_x, e_y, e_theta) at t = 0


@dataclass(slots=True)
class ExperimentRecord:
    meta: dict[str, Any]
    columns: dict[str, np.ndarray]
    aux: dict[str, np.ndarray] = field(default_factory=dict)

    def __getitem__(self, name: str) -> np.ndarray:
        if name in self.columns:
            return self.columns[name]
        return self.aux[name]

    @property
    def n_rows(self) -> int:
        return len(self.columns["t"])


def advance_tick(
    state: tuple[float, ...],
    kind: str,
    v_c: float,
    omega_c: float,
    s_v: float,
    skid_rate: float,
    params: DynamicsParams,
    x0_true: float,
    t: float,
    dt: float,
    substeps: int = 1,
) -> tuple[float, ...]:
    """Integrate the coupled reference + plant dynamics over one control tick.

    `state` is the 8-tuple (x_d, y_d, theta_d, x, y, theta, v, omega).
    Commands and slip are held constant over the tick (zero-order hold);
    `substeps` subdivides the classic fourth-order step.
    """
    c1, c2, c3, c4, c5, c6 = params.as_tuple()
    h = dt / substeps

    def rhs(tau, s8):
        xd_, yd_, thd_, x_, y_, th_, v_, w_ = s8
        vd_, _, wd_, _ = _profile_unchecked(kind, tau)
        xi_ = v_ * (1.0 - s_v)
        rho_ = w_ + skid_rate
        # actual robot carries the ICR lateral term v_y = -x0*rho; the
        # ideal robot integrates with x0 = 0 (matching the controller model)
        return (
            vd_ * math.cos(thd_),
            vd_ * math.sin(thd_),
            wd_,
            xi_ * math.cos(th_) + x0_true * rho_ * math.sin(th_),
            xi_ * math.sin(th_) - x0_true * rho_ * math.cos(th_),
            rho_,
            (c3 / c1) * w_ * w_ - (c4 / c1) * v_ + v_c / c1,
            -(c5 / c2) * v_ * w_ - (c6 / c2) * w_ + omega_c / c2,
        )

    s8 = state
    for j in range(substeps):
        tau = t + j * h
        k1 = rhs(tau, s8)
        k2 = rhs(tau + h / 2, tuple(u + h / 2 * du for u, du in zip(s8, k1)))
        k3 = rhs(tau + h / 2, tuple(u + h / 2 * du for u, du in zip(s8, k2)))
        k4 = rhs(tau + h, tuple(u + h * du for u, du in zip(s8, k3)))
        s8 = tuple(
            u + h / 6 * (a + 2 * b + 2 * c + d)
            for u, a, b, c, d in zip(s8, k1, k2, k3, k4)
        )
    return s8


def run_experiment(
    traj: TrajectorySpec,
    slip_config: SlipProcessConfig,
    gains: ControllerGains,
    estimator_config: EstimatorConfig,
    envelope: UncertaintyEnvelope,
    dt: float = DEFAULT_DT,
    plant_seed: int | None = None,
    *,
    compensate: bool = True,
    x0_true: float = DEFAULT_X0_TRUE,
    substeps: int = 1,
    initial_error: tuple[float, float, float] = INITIAL_ERROR,
) -> ExperimentRecord:
    """Simulate one tracking run and return the full per-tick record.

    plant_seed of None runs the nominal plant; otherwise the plant constants
    are drawn from the envelope with that seed.  `compensate` selects the
    slip-compensated controller variant.  `substeps` subdivides each control
    tick for the integrator without changing the control or slip grid.
    """
    findings = validate_gains(gains)
    if findings:
        raise InfeasibleGains("; ".join(findings))
    if substeps < 1:
        raise ValueError("substeps must be >= 1")

    n = int(round(traj.duration / dt))
    if n < 1:
        raise ValueError("duration shorter than one tick")

    plant = envelope.nominal if plant_seed is None else sample_params(envelope, plant_seed)
    slip = SlipProcess(slip_config, traj.duration, dt)
    estimator = Estimator(estimator_config)

    cols = {name: np.empty(n + 1) for name in COLUMNS}
    aux = {name: np.empty(n + 1) for name in AUX_COLUMNS}

    # reference starts at the origin; the robot starts offset by the error
    xd = yd = thd = 0.0
    x = xd - initial_error[0]
    y = yd - initial_error[1]
    th = thd - initial_error[2]
    v = w = 0.0

    kind = traj.kind

    for k in range(n + 1):
        t = k * dt
        state = (xd, yd, thd, x, y, th, v, w)
        if not all(math.isfinite(u) for u in state):
            raise NumericalFailure(
                f"non-finite state at tick {k} (t = {t:.4f}): {state}"
            )

        truth = slip.at_tick(k)
        estimate = estimator.estimate(truth, t)
        s_v, sigma_v = truth.s_v, truth.sigma_v

        if sigma_v != 0.0 and abs(x0_true) < X0_FLOOR:
            raise DegenerateICR(
                f"skid {sigma_v} with |x0_true| = {abs(x0_true)} below {X0_FLOOR}"
            )
        skid_rate = sigma_v / x0_true if sigma_v != 0.0 else 0.0

        xi = v * (1.0 - s_v)
        rho = w + skid_rate

        vd, vdd, wd, wdd = profile(traj, t)
        desired = DesiredState(Pose2D(xd, yd, thd), vd, vdd, wd, wdd)
        tick = control_tick(
            desired,
            Pose2D(x, y, th),
            BodyTwist(xi, 0.0, rho),
            estimate if compensate else None,
            gains,
            envelope,
        )

        cols["t"][k] = t
        cols["x_d"][k] = xd
        cols["y_d"][k] = yd
        cols["theta_d"][k] = wrap_angle(thd)
        cols["x"][k] = x
        cols["y"][k] = y
        cols["theta"][k] = wrap_angle(th)
        cols["e_x"][k] = tick.e[0]
        cols["e_y"][k] = tick.e[1]
        cols["e_theta"][k] = tick.e[2]
        cols["eps1"][k] = tick.eps[0]
        cols["eps2"][k] = tick.eps[1]
        cols["eps3"][k] = tick.eps[2]
        cols["s1"][k] = tick.s1
        cols["s2"][k] = tick.s2
        cols["v_r"][k] = tick.v_r
        cols["omega_r"][k] = tick.omega_r
        cols["v_c"][k] = tick.v_c
        cols["omega_c"][k] = tick.omega_c
        cols["s_v_true"][k] = s_v
        cols["sigma_v_true"][k] = sigma_v
        cols["s_v_hat"][k] = estimate.s_v
        cols["sigma_v_hat"][k] = estimate.sigma_v
        cols["dis"][k] = math.hypot(tick.e[0], tick.e[1])
        aux["xi"][k] = xi
        aux["rho"][k] = rho
        aux["h1"][k] = tick.h1
        aux["h2"][k] = tick.h2

        if k == n:
            break

        xd, yd, thd, x, y, th, v, w = advance_tick(
            state, kind, tick.v_c, tick.omega_c, s_v, skid_rate,
            plant, x0_true, t, dt, substeps,
        )

    meta = {
        "trajectory": traj.kind,
        "duration": traj.duration,
        "dt": dt,
        "substeps": substeps,
        "controller": "smc-ss" if compensate else "smc",
        "compensate": compensate,
        "plant_seed": plant_seed,
        "plant_params": list(plant.as_tuple()),
        "x0_true": x0_true,
        "slip_kind": slip_config.kind,
        "slip_seed": slip_config.seed,
        "estimator_kind": estimator_config.kind,
        "estimator_seed": estimator_config.seed,
        "initial_error": list(initial_error),
    }
    return ExperimentRecord(meta=meta, columns=cols, aux=aux)


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_record_csv(record: ExperimentRecord, path: str) -> None:
    """Write the canonical column set; 9 significant digits, atomic replace."""
    lines = [",".join(COLUMNS)]
    arrays = [record.columns[name] for name in COLUMNS]
    for i in range(record.n_rows):
        lines.append(",".join("%.9g" % a[i] for a in arrays))
    _atomic_write(path, "\n".join(lines) + "\n")


def read_record_csv(path: str) -> dict[str, np.ndarray]:
    with open(path, "r") as fh:
        header = fh.readline().strip().split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    if tuple(header) != COLUMNS:
        raise ValueError(f"unexpected column set in {path}")
    return {name: data[:, i] for i, name in enumerate(COLUMNS)}
