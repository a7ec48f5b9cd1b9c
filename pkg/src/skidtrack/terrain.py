"""Synthetic ground-truth slip and skid over a run.

Three generator kinds:

  constant       fixed (mean_slip, 0) everywhere
  piecewise      constant baseline with rectangular spike overrides
  smooth-random  mean-reverting colored noise per channel, with optional
                 spike overrides on top

The smooth-random channels use the exact discretization of a mean-reverting
process on the control grid, so the stationary standard deviation equals the
configured sigma at any dt.  The whole sequence is materialized up front from
the seed, which makes the values independent of how callers batch queries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import OutOfRange
from .geometry import SLIP_CAP, SlipState

KINDS = ("constant", "piecewise", "smooth-random")


@dataclass(frozen=True, slots=True)
class SlipSpike:
    """Rectangular override active on [t_start, t_start + duration)."""

    t_start: float
    duration: float
    s_v: float
    sigma_v: float

    def __post_init__(self) -> None:
        if self.duration <= 0.0:
            raise ValueError("spike duration must be positive")


@dataclass(frozen=True, slots=True)
class SlipProcessConfig:
    kind: str = "constant"
    mean_slip: float = 0.0
    slip_sigma: float = 0.05
    skid_sigma: float = 0.02  # m/s
    correlation_time: float = 2.0  # s
    spikes: tuple[SlipSpike, ...] = field(default_factory=tuple)
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown slip process kind {self.kind!r}")
        if self.correlation_time <= 0.0:
            raise ValueError("correlation_time must be positive")
        if self.slip_sigma < 0.0 or self.skid_sigma < 0.0:
            raise ValueError("sigmas must be non-negative")


def _clamp_slip(s: float) -> float:
    return -SLIP_CAP if s < -SLIP_CAP else (SLIP_CAP if s > SLIP_CAP else s)


class SlipProcess:
    """Ground-truth slip sampled on the fixed control grid of one run."""

    def __init__(self, config: SlipProcessConfig, duration: float, dt: float):
        if duration <= 0.0 or dt <= 0.0:
            raise ValueError("duration and dt must be positive")
        self.config = config
        self.duration = duration
        self.dt = dt
        self.n_ticks = int(round(duration / dt)) + 1
        self._s, self._sigma = self._generate()

    def _generate(self) -> tuple[np.ndarray, np.ndarray]:
        cfg = self.config
        n = self.n_ticks
        if cfg.kind in ("constant", "piecewise"):
            s = np.full(n, _clamp_slip(cfg.mean_slip))
            sig = np.zeros(n)
        else:
            rng = np.random.default_rng(cfg.seed)
            phi = math.exp(-self.dt / cfg.correlation_time)
            innov = math.sqrt(1.0 - phi * phi)
            z = rng.standard_normal((n, 2))
            s = np.empty(n)
            sig = np.empty(n)
            # start at a stationary draw so the marginals hold from tick 0
            s_state = cfg.mean_slip + cfg.slip_sigma * z[0, 0]
            sig_state = cfg.skid_sigma * z[0, 1]
            s[0], sig[0] = s_state, sig_state
            for k in range(1, n):
                s_state = cfg.mean_slip + phi * (s_state - cfg.mean_slip) \
                    + cfg.slip_sigma * innov * z[k, 0]
                sig_state = phi * sig_state + cfg.skid_sigma * innov * z[k, 1]
                s[k], sig[k] = s_state, sig_state
            np.clip(s, -SLIP_CAP, SLIP_CAP, out=s)

        if cfg.kind in ("piecewise", "smooth-random"):
            t = np.arange(n) * self.dt
            # first matching spike wins
            taken = np.zeros(n, dtype=bool)
            for spike in cfg.spikes:
                mask = (t >= spike.t_start) & (t < spike.t_start + spike.duration)
                mask &= ~taken
                s[mask] = _clamp_slip(spike.s_v)
                sig[mask] = spike.sigma_v
                taken |= mask
        return s, sig

    def tick_index(self, t: float) -> int:
        if t < -1e-9 or t > self.duration + 1e-9:
            raise OutOfRange(f"t = {t} outside [0, {self.duration}]")
        k = int(round(t / self.dt))
        return min(max(k, 0), self.n_ticks - 1)

    def at_tick(self, k: int) -> SlipState:
        return SlipState(float(self._s[k]), float(self._sigma[k]))

    def at(self, t: float) -> SlipState:
        return self.at_tick(self.tick_index(t))

    @property
    def slip_values(self) -> np.ndarray:
        return self._s.copy()

    @property
    def skid_values(self) -> np.ndarray:
        return self._sigma.copy()


def zero_process(duration: float, dt: float) -> SlipProcess:
    return SlipProcess(SlipProcessConfig(kind="constant", mean_slip=0.0), duration, dt)
