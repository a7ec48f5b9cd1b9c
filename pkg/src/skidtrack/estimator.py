"""Slip/skid estimators feeding the compensation stage.

Three kinds:

  oracle         returns the ground truth unchanged
  noisy          truth plus zero-mean Laplace noise per channel
  delayed-noisy  noisy estimate of the truth `latency` seconds ago, updated at
                 a fixed rate and held between updates

Laplace noise is calibrated by its mean absolute deviation, which for a
Laplace(0, b) variable equals b, so the configured MAE targets are the noise
scales directly (slip in percentage points, skid in mm/s).

Noise draws are keyed by (seed, update index), so a trace is reproducible
regardless of call batching, and two estimators with the same seed agree
sample for sample.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import EmptyTrace
from .geometry import SLIP_CAP, SlipState

KINDS = ("oracle", "noisy", "delayed-noisy")

# published benchmark accuracy of the reference estimation stack
DEFAULT_SLIP_MAE_PCT = 7.06  # percentage points of slip ratio
DEFAULT_SKID_MAE_MM_S = 12.35  # mm/s

DIRECTION_DEADBAND = 1e-3


@dataclass(frozen=True, slots=True)
class EstimatorConfig:
    kind: str = "oracle"
    slip_mae_target: float = DEFAULT_SLIP_MAE_PCT
    skid_mae_target: float = DEFAULT_SKID_MAE_MM_S
    latency: float = 0.0  # s
    rate: float = 100.0  # Hz
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown estimator kind {self.kind!r}")
        if self.latency < 0.0:
            raise ValueError("latency must be non-negative")
        if self.rate <= 0.0:
            raise ValueError("rate must be positive")


def _clamp(s: float) -> float:
    return -SLIP_CAP if s < -SLIP_CAP else (SLIP_CAP if s > SLIP_CAP else s)


class Estimator:
    """Stateful estimator instance owning its noise stream and delay buffer."""

    def __init__(self, config: EstimatorConfig):
        self.config = config
        self._slip_scale = config.slip_mae_target / 100.0  # ratio units
        self._skid_scale = config.skid_mae_target / 1000.0  # m/s
        self._history: deque[tuple[float, SlipState]] = deque()
        self._held: SlipState | None = None
        self._next_update = 0.0
        self._update_index = 0
        self._last_t = -np.inf

    def _noise(self, index: int) -> tuple[float, float]:
        rng = np.random.default_rng([self.config.seed, index])
        return (
            float(rng.laplace(0.0, self._slip_scale)),
            float(rng.laplace(0.0, self._skid_scale)),
        )

    def _noisy(self, truth: SlipState, index: int) -> SlipState:
        ds, dsig = self._noise(index)
        return SlipState(_clamp(truth.s_v + ds), truth.sigma_v + dsig)

    def _delayed_truth(self, t: float) -> SlipState:
        """Most recent buffered truth no newer than t - latency."""
        target = t - self.config.latency
        best = self._history[0][1]
        for ts, state in self._history:
            if ts <= target + 1e-12:
                best = state
            else:
                break
        return best

    def estimate(self, truth: SlipState, t: float) -> SlipState:
        """Estimate at time t given the current ground truth.

        Must be called with non-decreasing t within a run.
        """
        cfg = self.config
        if cfg.kind == "oracle":
            return truth
        if cfg.kind == "noisy":
            out = self._noisy(truth, self._update_index)
            self._update_index += 1
            return out
        # delayed-noisy: buffer truth, update the held sample at the fixed rate
        if t < self._last_t - 1e-12:
            raise ValueError(f"time went backwards: {t} after {self._last_t}")
        self._last_t = t
        self._history.append((t, truth))
        horizon = t - cfg.latency - 1.0
        while len(self._history) > 1 and self._history[1][0] < horizon:
            self._history.popleft()
        if self._held is None or t >= self._next_update - 1e-12:
            self._held = self._noisy(self._delayed_truth(t), self._update_index)
            self._update_index += 1
            self._next_update = t + 1.0 / cfg.rate
        return self._held


@dataclass(frozen=True, slots=True)
class EstimatorReport:
    slip_mae: float  # percentage points
    slip_smape: float  # percent
    slip_direction_acc: float  # percent
    skid_mae: float  # mm/s
    skid_smape: float  # percent
    skid_direction_acc: float  # percent


def _channel_stats(
    truth: np.ndarray, est: np.ndarray, unit_scale: float
) -> tuple[float, float, float]:
    mae = float(np.mean(np.abs(est - truth))) * unit_scale

    denom = np.abs(truth) + np.abs(est)
    keep = denom > 0.0
    if keep.any():
        smape = float(
            np.mean(2.0 * np.abs(est[keep] - truth[keep]) / denom[keep]) * 100.0
        )
    else:
        smape = 0.0

    active = np.abs(truth) > DIRECTION_DEADBAND
    if active.any():
        agree = np.sign(truth[active]) == np.sign(est[active])
        direction = float(np.mean(agree) * 100.0)
    else:
        direction = 100.0
    return mae, smape, direction


def estimator_report(
    truth: list[SlipState] | tuple[SlipState, ...],
    estimates: list[SlipState] | tuple[SlipState, ...],
) -> EstimatorReport:
    """Accuracy summary of an estimate trace against ground truth.

    Symmetric percentage error skips samples whose truth and estimate are both
    zero; directional accuracy only counts samples with truth magnitude above
    a small dead-band.
    """
    if len(truth) == 0 or len(estimates) == 0:
        raise EmptyTrace("cannot summarize an empty estimator trace")
    if len(truth) != len(estimates):
        raise EmptyTrace("truth and estimate traces differ in length")
    ts = np.array([s.s_v for s in truth])
    es = np.array([s.s_v for s in estimates])
    tg = np.array([s.sigma_v for s in truth])
    eg = np.array([s.sigma_v for s in estimates])
    slip_mae, slip_smape, slip_dir = _channel_stats(ts, es, 100.0)
    skid_mae, skid_smape, skid_dir = _channel_stats(tg, eg, 1000.0)
    return EstimatorReport(slip_mae, slip_smape, slip_dir, skid_mae, skid_smape, skid_dir)
