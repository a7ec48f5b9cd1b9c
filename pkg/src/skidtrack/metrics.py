"""Tracking-quality metrics over experiment records.

Position error is summarized through the planar distance error; heading error
is summarized in degrees with the mean taken over magnitudes so that symmetric
oscillations do not cancel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptyRecord

RAD_TO_DEG = 180.0 / math.pi


def dis(e_x: float, e_y: float) -> float:
    """Planar distance error sqrt(e_x^2 + e_y^2)."""
    return math.hypot(e_x, e_y)


def rmse(values) -> float:
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise EmptyRecord("rmse of an empty sequence")
    return float(np.sqrt(np.mean(arr * arr)))


def total_variation(values) -> float:
    """Sum of absolute successive differences; a chattering measure for commands."""
    arr = np.asarray(values, dtype=float)
    if arr.size < 2:
        return 0.0
    return float(np.sum(np.abs(np.diff(arr))))


@dataclass(frozen=True, slots=True)
class MetricsSummary:
    mean_dis_cm: float
    rms_dis_cm: float
    mean_abs_heading_deg: float
    rms_heading_deg: float

    def as_dict(self) -> dict[str, float]:
        return {
            "mean_dis_cm": self.mean_dis_cm,
            "rms_dis_cm": self.rms_dis_cm,
            "mean_abs_heading_deg": self.mean_abs_heading_deg,
            "rms_heading_deg": self.rms_heading_deg,
        }


def summarize(e_x, e_y, e_theta) -> MetricsSummary:
    """Summary statistics of an error trace (inputs in m and rad)."""
    ex = np.asarray(e_x, dtype=float)
    ey = np.asarray(e_y, dtype=float)
    eth = np.asarray(e_theta, dtype=float)
    if ex.size == 0:
        raise EmptyRecord("summary of an empty error sequence")
    if not (ex.size == ey.size == eth.size):
        raise EmptyRecord("error sequences differ in length")
    d = np.hypot(ex, ey)
    return MetricsSummary(
        mean_dis_cm=float(np.mean(d)) * 100.0,
        rms_dis_cm=rmse(d) * 100.0,
        mean_abs_heading_deg=float(np.mean(np.abs(eth))) * RAD_TO_DEG,
        rms_heading_deg=rmse(eth) * RAD_TO_DEG,
    )


def summarize_record(record) -> MetricsSummary:
    return summarize(record["e_x"], record["e_y"], record["e_theta"])
