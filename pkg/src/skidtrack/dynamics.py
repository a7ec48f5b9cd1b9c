"""Velocity-level plant model.

The low-level drive electronics are abstracted into two coupled first-order
channels driven by commanded velocities:

    v_dot     = (c3/c1) omega^2 - (c4/c1) v     + (1/c1) v_cmd
    omega_dot = -(c5/c2) v omega - (c6/c2) omega + (1/c2) omega_cmd

c1..c6 are identified constants of the platform.  A symmetric multiplicative
envelope around the nominal set models parameter uncertainty; robustness runs
draw one plant per experiment from it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, slots=True)
class DynamicsParams:
    c1: float
    c2: float
    c3: float
    c4: float
    c5: float
    c6: float

    def __post_init__(self) -> None:
        if self.c1 <= 0.0 or self.c2 <= 0.0:
            raise ValueError("inertia-like constants c1, c2 must be positive")

    def as_tuple(self) -> tuple[float, float, float, float, float, float]:
        return (self.c1, self.c2, self.c3, self.c4, self.c5, self.c6)


# Nominal constants for the simulated platform.  Not identified from any real
# robot: chosen so the open loop is stable, settles in a few seconds, and the
# command bounds leave authority margin.  The speed channel has steady-state
# gain 1/c4 ~ 1.43 so a 0.5 m/s command can hold 0.3 m/s through heavy wheel
# slip and still climb out of position deficits; the worst +25% draw keeps the
# top speed at 0.5/(0.7*0.75) ~ 0.95 m/s, inside the 2*v_max energy bound.
# The yaw channel is unity-gain (c6 = 1) so the skid trim calibrates exactly.
# Configuration-overridable.
DEFAULT_PARAMS = DynamicsParams(c1=0.8, c2=0.5, c3=0.05, c4=0.7, c5=0.1, c6=1.0)


def twist_derivative(
    v: float, omega: float, v_cmd: float, omega_cmd: float, p: DynamicsParams
) -> tuple[float, float]:
    """Time derivative of (v, omega) under held commands."""
    v_dot = (p.c3 / p.c1) * omega * omega - (p.c4 / p.c1) * v + v_cmd / p.c1
    omega_dot = -(p.c5 / p.c2) * v * omega - (p.c6 / p.c2) * omega + omega_cmd / p.c2
    return v_dot, omega_dot


@dataclass(frozen=True, slots=True)
class UncertaintyEnvelope:
    """Symmetric multiplicative band [1-fraction, 1+fraction] around nominal."""

    nominal: DynamicsParams = DEFAULT_PARAMS
    fraction: float = 0.25

    def __post_init__(self) -> None:
        if not 0.0 <= self.fraction < 1.0:
            raise ValueError("fraction must lie in [0, 1)")

    def lower(self) -> DynamicsParams:
        f = 1.0 - self.fraction
        return DynamicsParams(*(c * f for c in self.nominal.as_tuple()))

    def upper(self) -> DynamicsParams:
        f = 1.0 + self.fraction
        return DynamicsParams(*(c * f for c in self.nominal.as_tuple()))

    def sample(self, seed: int) -> DynamicsParams:
        """Draw one plant uniformly from the envelope, deterministically.

        Each constant is drawn independently, in the fixed order c1..c6, so a
        given seed always yields the same plant.
        """
        rng = np.random.default_rng(seed)
        lo, hi = self.lower().as_tuple(), self.upper().as_tuple()
        return DynamicsParams(*(float(rng.uniform(a, b)) for a, b in zip(lo, hi)))


def sample_params(envelope: UncertaintyEnvelope, seed: int) -> DynamicsParams:
    return envelope.sample(seed)
