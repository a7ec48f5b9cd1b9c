"""Flat-key configuration for the benchmark harness.

Config files are plain text, one `key = value` per line, with dotted
namespaces and `#` comments:

    controller.lambda1 = 1.5
    slip.kind = smooth-random
    slip.spikes = 0:2:0.7:0

Unknown keys are rejected.  Every key can also be overridden through the
environment with the prefix SKIDTRACK_ and dots spelled as double
underscores, e.g. SKIDTRACK_CONTROLLER__LAMBDA1=1.8.

The `paper` preset is simply the default key set: the published benchmark
protocol (3 straight + 3 circular + 2 bow runs, both controller variants,
smooth-random terrain with a high-slip spike at the start).
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Any

from .controller import ControllerGains
from .dynamics import DEFAULT_PARAMS, DynamicsParams, UncertaintyEnvelope
from .errors import ConfigError
from .estimator import EstimatorConfig
from .simulate import DEFAULT_X0_TRUE
from .terrain import SlipProcessConfig, SlipSpike
from .trajectories import DEFAULT_DURATIONS, TrajectorySpec

ENV_PREFIX = "SKIDTRACK_"

PRESETS = ("paper",)

# key -> (type tag, default); tags: int, float, bool, str, strlist, intlist
SCHEMA: dict[str, tuple[str, Any]] = {
    "run.seed": ("int", 12345),
    "run.dt": ("float", 1e-2),
    "run.substeps": ("int", 1),
    "run.trajectories": ("strlist", ["straight", "circular", "bow"]),
    "run.counts": ("intlist", [3, 3, 2]),
    "run.controllers": ("strlist", ["smc", "smc-ss"]),
    "run.duration.straight": ("float", DEFAULT_DURATIONS["straight"]),
    "run.duration.circular": ("float", DEFAULT_DURATIONS["circular"]),
    "run.duration.bow": ("float", DEFAULT_DURATIONS["bow"]),
    "controller.lambda1": ("float", 1.5),
    "controller.lambda2": ("float", 1.2),
    "controller.k1": ("float", 5.5),
    "controller.k2": ("float", 2.5),
    "controller.gamma1": ("float", 0.1),
    "controller.gamma2": ("float", 0.1),
    "controller.x0_hat": ("float", 0.0),
    "controller.x0_reach": ("float", 0.15),
    "controller.v_max": ("float", 0.5),
    "controller.omega_max": ("float", 0.3),
    "controller.x0_comp": ("float", 0.1),
    "controller.use_sat": ("bool", True),
    "dynamics.c1": ("float", DEFAULT_PARAMS.c1),
    "dynamics.c2": ("float", DEFAULT_PARAMS.c2),
    "dynamics.c3": ("float", DEFAULT_PARAMS.c3),
    "dynamics.c4": ("float", DEFAULT_PARAMS.c4),
    "dynamics.c5": ("float", DEFAULT_PARAMS.c5),
    "dynamics.c6": ("float", DEFAULT_PARAMS.c6),
    "dynamics.fraction": ("float", 0.25),
    "plant.x0_true": ("float", DEFAULT_X0_TRUE),
    "plant.nominal": ("bool", False),
    "slip.kind": ("str", "smooth-random"),
    "slip.mean": ("float", 0.2),
    "slip.sigma": ("float", 0.05),
    "slip.skid_sigma": ("float", 0.02),
    "slip.correlation_time": ("float", 2.0),
    "slip.spikes": ("str", "0:2:0.7:0"),
    "estimator.kind": ("str", "oracle"),
    "estimator.slip_mae": ("float", 7.06),
    "estimator.skid_mae": ("float", 12.35),
    "estimator.latency": ("float", 0.0),
    "estimator.rate": ("float", 100.0),
}


def _parse_value(key: str, raw: str) -> Any:
    tag = SCHEMA[key][0]
    raw = raw.strip()
    try:
        if tag == "int":
            return int(raw)
        if tag == "float":
            return float(raw)
        if tag == "bool":
            low = raw.lower()
            if low in ("true", "yes", "1", "on"):
                return True
            if low in ("false", "no", "0", "off"):
                return False
            raise ValueError(raw)
        if tag == "strlist":
            return [s.strip() for s in raw.split(",") if s.strip()]
        if tag == "intlist":
            return [int(s.strip()) for s in raw.split(",") if s.strip()]
        return raw
    except ValueError as exc:
        raise ConfigError(f"cannot parse {key} = {raw!r} as {tag}") from exc


def parse_config_text(text: str) -> dict[str, Any]:
    """Parse `key = value` lines; returns only the keys present."""
    out: dict[str, Any] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        if key not in SCHEMA:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        out[key] = _parse_value(key, raw)
    return out


def _env_overrides(environ) -> dict[str, Any]:
    out: dict[str, Any] = {}
    by_env_name = {
        ENV_PREFIX + key.upper().replace(".", "__"): key for key in SCHEMA
    }
    for name, raw in environ.items():
        if not name.startswith(ENV_PREFIX):
            continue
        key = by_env_name.get(name)
        if key is None:
            raise ConfigError(f"environment variable {name} matches no config key")
        out[key] = _parse_value(key, raw)
    return out


def parse_spikes(raw: str) -> tuple[SlipSpike, ...]:
    """Spikes are comma-separated start:duration:s_v:sigma_v quadruples."""
    raw = raw.strip()
    if not raw:
        return ()
    spikes = []
    for chunk in raw.split(","):
        parts = chunk.strip().split(":")
        if len(parts) != 4:
            raise ConfigError(
                f"spike {chunk!r} is not start:duration:s_v:sigma_v"
            )
        try:
            spikes.append(SlipSpike(*(float(p) for p in parts)))
        except ValueError as exc:
            raise ConfigError(f"cannot parse spike {chunk!r}") from exc
    return tuple(spikes)


@dataclass(frozen=True)
class HarnessConfig:
    """Validated configuration with typed accessors for the library objects."""

    values: dict[str, Any] = field(default_factory=dict)

    def __getitem__(self, key: str) -> Any:
        if key in self.values:
            return self.values[key]
        if key not in SCHEMA:
            raise ConfigError(f"unknown key {key!r}")
        return SCHEMA[key][1]

    def with_overrides(self, overrides: dict[str, Any]) -> "HarnessConfig":
        merged = dict(self.values)
        merged.update(overrides)
        return HarnessConfig(merged)

    def gains(self) -> ControllerGains:
        return ControllerGains(
            lambda1=self["controller.lambda1"],
            lambda2=self["controller.lambda2"],
            k1=self["controller.k1"],
            k2=self["controller.k2"],
            gamma1=self["controller.gamma1"],
            gamma2=self["controller.gamma2"],
            x0_hat=self["controller.x0_hat"],
            x0_reach=self["controller.x0_reach"],
            v_max=self["controller.v_max"],
            omega_max=self["controller.omega_max"],
            x0_comp=self["controller.x0_comp"],
            use_sat=self["controller.use_sat"],
        )

    def envelope(self) -> UncertaintyEnvelope:
        nominal = DynamicsParams(
            *(self[f"dynamics.c{i}"] for i in range(1, 7))
        )
        return UncertaintyEnvelope(nominal=nominal, fraction=self["dynamics.fraction"])

    def slip_config(self, seed: int) -> SlipProcessConfig:
        return SlipProcessConfig(
            kind=self["slip.kind"],
            mean_slip=self["slip.mean"],
            slip_sigma=self["slip.sigma"],
            skid_sigma=self["slip.skid_sigma"],
            correlation_time=self["slip.correlation_time"],
            spikes=parse_spikes(self["slip.spikes"]),
            seed=seed,
        )

    def estimator_config(self, seed: int) -> EstimatorConfig:
        return EstimatorConfig(
            kind=self["estimator.kind"],
            slip_mae_target=self["estimator.slip_mae"],
            skid_mae_target=self["estimator.skid_mae"],
            latency=self["estimator.latency"],
            rate=self["estimator.rate"],
            seed=seed,
        )

    def trajectory_plan(self) -> list[tuple[TrajectorySpec, int]]:
        kinds = self["run.trajectories"]
        counts = self["run.counts"]
        if len(kinds) != len(counts):
            raise ConfigError(
                f"run.trajectories has {len(kinds)} entries "
                f"but run.counts has {len(counts)}"
            )
        plan = []
        for kind, count in zip(kinds, counts):
            if count < 1:
                raise ConfigError(f"run count for {kind!r} must be >= 1")
            duration = self.get_duration(kind)
            plan.append((TrajectorySpec.make(kind, duration), count))
        return plan

    def get_duration(self, kind: str) -> float:
        key = f"run.duration.{kind}"
        if key not in SCHEMA:
            raise ConfigError(f"unknown trajectory kind {kind!r}")
        return self[key]

    def controllers(self) -> list[str]:
        names = self["run.controllers"]
        for name in names:
            if name not in ("smc", "smc-ss"):
                raise ConfigError(f"unknown controller {name!r}")
        if not names:
            raise ConfigError("run.controllers must not be empty")
        return names


def derive_seeds(base: int, traj_index: int, run_index: int) -> tuple[int, int, int]:
    """Per-run (slip, plant, estimator) seeds; identical across controller
    variants so comparisons are paired."""
    slot = base + 1000 * traj_index + 10 * run_index
    return slot + 1, slot + 2, slot + 3


def load_config(
    path: str | None = None,
    preset: str | None = None,
    environ=None,
    cli_overrides: dict[str, Any] | None = None,
) -> HarnessConfig:
    """Assemble a config from preset defaults, file, environment, and CLI.

    Later sources win: defaults < file < environment < CLI flags.
    """
    if preset is not None and preset not in PRESETS:
        raise ConfigError(f"unknown preset {preset!r} (available: {PRESETS})")
    values: dict[str, Any] = {}
    if path is not None:
        try:
            with open(path, "r") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path!r}: {exc}") from exc
        values.update(parse_config_text(text))
    values.update(_env_overrides(environ if environ is not None else os.environ))
    if cli_overrides:
        for key in cli_overrides:
            if key not in SCHEMA:
                raise ConfigError(f"unknown key {key!r}")
        values.update(cli_overrides)
    return HarnessConfig(values)
