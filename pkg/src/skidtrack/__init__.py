"""Deterministic simulator and benchmark harness for slip-compensated
sliding-mode trajectory tracking on skid-steering robots."""

from __future__ import annotations

from .controller import (
    ControllerGains,
    ControlTick,
    DesiredState,
    control_tick,
    gamma1_bound,
    validate_gains,
)
from .dynamics import DEFAULT_PARAMS, DynamicsParams, UncertaintyEnvelope
from .errors import (
    ConfigError,
    DegenerateICR,
    DegenerateSlip,
    EmptyRecord,
    EmptyTrace,
    ICRAtInfinity,
    InfeasibleGains,
    MismatchedRuns,
    NumericalFailure,
    OutOfRange,
    SkidtrackError,
    UndefinedAngle,
    UndefinedSlip,
)
from .estimator import Estimator, EstimatorConfig, EstimatorReport, estimator_report
from .geometry import (
    BodyTwist,
    Pose2D,
    RobotGeometry,
    SlipState,
    WheelSpeeds,
    ZERO_SLIP,
    wrap_angle,
)
from .metrics import MetricsSummary, summarize, summarize_record
from .simulate import ExperimentRecord, read_record_csv, run_experiment, write_record_csv
from .stats import (
    ComparisonResult,
    FarResult,
    compare,
    far_permutation_p,
    far_test,
    finner_posthoc,
    improvement,
)
from .terrain import SlipProcess, SlipProcessConfig, SlipSpike, zero_process
from .trajectories import TrajectorySpec, desired_state, integrate_reference

__version__ = "0.1.0"

__all__ = [
    "BodyTwist",
    "ComparisonResult",
    "ConfigError",
    "ControlTick",
    "ControllerGains",
    "DEFAULT_PARAMS",
    "DegenerateICR",
    "DegenerateSlip",
    "DesiredState",
    "DynamicsParams",
    "EmptyRecord",
    "EmptyTrace",
    "Estimator",
    "EstimatorConfig",
    "EstimatorReport",
    "ExperimentRecord",
    "FarResult",
    "ICRAtInfinity",
    "InfeasibleGains",
    "MetricsSummary",
    "MismatchedRuns",
    "NumericalFailure",
    "OutOfRange",
    "Pose2D",
    "RobotGeometry",
    "SkidtrackError",
    "SlipProcess",
    "SlipProcessConfig",
    "SlipSpike",
    "SlipState",
    "TrajectorySpec",
    "UncertaintyEnvelope",
    "UndefinedAngle",
    "UndefinedSlip",
    "WheelSpeeds",
    "ZERO_SLIP",
    "compare",
    "control_tick",
    "desired_state",
    "estimator_report",
    "far_permutation_p",
    "far_test",
    "finner_posthoc",
    "gamma1_bound",
    "improvement",
    "integrate_reference",
    "read_record_csv",
    "run_experiment",
    "summarize",
    "summarize_record",
    "validate_gains",
    "wrap_angle",
    "write_record_csv",
    "zero_process",
    "__version__",
]
