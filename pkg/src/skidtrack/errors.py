"""Exception types shared across the library.

Every failure mode that callers are expected to handle gets its own class so
that tests and the CLI can react to the *kind* of problem rather than parsing
messages.
"""

from __future__ import annotations


class SkidtrackError(Exception):
    """Base class for all library-specific errors."""


class DegenerateICR(SkidtrackError):
    """Skid/yaw coupling requested with a rotation-center offset too close to zero."""


class DegenerateSlip(SkidtrackError):
    """A slip ratio at or beyond the physical cap makes the conversion singular."""


class UndefinedSlip(SkidtrackError):
    """Longitudinal slip is undefined because the ideal forward speed is ~zero."""


class UndefinedAngle(SkidtrackError):
    """Velocity heading deviation is undefined for a zero-magnitude velocity."""


class ICRAtInfinity(SkidtrackError):
    """Instantaneous center of rotation does not exist for (near-)zero yaw rate."""


class OutOfRange(SkidtrackError):
    """A time query fell outside the span covered by a trajectory or process."""


class EmptyTrace(SkidtrackError):
    """An estimator trace with no samples was handed to the report builder."""


class EmptyRecord(SkidtrackError):
    """A metric was requested over an empty error sequence."""


class MismatchedRuns(SkidtrackError):
    """Two experiment lists cannot be compared pairwise (length or pairing differs)."""


class InfeasibleGains(SkidtrackError):
    """Controller gains violate a stability prerequisite; refusing to run."""


class NumericalFailure(SkidtrackError):
    """Simulation state went non-finite; carries the tick and offending values."""


class ConfigError(SkidtrackError):
    """Malformed configuration text, unknown key, or unparsable value."""
