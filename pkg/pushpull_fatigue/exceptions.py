"""Exceptions for this library."""
from typing import Optional


class FatigueSimulatorException(Exception):
    """Fatigue Simulator Exception."""


class UnreachableTarget(FatigueSimulatorException):
    """Hand target outside the reachable annulus."""


class SingularTrajectory(FatigueSimulatorException):
    """Trajectory passes through a singular arm posture."""


class TimeOutOfRange(FatigueSimulatorException):
    """Time outside the interval of a trajectory leg."""


class NegativeTime(FatigueSimulatorException):
    """Time before the start of work."""


class GridMismatch(FatigueSimulatorException):
    """Time step does not divide a duration."""


class OutOfRangeAnthropometry(FatigueSimulatorException):
    """Stature or body mass outside the supported range."""


class ZeroCapacity(FatigueSimulatorException):
    """Joint capacity is not positive on an active sample."""


class ScenarioException(FatigueSimulatorException):
    """Scenario or grid file problem, with the offending field path."""

    def __init__(self, message: str, path: Optional[str] = None) -> None:
        """Initialise exception."""
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class ScenarioParseError(ScenarioException):
    """Malformed scenario text."""


class ScenarioSchemaError(ScenarioException):
    """Missing, unknown or wrongly typed scenario keys."""


class ScenarioValidationError(ScenarioException):
    """Scenario values violate an invariant."""
