"""
Scenario runs.

Orchestrates kinematics, dynamics, capacity and fatigue for one scenario and
writes the trace CSV and the summary JSON.
"""
import csv
import json
import logging
from dataclasses import dataclass
from typing import IO, Any, Dict, NamedTuple, Optional, Union

import numpy as np

from .consts import (
    JOINTS,
    MUSCLE_GROUPS,
    SECONDS_PER_MINUTE,
    TRACE_COLUMNS,
    FatigueMode,
    Joint,
    MuscleGroup,
)
from .fatigue import FatigueModel, FatigueTrace
from .scenario import Scenario
from .task import build_cycle_profile
from .utils import BoundedCache

_LOGGER = logging.getLogger(__name__)

Destination = Union[str, IO[str]]


@dataclass(frozen=True)
class RunSummary:
    """Headline results of a run."""

    mode: FatigueMode
    duration: float
    dt: float
    crossings: Dict[Joint, Optional[float]]
    group_crossings: Dict[MuscleGroup, Optional[float]]
    initial_capacity: Dict[MuscleGroup, float]
    final_capacity: Dict[MuscleGroup, float]
    increments: Dict[MuscleGroup, float]
    demand_sign_fractions: Dict[MuscleGroup, float]
    capacity_clamped: bool = False

    @property
    def total_exponent(self) -> float:
        """Return the exponent all groups together gain per cycle."""
        return float(sum(self.increments.values()))

    def to_dict(self) -> Dict[str, Any]:
        """Return the JSON document of the summary."""

        def minutes(value: Optional[float]) -> Optional[float]:
            return None if value is None else value / SECONDS_PER_MINUTE

        return {
            "mode": self.mode.value,
            "duration_s": self.duration,
            "dt_s": self.dt,
            "crossing_s": {joint.value: self.crossings[joint] for joint in JOINTS},
            "crossing_min": {
                joint.value: minutes(self.crossings[joint]) for joint in JOINTS
            },
            "group_crossing_s": {
                group.value: self.group_crossings[group] for group in MUSCLE_GROUPS
            },
            "initial_gamma_cem_nm": {
                group.value: self.initial_capacity[group] for group in MUSCLE_GROUPS
            },
            "final_gamma_cem_nm": {
                group.value: self.final_capacity[group] for group in MUSCLE_GROUPS
            },
            "cycle_exponent_increment": {
                group.value: self.increments[group] for group in MUSCLE_GROUPS
            },
            "total_exponent": self.total_exponent,
            "demand_sign_opposed_fraction": {
                group.value: self.demand_sign_fractions[group]
                for group in MUSCLE_GROUPS
            },
            "capacity_clamped": self.capacity_clamped,
        }


class RunResult(NamedTuple):
    """Trace and summary of a run."""

    trace: FatigueTrace
    summary: RunSummary


def fatigue_model(
    scenario: Scenario,
    mode: Optional[FatigueMode] = None,
    cache: Optional[BoundedCache] = None,
) -> FatigueModel:
    """Return the fatigue model of a scenario's cycle."""
    operator, task, settings = scenario.operator, scenario.task, scenario.run
    profile = build_cycle_profile(
        operator,
        task,
        dt=settings.dt,
        elbow_branch=settings.elbow_branch,
        gravity=settings.gravity,
        cache=cache,
    )
    return FatigueModel(
        profile, operator.k, mode or settings.mode, settings.fixed_mvc
    )


def summarize(model: FatigueModel, duration: float) -> RunSummary:
    """Return the summary of a model run over duration seconds."""
    profile = model.profile
    groups = model.group_crossings(duration)
    crossings = model.risk_crossings(duration)
    clamped = any(
        bool(np.any(samples.capacity <= 0)) for samples in profile.samples.values()
    )
    return RunSummary(
        mode=model.mode,
        duration=duration,
        dt=profile.dt,
        crossings=crossings,
        group_crossings=groups,
        initial_capacity=model.initial_capacity,
        final_capacity=model.fatigue_at(profile.schedule.t0 + duration),
        increments=model.increments,
        demand_sign_fractions=model.demand_sign_fractions,
        capacity_clamped=clamped,
    )


def evaluate(
    scenario: Scenario,
    mode: Optional[FatigueMode] = None,
    cache: Optional[BoundedCache] = None,
) -> RunSummary:
    """Return the summary of a scenario without building the dense trace."""
    return summarize(fatigue_model(scenario, mode, cache), scenario.run.duration)


def run(
    scenario: Scenario,
    mode: Optional[FatigueMode] = None,
    cache: Optional[BoundedCache] = None,
) -> RunResult:
    """Simulate a scenario and return its trace and summary."""
    model = fatigue_model(scenario, mode, cache)
    trace = model.trace(scenario.run.duration)
    summary = summarize(model, scenario.run.duration)
    _LOGGER.info(
        "Run finished (%s, %s s): crossings %s",
        summary.mode.value,
        summary.duration,
        {joint.value: value for joint, value in summary.crossings.items()},
    )
    return RunResult(trace, summary)


def format_decimal(value: float) -> str:
    """Return the shortest round-tripping decimal text of value, no exponent."""
    text = repr(float(value))
    if "e" in text:
        return np.format_float_positional(float(value), unique=True, trim="0")
    return text


def _open(destination: Destination):
    if isinstance(destination, str):
        return open(destination, "w", encoding="utf-8", newline="")
    return None


def write_trace_csv(trace: FatigueTrace, destination: Destination) -> None:
    """Write one row per trace sample.

    Torque columns hold magnitudes; floats are written as plain decimals that
    read back to the same value, so identical traces give identical files.
    """
    handle = _open(destination)
    try:
        writer = csv.writer(handle or destination, lineterminator="\n")
        writer.writerow(TRACE_COLUMNS)
        demand = trace.demand
        groups = [trace.group_gamma_cem[group] for group in MUSCLE_GROUPS]
        for n in range(len(trace)):
            values = [
                trace.theta[n, 0],
                trace.theta[n, 1],
                demand[n, 0],
                demand[n, 1],
                trace.mvc[n, 0],
                trace.mvc[n, 1],
                trace.gamma_cem[n, 0],
                trace.gamma_cem[n, 1],
            ] + [series[n] for series in groups]
            writer.writerow(
                [format_decimal(trace.t[n]), str(trace.phase[n])]
                + [format_decimal(value) for value in values]
            )
    finally:
        if handle is not None:
            handle.close()


def write_summary_json(summary: RunSummary, destination: Destination) -> None:
    """Write the summary as JSON."""
    handle = _open(destination)
    try:
        json.dump(summary.to_dict(), handle or destination, indent=2, sort_keys=True)
        (handle or destination).write("\n")
    finally:
        if handle is not None:
            handle.close()
