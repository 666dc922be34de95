"""
Task sweeps.

Evaluates a base scenario over a grid of endpoints, forces and phase
durations, concurrently in a thread pool, and ranks the cells by an objective.
"""
import asyncio
import csv
import itertools
import json
import logging
import math
from concurrent.futures import Executor, ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import async_timeout

from .consts import (
    ATTR_OBJECTIVE,
    ATTR_OBJECTIVE_JOINT,
    ATTR_P0,
    ATTR_PAIR_ENDPOINTS,
    ATTR_PF,
    ATTR_PHASE_DURATIONS,
    ATTR_PULL_FORCE,
    ATTR_PUSH_FORCE,
    JOINTS,
    STATUS_ERROR,
    STATUS_OK,
    SWEEP_COLUMNS,
    Joint,
    SweepObjective,
)
from .exceptions import (
    FatigueSimulatorException,
    ScenarioParseError,
    ScenarioSchemaError,
    ScenarioValidationError,
)
from .kinematics import Point
from .runner import Destination, RunSummary, _open, evaluate, format_decimal
from .scenario import (
    Scenario,
    _check,
    _choice,
    _number,
    _object,
    _point,
    validate_scenario,
)
from .statistics import SweepStatistics

_LOGGER = logging.getLogger(__name__)

GRID_KEYS = (
    ATTR_P0,
    ATTR_PF,
    ATTR_PUSH_FORCE,
    ATTR_PULL_FORCE,
    ATTR_PHASE_DURATIONS,
    ATTR_OBJECTIVE,
    ATTR_OBJECTIVE_JOINT,
    ATTR_PAIR_ENDPOINTS,
)


@dataclass(frozen=True)
class SweepGrid:
    """Candidate values per task field; empty lists keep the base value."""

    p0: Tuple[Point, ...] = ()
    pf: Tuple[Point, ...] = ()
    push_forces: Tuple[float, ...] = ()
    pull_forces: Tuple[float, ...] = ()
    phase_durations: Tuple[Tuple[float, float], ...] = ()
    objective: SweepObjective = SweepObjective.MAX_TIME_TO_RISK
    objective_joint: Optional[Joint] = None
    pair_endpoints: bool = False

    def __post_init__(self) -> None:
        """Check paired endpoint lists."""
        if self.pair_endpoints and len(self.p0) != len(self.pf):
            raise ScenarioValidationError(
                "paired endpoint lists differ in length "
                f"({len(self.p0)} and {len(self.pf)})",
                ATTR_PAIR_ENDPOINTS,
            )

    def cells(self, base: Scenario) -> List[Scenario]:
        """Return the scenarios of all grid cells in grid order."""
        task = base.task
        if self.pair_endpoints:
            endpoints = list(zip(self.p0, self.pf)) or [(task.p0, task.pf)]
        else:
            endpoints = list(
                itertools.product(self.p0 or (task.p0,), self.pf or (task.pf,))
            )
        combinations = itertools.product(
            endpoints,
            self.push_forces or (task.push_force,),
            self.pull_forces or (task.pull_force,),
            self.phase_durations or ((task.t_push, task.t_pull),),
        )
        return [
            base.with_task(
                p0=p0,
                pf=pf,
                push_force=push_force,
                pull_force=pull_force,
                t_push=durations[0],
                t_pull=durations[1],
            )
            for (p0, pf), push_force, pull_force, durations in combinations
        ]


@dataclass
class SweepRow:
    """Outcome of one grid cell."""

    cell: int
    scenario: Scenario
    status: str = STATUS_OK
    summary: Optional[RunSummary] = None
    error: Optional[str] = None
    objective: Optional[float] = None
    rank: Optional[int] = None


@dataclass
class SweepResult:
    """Ranked rows and cell statistics."""

    rows: List[SweepRow] = field(default_factory=list)
    statistics: SweepStatistics = field(default_factory=SweepStatistics)

    @property
    def best(self) -> Optional[SweepRow]:
        """Return the best ranked cell."""
        return self.rows[0] if self.rows and self.rows[0].rank == 1 else None


def _list(section, key: str, parse) -> tuple:
    if key not in section:
        return ()
    value = section[key]
    if not isinstance(value, list) or not value:
        raise ScenarioSchemaError("expected a non-empty list", key)
    return tuple(parse({key: item}, key) for item in value)


def _grid_number(item, key):
    value = _number(item, key, "")
    _check(value >= 0, "must not be negative", key)
    return value


def _grid_durations(item, key):
    value = item[key]
    if not isinstance(value, list) or len(value) != 2:
        raise ScenarioSchemaError("expected [t_push, t_pull] in seconds", key)
    t_push = _number({key: value[0]}, key, "")
    t_pull = _number({key: value[1]}, key, "")
    _check(t_push > 0 and t_pull > 0, "must be positive", key)
    return t_push, t_pull


def grid_from_dict(data) -> SweepGrid:
    """Return the sweep grid described by parsed JSON."""
    section = _object(data, "", GRID_KEYS)
    pair_endpoints = section.get(ATTR_PAIR_ENDPOINTS, False)
    if not isinstance(pair_endpoints, bool):
        raise ScenarioSchemaError("expected true or false", ATTR_PAIR_ENDPOINTS)
    joint = section.get(ATTR_OBJECTIVE_JOINT)
    return SweepGrid(
        p0=_list(section, ATTR_P0, lambda item, key: _point(item, key, "")),
        pf=_list(section, ATTR_PF, lambda item, key: _point(item, key, "")),
        push_forces=_list(section, ATTR_PUSH_FORCE, _grid_number),
        pull_forces=_list(section, ATTR_PULL_FORCE, _grid_number),
        phase_durations=_list(section, ATTR_PHASE_DURATIONS, _grid_durations),
        objective=_choice(
            section, ATTR_OBJECTIVE, "", SweepObjective, SweepObjective.MAX_TIME_TO_RISK
        ),
        objective_joint=None
        if joint is None
        else _choice(section, ATTR_OBJECTIVE_JOINT, "", Joint, None),
        pair_endpoints=pair_endpoints,
    )


def load_sweep_grid(text: str) -> SweepGrid:
    """Return the sweep grid described by JSON text."""
    try:
        data = json.loads(text)
    except ValueError as error:
        raise ScenarioParseError(f"malformed JSON: {error}") from error
    return grid_from_dict(data)


def load_sweep_grid_file(path: str) -> SweepGrid:
    """Return the sweep grid stored in a file."""
    try:
        with open(path, encoding="utf-8") as fptr:
            text = fptr.read()
    except (OSError, UnicodeDecodeError) as error:
        raise ScenarioParseError(f"cannot read {path}: {error}") from error
    return load_sweep_grid(text)


def objective_value(
    summary: RunSummary,
    objective: SweepObjective,
    joint: Optional[Joint] = None,
) -> float:
    """Return a cell's objective; crossings beyond the horizon count as inf."""
    joints = (joint,) if joint else JOINTS
    if objective is SweepObjective.MIN_TOTAL_EXPONENT:
        return float(
            sum(
                value
                for group, value in summary.increments.items()
                if group.joint in joints
            )
        )
    crossings = [summary.crossings[item] for item in joints]
    return min(math.inf if value is None else value for value in crossings)


def rank_rows(rows: List[SweepRow], objective: SweepObjective) -> List[SweepRow]:
    """Return rows best first, ties by grid order, failed cells last."""
    sign = -1.0 if objective is SweepObjective.MAX_TIME_TO_RISK else 1.0
    succeeded = sorted(
        (row for row in rows if row.status == STATUS_OK),
        key=lambda row: (sign * row.objective, row.cell),
    )
    for rank, row in enumerate(succeeded, start=1):
        row.rank = rank
    failed = sorted(
        (row for row in rows if row.status != STATUS_OK), key=lambda row: row.cell
    )
    return succeeded + failed


def _evaluate_cell(scenario: Scenario) -> RunSummary:
    return evaluate(validate_scenario(scenario))


async def _sweep_cell(
    executor: Executor,
    cell: int,
    scenario: Scenario,
    grid: SweepGrid,
    statistics: SweepStatistics,
    timeout: Optional[float],
) -> SweepRow:
    """Evaluate one cell, recording failures instead of raising them."""
    loop = asyncio.get_running_loop()
    row = SweepRow(cell=cell, scenario=scenario)
    try:
        async with async_timeout.timeout(timeout):
            row.summary = await loop.run_in_executor(
                executor, _evaluate_cell, scenario
            )
        row.objective = objective_value(
            row.summary, grid.objective, grid.objective_joint
        )
        await statistics.cell_successful(cell)
        _LOGGER.debug("Cell %d done, objective %s", cell, row.objective)
    except FatigueSimulatorException as error:
        row.status, row.error = STATUS_ERROR, str(error)
        await statistics.cell_unsuccessful(cell, row.error)
        _LOGGER.warning("Sweep cell %d failed with %s", cell, error)
    except asyncio.TimeoutError:
        row.status, row.error = STATUS_ERROR, f"timed out after {timeout} s"
        await statistics.cell_unsuccessful(cell, row.error)
        _LOGGER.warning("Sweep cell %d timed out after %s s", cell, timeout)
    return row


async def sweep(
    base: Scenario,
    grid: SweepGrid,
    max_workers: Optional[int] = None,
    timeout: Optional[float] = None,
) -> SweepResult:
    """Evaluate every grid cell and return the ranked rows.

    timeout bounds how long each cell is awaited, so the sweep returns within
    about timeout seconds per round of workers. Cells still queued when they
    time out are cancelled; a cell already running cannot be interrupted and
    finishes in its worker thread after the sweep has returned.
    """
    cells = grid.cells(base)
    statistics = SweepStatistics()
    executor = ThreadPoolExecutor(max_workers=max_workers)
    try:
        rows = await asyncio.gather(
            *(
                _sweep_cell(executor, cell, scenario, grid, statistics, timeout)
                for cell, scenario in enumerate(cells)
            )
        )
    finally:
        executor.shutdown(wait=False, cancel_futures=True)
    _LOGGER.info("Sweep of %d cells finished: %s", len(cells), statistics)
    return SweepResult(rank_rows(list(rows), grid.objective), statistics)


def run_sweep(
    base: Scenario,
    grid: SweepGrid,
    max_workers: Optional[int] = None,
    timeout: Optional[float] = None,
) -> SweepResult:
    """Run sweep() to completion in a new event loop."""
    return asyncio.run(sweep(base, grid, max_workers, timeout))


def _number_text(value: Optional[float]) -> str:
    return "" if value is None else format_decimal(value)


def write_sweep_csv(result: SweepResult, destination: Destination) -> None:
    """Write one row per cell in rank order."""
    handle = _open(destination)
    try:
        writer = csv.writer(handle or destination, lineterminator="\n")
        writer.writerow(SWEEP_COLUMNS)
        for row in result.rows:
            task = row.scenario.task
            summary = row.summary
            writer.writerow(
                [
                    "" if row.rank is None else str(row.rank),
                    str(row.cell),
                    row.status,
                    _number_text(row.objective),
                    format_decimal(task.p0[0]),
                    format_decimal(task.p0[1]),
                    format_decimal(task.pf[0]),
                    format_decimal(task.pf[1]),
                    format_decimal(task.push_force),
                    format_decimal(task.pull_force),
                    format_decimal(task.t_push),
                    format_decimal(task.t_pull),
                    _number_text(summary and summary.crossings[Joint.SHOULDER]),
                    _number_text(summary and summary.crossings[Joint.ELBOW]),
                    _number_text(summary and summary.total_exponent),
                    row.error or "",
                ]
            )
    finally:
        if handle is not None:
            handle.close()
