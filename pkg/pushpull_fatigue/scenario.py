"""
Scenario files.

A scenario is a JSON document with an operator, a task and run settings.
Units are part of the key names. Unknown keys are rejected and every error
names the dotted path of the offending field.
"""
import json
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Any, Dict, Mapping, Optional

from .capacity import DEFAULT_COEFFICIENTS, CapacityCoefficients, row_name
from .consts import (
    ATTR_BLEND,
    ATTR_BODY_MASS,
    ATTR_CAPACITY_COEFFICIENTS,
    ATTR_COM_DISTANCE,
    ATTR_DT,
    ATTR_DURATION,
    ATTR_ELBOW_BRANCH,
    ATTR_FIXED_MVC,
    ATTR_FORCE_CONVENTION,
    ATTR_FOREARM_HAND,
    ATTR_GENDER,
    ATTR_GRAVITY,
    ATTR_INERTIA_COM,
    ATTR_K_ELBOW,
    ATTR_K_SHOULDER,
    ATTR_LENGTH,
    ATTR_MASS,
    ATTR_MODE,
    ATTR_OPERATOR,
    ATTR_P0,
    ATTR_PF,
    ATTR_PULL_FORCE,
    ATTR_PUSH_FORCE,
    ATTR_RUN,
    ATTR_SEGMENT_OVERRIDES,
    ATTR_STARTS_WITH,
    ATTR_STATURE,
    ATTR_T_PULL,
    ATTR_T_PUSH,
    ATTR_TASK,
    ATTR_TOOL_MASS,
    ATTR_UPPER_ARM,
    BODY_MASS_RANGE,
    DEFAULT_DT,
    DEFAULT_K_ELBOW,
    DEFAULT_K_SHOULDER,
    GRAVITY,
    JOINTS,
    LEG_REACH_MARGIN,
    MUSCLE_GROUPS,
    STATURE_RANGE,
    BlendProfile,
    ElbowBranch,
    FatigueMode,
    ForceConvention,
    Gender,
    Movement,
    MuscleGroup,
    Phase,
)
from .exceptions import (
    FatigueSimulatorException,
    GridMismatch,
    ScenarioParseError,
    ScenarioSchemaError,
    ScenarioValidationError,
)
from .task import OperatorModel, PushPullTask
from .utils import steps_in

_LOGGER = logging.getLogger(__name__)

# JSON key -> SegmentParams field.
SEGMENT_FIELDS = {
    ATTR_LENGTH: "length",
    ATTR_MASS: "mass",
    ATTR_COM_DISTANCE: "com_distance",
    ATTR_INERTIA_COM: "inertia_com",
}
CAPACITY_ROWS = tuple(
    row_name(joint, movement) for joint in JOINTS for movement in Movement
)
CAPACITY_FIELDS = (
    "constant",
    "theta_e",
    "theta_e_sq",
    "theta_s",
    "gain_male",
    "gain_female",
)

OPERATOR_KEYS = (
    ATTR_STATURE,
    ATTR_BODY_MASS,
    ATTR_GENDER,
    ATTR_K_SHOULDER,
    ATTR_K_ELBOW,
    ATTR_SEGMENT_OVERRIDES,
    ATTR_CAPACITY_COEFFICIENTS,
)
TASK_KEYS = (
    ATTR_P0,
    ATTR_PF,
    ATTR_T_PUSH,
    ATTR_T_PULL,
    ATTR_PUSH_FORCE,
    ATTR_PULL_FORCE,
    ATTR_TOOL_MASS,
    ATTR_FORCE_CONVENTION,
    ATTR_BLEND,
    ATTR_STARTS_WITH,
)
RUN_KEYS = (
    ATTR_DURATION,
    ATTR_DT,
    ATTR_MODE,
    ATTR_ELBOW_BRANCH,
    ATTR_FIXED_MVC,
    ATTR_GRAVITY,
)

_MISSING = object()


@dataclass(frozen=True)
class RunSettings:
    """Horizon, time step and model options of a run."""

    duration: float
    dt: float = DEFAULT_DT
    mode: FatigueMode = FatigueMode.QUASISTATIC
    elbow_branch: ElbowBranch = ElbowBranch.ELBOW_DOWN
    fixed_mvc: Mapping[MuscleGroup, float] = field(default_factory=dict)
    gravity: float = GRAVITY


@dataclass(frozen=True)
class Scenario:
    """Operator, task and run settings."""

    operator: OperatorModel
    task: PushPullTask
    run: RunSettings

    def with_run(self, **changes) -> "Scenario":
        """Return a copy with run settings replaced."""
        return replace(self, run=replace(self.run, **changes))

    def with_task(self, **changes) -> "Scenario":
        """Return a copy with task fields replaced."""
        return replace(self, task=replace(self.task, **changes))


def _path(parent: str, key: str) -> str:
    return f"{parent}.{key}" if parent else key


def _object(value: Any, path: str, allowed) -> Dict[str, Any]:
    """Return value as a JSON object holding only allowed keys."""
    if not isinstance(value, dict):
        raise ScenarioSchemaError("expected an object", path or None)
    unknown = sorted(set(value) - set(allowed))
    if unknown:
        raise ScenarioSchemaError(
            "unknown key '{}'".format(unknown[0]), _path(path, unknown[0])
        )
    return value


def _required(section: Dict[str, Any], key: str, path: str) -> Any:
    if key not in section:
        raise ScenarioSchemaError("missing key", _path(path, key))
    return section[key]


def _number(section: Dict[str, Any], key: str, path: str, default=_MISSING) -> float:
    if key not in section and default is not _MISSING:
        return default
    value = _required(section, key, path)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioSchemaError("expected a number", _path(path, key))
    if not math.isfinite(value):
        raise ScenarioValidationError("must be finite", _path(path, key))
    return float(value)


def _point(section: Dict[str, Any], key: str, path: str):
    value = _required(section, key, path)
    if (
        not isinstance(value, list)
        or len(value) != 2
        or any(
            isinstance(item, bool) or not isinstance(item, (int, float))
            for item in value
        )
    ):
        raise ScenarioSchemaError("expected [x, z] in metres", _path(path, key))
    return float(value[0]), float(value[1])


def _choice(section: Dict[str, Any], key: str, path: str, enum, default):
    if key not in section:
        return default
    value = section[key]
    try:
        return enum(value)
    except ValueError:
        raise ScenarioValidationError(
            "expected one of {}".format(", ".join(item.value for item in enum)),
            _path(path, key),
        ) from None


def _check(condition: bool, message: str, path: str) -> None:
    if not condition:
        raise ScenarioValidationError(message, path)


def _parse_operator(data: Any) -> OperatorModel:
    path = ATTR_OPERATOR
    section = _object(data, path, OPERATOR_KEYS)
    stature = _number(section, ATTR_STATURE, path)
    _check(
        STATURE_RANGE[0] <= stature <= STATURE_RANGE[1],
        f"must lie in {list(STATURE_RANGE)}",
        _path(path, ATTR_STATURE),
    )
    body_mass = _number(section, ATTR_BODY_MASS, path)
    _check(
        BODY_MASS_RANGE[0] <= body_mass <= BODY_MASS_RANGE[1],
        f"must lie in {list(BODY_MASS_RANGE)}",
        _path(path, ATTR_BODY_MASS),
    )
    k_shoulder = _number(section, ATTR_K_SHOULDER, path, DEFAULT_K_SHOULDER)
    _check(k_shoulder >= 0, "must not be negative", _path(path, ATTR_K_SHOULDER))
    k_elbow = _number(section, ATTR_K_ELBOW, path, DEFAULT_K_ELBOW)
    _check(k_elbow >= 0, "must not be negative", _path(path, ATTR_K_ELBOW))

    overrides = {}
    overrides_path = _path(path, ATTR_SEGMENT_OVERRIDES)
    segments = _object(
        section.get(ATTR_SEGMENT_OVERRIDES, {}),
        overrides_path,
        (ATTR_UPPER_ARM, ATTR_FOREARM_HAND),
    )
    for segment, values in segments.items():
        segment_path = _path(overrides_path, segment)
        values = _object(values, segment_path, SEGMENT_FIELDS)
        overrides[segment] = {}
        for key in values:
            value = _number(values, key, segment_path)
            _check(value > 0, "must be positive", _path(segment_path, key))
            overrides[segment][SEGMENT_FIELDS[key]] = value

    capacity = DEFAULT_COEFFICIENTS
    capacity_path = _path(path, ATTR_CAPACITY_COEFFICIENTS)
    rows = _object(
        section.get(ATTR_CAPACITY_COEFFICIENTS, {}), capacity_path, CAPACITY_ROWS
    )
    if rows:
        row_overrides = {}
        for name, values in rows.items():
            row_path = _path(capacity_path, name)
            values = _object(values, row_path, CAPACITY_FIELDS)
            row_overrides[name] = {
                key: _number(values, key, row_path) for key in values
            }
        try:
            capacity = capacity.with_overrides(row_overrides)
        except FatigueSimulatorException as error:
            raise ScenarioValidationError(str(error), capacity_path) from error

    return OperatorModel(
        stature=stature,
        body_mass=body_mass,
        gender=_choice(section, ATTR_GENDER, path, Gender, Gender.MALE),
        k_shoulder=k_shoulder,
        k_elbow=k_elbow,
        segment_overrides=overrides,
        capacity=capacity,
    )


def _parse_task(data: Any) -> PushPullTask:
    path = ATTR_TASK
    section = _object(data, path, TASK_KEYS)
    values = {}
    for key in (ATTR_T_PUSH, ATTR_T_PULL):
        values[key] = _number(section, key, path)
        _check(values[key] > 0, "must be positive", _path(path, key))
    for key in (ATTR_PUSH_FORCE, ATTR_PULL_FORCE):
        values[key] = _number(section, key, path)
        _check(values[key] >= 0, "must not be negative", _path(path, key))
    tool_mass = _number(section, ATTR_TOOL_MASS, path, 0.0)
    _check(tool_mass >= 0, "must not be negative", _path(path, ATTR_TOOL_MASS))
    return PushPullTask(
        p0=_point(section, ATTR_P0, path),
        pf=_point(section, ATTR_PF, path),
        t_push=values[ATTR_T_PUSH],
        t_pull=values[ATTR_T_PULL],
        push_force=values[ATTR_PUSH_FORCE],
        pull_force=values[ATTR_PULL_FORCE],
        tool_mass=tool_mass,
        force_convention=_choice(
            section,
            ATTR_FORCE_CONVENTION,
            path,
            ForceConvention,
            ForceConvention.EXERTED_BY_HAND,
        ),
        blend=_choice(section, ATTR_BLEND, path, BlendProfile, BlendProfile.CUBIC),
        starts_with=_choice(section, ATTR_STARTS_WITH, path, Phase, Phase.PUSH),
    )


def _parse_run(data: Any) -> RunSettings:
    path = ATTR_RUN
    section = _object(data, path, RUN_KEYS)
    duration = _number(section, ATTR_DURATION, path)
    _check(duration >= 0, "must not be negative", _path(path, ATTR_DURATION))
    dt = _number(section, ATTR_DT, path, DEFAULT_DT)
    _check(dt > 0, "must be positive", _path(path, ATTR_DT))
    gravity = _number(section, ATTR_GRAVITY, path, GRAVITY)
    _check(gravity >= 0, "must not be negative", _path(path, ATTR_GRAVITY))
    fixed_path = _path(path, ATTR_FIXED_MVC)
    fixed = _object(
        section.get(ATTR_FIXED_MVC, {}),
        fixed_path,
        tuple(group.value for group in MUSCLE_GROUPS),
    )
    fixed_mvc = {}
    for key in fixed:
        value = _number(fixed, key, fixed_path)
        _check(value > 0, "must be positive", _path(fixed_path, key))
        fixed_mvc[MuscleGroup(key)] = value
    return RunSettings(
        duration=duration,
        dt=dt,
        mode=_choice(section, ATTR_MODE, path, FatigueMode, FatigueMode.QUASISTATIC),
        elbow_branch=_choice(
            section, ATTR_ELBOW_BRANCH, path, ElbowBranch, ElbowBranch.ELBOW_DOWN
        ),
        fixed_mvc=fixed_mvc,
        gravity=gravity,
    )


def validate_scenario(scenario: Scenario) -> Scenario:
    """Check cross-field invariants and return the scenario unchanged."""
    operator, task, run = scenario.operator, scenario.task, scenario.run
    try:
        model = operator.inertial_model(task.tool_mass, run.gravity)
    except FatigueSimulatorException as error:
        raise ScenarioValidationError(
            str(error), _path(ATTR_OPERATOR, ATTR_SEGMENT_OVERRIDES)
        ) from error
    geom = model.geometry(run.elbow_branch)
    for key, point in ((ATTR_P0, task.p0), (ATTR_PF, task.pf)):
        _check(
            geom.is_reachable(point, LEG_REACH_MARGIN),
            "unreachable endpoint {}, reach is [{:.4f}, {:.4f}] m".format(
                list(point), geom.min_reach, geom.max_reach
            ),
            _path(ATTR_TASK, key),
        )
    clearance = geom.path_clearance(task.p0, task.pf)
    _check(
        clearance >= geom.min_reach + LEG_REACH_MARGIN,
        "path from {} passes {:.4f} m from the shoulder, inside reach {:.4f} m".format(
            list(task.p0), clearance, geom.min_reach
        ),
        _path(ATTR_TASK, ATTR_PF),
    )
    validate_run_settings(scenario)
    _check(
        run.duration >= task.t_push + task.t_pull,
        "must cover at least one cycle",
        _path(ATTR_RUN, ATTR_DURATION),
    )
    return scenario


def validate_run_settings(scenario: Scenario) -> None:
    """Check the time grid and the capacity mode of the run settings."""
    task, run = scenario.task, scenario.run
    _check(run.dt > 0, "must be positive", _path(ATTR_RUN, ATTR_DT))
    _check(run.duration >= 0, "must not be negative", _path(ATTR_RUN, ATTR_DURATION))
    for key, value in (
        (_path(ATTR_TASK, ATTR_T_PUSH), task.t_push),
        (_path(ATTR_TASK, ATTR_T_PULL), task.t_pull),
        (_path(ATTR_RUN, ATTR_DURATION), run.duration),
    ):
        try:
            steps_in(value, run.dt)
        except GridMismatch as error:
            raise ScenarioValidationError(str(error), key) from error
    if run.mode is FatigueMode.STATIC_FIXED:
        missing = [group.value for group in MUSCLE_GROUPS if group not in run.fixed_mvc]
        _check(
            not missing,
            "static_fixed needs values for {}".format(", ".join(missing)),
            _path(ATTR_RUN, ATTR_FIXED_MVC),
        )


def scenario_from_dict(data: Any) -> Scenario:
    """Return a validated scenario from parsed JSON."""
    document = _object(data, "", (ATTR_OPERATOR, ATTR_TASK, ATTR_RUN))
    scenario = Scenario(
        operator=_parse_operator(_required(document, ATTR_OPERATOR, "")),
        task=_parse_task(_required(document, ATTR_TASK, "")),
        run=_parse_run(_required(document, ATTR_RUN, "")),
    )
    return validate_scenario(scenario)


def load_scenario(text: str) -> Scenario:
    """Return the validated scenario described by JSON text."""
    try:
        data = json.loads(text)
    except ValueError as error:
        raise ScenarioParseError(f"malformed JSON: {error}") from error
    scenario = scenario_from_dict(data)
    _LOGGER.debug("Loaded scenario %s", scenario)
    return scenario


def load_scenario_file(path: str) -> Scenario:
    """Return the validated scenario stored in a file."""
    try:
        with open(path, encoding="utf-8") as fptr:
            text = fptr.read()
    except (OSError, UnicodeDecodeError) as error:
        raise ScenarioParseError(f"cannot read {path}: {error}") from error
    return load_scenario(text)


def scenario_to_dict(scenario: Scenario) -> Dict[str, Any]:
    """Return the JSON document of a scenario."""
    operator, task, run = scenario.operator, scenario.task, scenario.run
    operator_data = {
        ATTR_STATURE: operator.stature,
        ATTR_BODY_MASS: operator.body_mass,
        ATTR_GENDER: operator.gender.value,
        ATTR_K_SHOULDER: operator.k_shoulder,
        ATTR_K_ELBOW: operator.k_elbow,
    }
    if operator.segment_overrides:
        keys = {value: key for key, value in SEGMENT_FIELDS.items()}
        operator_data[ATTR_SEGMENT_OVERRIDES] = {
            segment: {keys[name]: value for name, value in values.items()}
            for segment, values in operator.segment_overrides.items()
        }
    if operator.capacity != DEFAULT_COEFFICIENTS:
        operator_data[ATTR_CAPACITY_COEFFICIENTS] = _capacity_to_dict(operator.capacity)
    run_data = {
        ATTR_DURATION: run.duration,
        ATTR_DT: run.dt,
        ATTR_MODE: run.mode.value,
        ATTR_ELBOW_BRANCH: run.elbow_branch.value,
        ATTR_GRAVITY: run.gravity,
    }
    if run.fixed_mvc:
        run_data[ATTR_FIXED_MVC] = {
            group.value: value for group, value in run.fixed_mvc.items()
        }
    return {
        ATTR_OPERATOR: operator_data,
        ATTR_TASK: {
            ATTR_P0: list(task.p0),
            ATTR_PF: list(task.pf),
            ATTR_T_PUSH: task.t_push,
            ATTR_T_PULL: task.t_pull,
            ATTR_PUSH_FORCE: task.push_force,
            ATTR_PULL_FORCE: task.pull_force,
            ATTR_TOOL_MASS: task.tool_mass,
            ATTR_FORCE_CONVENTION: task.force_convention.value,
            ATTR_BLEND: task.blend.value,
            ATTR_STARTS_WITH: task.starts_with.value,
        },
        ATTR_RUN: run_data,
    }


def _capacity_to_dict(capacity: CapacityCoefficients) -> Dict[str, Dict[str, float]]:
    return {
        name: {key: getattr(getattr(capacity, name), key) for key in CAPACITY_FIELDS}
        for name in CAPACITY_ROWS
    }


def dump_scenario(scenario: Scenario) -> str:
    """Return JSON text that load_scenario turns back into the same scenario."""
    return json.dumps(scenario_to_dict(scenario), indent=2) + "\n"


def scenario_label(scenario: Scenario, source: Optional[str] = None) -> str:
    """Return a short description for log messages."""
    task = scenario.task
    label = "P0={} Pf={} {}/{} N {}+{} s".format(
        list(task.p0),
        list(task.pf),
        task.push_force,
        task.pull_force,
        task.t_push,
        task.t_pull,
    )
    return f"{source}: {label}" if source else label
