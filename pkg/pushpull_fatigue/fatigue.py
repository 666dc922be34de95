"""
Muscle fatigue.

Each muscle group loses capacity exponentially with its accumulated effort,
Gamma_cem = Gamma_MVC(theta0) * exp(-k * integral of |Gamma_joint| / Gamma_MVC),
and only while its phase is active. The motion repeats every cycle, so the
exponent gained per cycle is the same for every cycle and long horizons are
evaluated from one cycle of quadrature.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Mapping, NamedTuple, Optional, Tuple

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .consts import (
    DEMAND_SIGN_TOLERANCE,
    GRID_TOLERANCE,
    JOINTS,
    MUSCLE_GROUPS,
    PHASE_GROUPS,
    SECONDS_PER_MINUTE,
    FatigueMode,
    Joint,
    MuscleGroup,
    Phase,
)
from .exceptions import (
    FatigueSimulatorException,
    GridMismatch,
    NegativeTime,
    ZeroCapacity,
)
from .utils import steps_in

_LOGGER = logging.getLogger(__name__)

GROUP_PHASES = {
    group: phase for phase, groups in PHASE_GROUPS.items() for group in groups
}


def group_for(phase: Phase, joint: Joint) -> MuscleGroup:
    """Return the group working at a joint during a phase."""
    for group in PHASE_GROUPS[phase]:
        if group.joint is joint:
            return group
    raise FatigueSimulatorException(f"No {joint.value} group in phase {phase.value}")


def _column(joint: Joint) -> int:
    return JOINTS.index(joint)


@dataclass(frozen=True)
class CycleSchedule:
    """Timing of the repeated push/pull cycle."""

    t_push: float
    t_pull: float
    t0: float = 0.0
    starts_with: Phase = Phase.PUSH

    def __post_init__(self) -> None:
        """Validate phase durations."""
        if not (self.t_push > 0 and self.t_pull > 0):
            raise FatigueSimulatorException(
                "Phase durations must be positive, "
                f"got {self.t_push} and {self.t_pull}"
            )
        if not math.isfinite(self.t0):
            raise FatigueSimulatorException(
                f"Start time must be finite, got {self.t0}"
            )

    @property
    def period(self) -> float:
        """Return the cycle period."""
        return self.t_push + self.t_pull

    @property
    def phase_order(self) -> Tuple[Phase, Phase]:
        """Return the phases in the order they occur within a cycle."""
        if self.starts_with is Phase.PULL:
            return Phase.PULL, Phase.PUSH
        return Phase.PUSH, Phase.PULL

    def duration(self, phase: Phase) -> float:
        """Return the duration of a phase."""
        return self.t_push if phase is Phase.PUSH else self.t_pull

    def phase_start(self, phase: Phase) -> float:
        """Return the offset of a phase within the cycle."""
        first = self.phase_order[0]
        return 0.0 if phase is first else self.duration(first)

    def first_activation(self, phase: Phase) -> float:
        """Return the time at which the phase's groups start working."""
        return self.t0 + self.phase_start(phase)


class PhaseClock(NamedTuple):
    """Position of an instant within the cycle."""

    phase: Phase
    cycle_index: int
    active_time: float
    offset: float


def phase_clock(sched: CycleSchedule, t: float) -> PhaseClock:
    """Return phase, completed cycles and cumulative active time at t.

    Instants within the grid tolerance of a phase boundary belong to the
    phase that starts there.
    """
    if t < sched.t0:
        raise NegativeTime(f"Time {t} s precedes the start of work {sched.t0} s")
    elapsed = t - sched.t0
    cycle = int(math.floor((elapsed + GRID_TOLERANCE) / sched.period))
    within = max(elapsed - cycle * sched.period, 0.0)
    first, second = sched.phase_order
    first_duration = sched.duration(first)
    if within < first_duration - GRID_TOLERANCE:
        phase, offset = first, within
    else:
        phase, offset = second, max(within - first_duration, 0.0)
    return PhaseClock(phase, cycle, cycle * sched.duration(phase) + offset, offset)


@dataclass(frozen=True, eq=False)
class PhaseSamples:
    """Samples of one phase from its start to its end, both included.

    theta, joint_torque and capacity have one row per sample and one column
    per joint (shoulder, elbow); capacity belongs to the phase's groups.
    """

    phase: Phase
    t: np.ndarray
    theta: np.ndarray
    joint_torque: np.ndarray
    capacity: np.ndarray

    def __post_init__(self) -> None:
        """Check array shapes."""
        count = len(self.t)
        if count < 2:
            raise FatigueSimulatorException(
                f"Phase {self.phase.value} needs at least two samples, got {count}"
            )
        for name in ("theta", "joint_torque", "capacity"):
            if np.shape(getattr(self, name)) != (count, 2):
                raise FatigueSimulatorException(
                    f"{name} of phase {self.phase.value} must have shape ({count}, 2)"
                )

    @property
    def steps(self) -> int:
        """Return the number of time steps."""
        return len(self.t) - 1

    @property
    def demand(self) -> np.ndarray:
        """Return the demanded torque magnitudes."""
        return np.abs(self.joint_torque)

    @classmethod
    def constant(
        cls,
        phase: Phase,
        duration: float,
        dt: float,
        theta,
        joint_torque,
        capacity,
    ) -> "PhaseSamples":
        """Return samples of a phase held in one posture under constant load."""
        steps = steps_in(duration, dt)
        t = np.arange(steps + 1) * dt
        t[-1] = duration
        rows = np.ones((steps + 1, 1))
        return cls(
            phase=phase,
            t=t,
            theta=rows * np.asarray(theta, dtype=float),
            joint_torque=rows * np.asarray(joint_torque, dtype=float),
            capacity=rows * np.asarray(capacity, dtype=float),
        )


@dataclass(frozen=True, eq=False)
class CycleProfile:
    """Samples of both phases of one cycle on a common time step."""

    schedule: CycleSchedule
    dt: float
    samples: Mapping[Phase, PhaseSamples]

    def __post_init__(self) -> None:
        """Check that every phase is sampled on the dt grid."""
        for phase in Phase:
            if phase not in self.samples:
                raise FatigueSimulatorException(
                    f"Missing samples of phase {phase.value}"
                )
            expected = steps_in(self.schedule.duration(phase), self.dt)
            if self.samples[phase].steps != expected:
                raise GridMismatch(
                    "Phase {} has {} steps, expected {}".format(
                        phase.value, self.samples[phase].steps, expected
                    )
                )

    def steps(self, phase: Phase) -> int:
        """Return the number of steps of a phase."""
        return self.samples[phase].steps

    @property
    def cycle_steps(self) -> int:
        """Return the number of steps of a cycle."""
        return self.steps(Phase.PUSH) + self.steps(Phase.PULL)


@dataclass(frozen=True, eq=False)
class FatigueTrace:
    """Simulated time series on the global grid.

    gamma_cem and mvc hold, per joint, the values of the group working at
    each instant; group_gamma_cem holds every group at every instant.
    """

    t: np.ndarray
    phase: np.ndarray
    theta: np.ndarray
    joint_torque: np.ndarray
    mvc: np.ndarray
    gamma_cem: np.ndarray
    group_gamma_cem: Dict[MuscleGroup, np.ndarray]
    initial_capacity: Dict[MuscleGroup, float]
    mode: FatigueMode = FatigueMode.QUASISTATIC

    def __len__(self) -> int:
        """Return the number of samples."""
        return len(self.t)

    @property
    def demand(self) -> np.ndarray:
        """Return the demanded torque magnitudes."""
        return np.abs(self.joint_torque)

    @classmethod
    def empty(
        cls, initial_capacity: Dict[MuscleGroup, float], mode: FatigueMode
    ) -> "FatigueTrace":
        """Return a trace without samples."""
        pair = np.empty((0, 2))
        return cls(
            t=np.empty(0),
            phase=np.empty(0, dtype=str),
            theta=pair,
            joint_torque=pair,
            mvc=pair,
            gamma_cem=pair,
            group_gamma_cem={group: np.empty(0) for group in MUSCLE_GROUPS},
            initial_capacity=dict(initial_capacity),
            mode=mode,
        )


class FatigueModel:
    """Per-group exponent bookkeeping of a periodic cycle.

    k is given per joint in 1/min. Static modes replace the posture dependent
    capacity of every group by one constant, the minimum or maximum over its
    active samples or a fixed value per group.
    """

    def __init__(
        self,
        profile: CycleProfile,
        k: Mapping[Joint, float],
        mode: FatigueMode = FatigueMode.QUASISTATIC,
        fixed_mvc: Optional[Mapping[MuscleGroup, float]] = None,
    ) -> None:
        """Initialise the model and integrate one cycle."""
        self._profile = profile
        self._mode = mode
        self._k = {joint: float(k[joint]) / SECONDS_PER_MINUTE for joint in JOINTS}
        if any(value < 0 for value in self._k.values()):
            raise FatigueSimulatorException(f"Fatigue rates must not be negative: {k}")
        self._capacity = {}
        self._integrand = {}
        self._partial = {}
        self._increment = {}
        for group in MUSCLE_GROUPS:
            samples = profile.samples[GROUP_PHASES[group]]
            column = _column(group.joint)
            capacity = self._group_capacity(
                group, samples.capacity[:, column], fixed_mvc
            )
            if np.any(capacity <= 0):
                raise ZeroCapacity(
                    "Capacity of {} is {:.3f} N.m on an active sample".format(
                        group.value, float(np.min(capacity))
                    )
                )
            integrand = self._k[group.joint] * samples.demand[:, column] / capacity
            partial = cumulative_trapezoid(integrand, samples.t, initial=0.0)
            self._capacity[group] = capacity
            self._integrand[group] = integrand
            self._partial[group] = partial
            self._increment[group] = float(partial[-1])
        _LOGGER.debug(
            "Per-cycle exponent increments (%s): %s", mode.value, self._increment
        )
        self._demand_sign = self._demand_sign_fractions()

    def _group_capacity(
        self,
        group: MuscleGroup,
        posture_capacity: np.ndarray,
        fixed_mvc: Optional[Mapping[MuscleGroup, float]],
    ) -> np.ndarray:
        if self._mode is FatigueMode.QUASISTATIC:
            return posture_capacity
        if self._mode is FatigueMode.STATIC_MIN_MVC:
            value = np.min(posture_capacity)
        elif self._mode is FatigueMode.STATIC_MAX_MVC:
            value = np.max(posture_capacity)
        else:
            if not fixed_mvc or group not in fixed_mvc:
                raise FatigueSimulatorException(
                    f"Mode {self._mode.value} needs a fixed capacity for {group.value}"
                )
            value = float(fixed_mvc[group])
        return np.full_like(posture_capacity, value)

    def _demand_sign_fractions(self) -> Dict[MuscleGroup, float]:
        fractions = {}
        for group in MUSCLE_GROUPS:
            samples = self._profile.samples[GROUP_PHASES[group]]
            torque = samples.joint_torque[:-1, _column(group.joint)]
            fractions[group] = float(np.mean(torque * group.action_sign < 0))
            if fractions[group] > DEMAND_SIGN_TOLERANCE:
                _LOGGER.warning(
                    "Net %s torque opposes %s on %.1f%% of its active samples",
                    group.joint.value,
                    group.value,
                    100 * fractions[group],
                )
        return fractions

    @property
    def profile(self) -> CycleProfile:
        """Return the cycle profile."""
        return self._profile

    @property
    def mode(self) -> FatigueMode:
        """Return the capacity mode."""
        return self._mode

    @property
    def increments(self) -> Dict[MuscleGroup, float]:
        """Return the exponent each group gains per cycle."""
        return dict(self._increment)

    @property
    def initial_capacity(self) -> Dict[MuscleGroup, float]:
        """Return Gamma_cem of every group before any work."""
        return {group: float(self._capacity[group][0]) for group in MUSCLE_GROUPS}

    @property
    def demand_sign_fractions(self) -> Dict[MuscleGroup, float]:
        """Return the share of active samples whose torque opposes each group."""
        return dict(self._demand_sign)

    def capacity(self, group: MuscleGroup) -> np.ndarray:
        """Return the capacity used for a group over its phase samples."""
        return self._capacity[group]

    def integrand(self, group: MuscleGroup) -> np.ndarray:
        """Return k |Gamma_joint| / Gamma_MVC over a group's phase samples, in 1/s."""
        return self._integrand[group]

    def partial(self, group: MuscleGroup) -> np.ndarray:
        """Return the exponent gained since the start of the group's phase."""
        return self._partial[group]

    def _locate(self, n: np.ndarray):
        first = self._profile.schedule.phase_order[0]
        cycle, remainder = np.divmod(n, self._profile.cycle_steps)
        in_first = remainder < self._profile.steps(first)
        local = np.where(in_first, remainder, remainder - self._profile.steps(first))
        return cycle, in_first, local

    def _grid_gamma_cem(self, cycle, in_first, local) -> Dict[MuscleGroup, np.ndarray]:
        first = self._profile.schedule.phase_order[0]
        result = {}
        for group in MUSCLE_GROUPS:
            is_first = GROUP_PHASES[group] is first
            active = in_first if is_first else ~in_first
            increment = self._increment[group]
            partial = self._partial[group][np.where(active, local, 0)]
            completed = cycle + 1 if is_first else cycle
            exponent = np.where(
                active, cycle * increment + partial, completed * increment
            )
            result[group] = self._capacity[group][0] * np.exp(-exponent)
        return result

    def fatigue_at(self, t: float) -> Dict[MuscleGroup, float]:
        """Return Gamma_cem of every group at time t."""
        schedule = self._profile.schedule
        clock = phase_clock(schedule, t)
        first = schedule.phase_order[0]
        result = {}
        for group in MUSCLE_GROUPS:
            phase = GROUP_PHASES[group]
            increment = self._increment[group]
            if phase is clock.phase:
                samples = self._profile.samples[phase]
                exponent = clock.cycle_index * increment + float(
                    np.interp(clock.offset, samples.t, self._partial[group])
                )
            elif phase is first:
                exponent = (clock.cycle_index + 1) * increment
            else:
                exponent = clock.cycle_index * increment
            result[group] = float(self._capacity[group][0] * math.exp(-exponent))
        return result

    def trace(self, duration: float) -> FatigueTrace:
        """Return the dense trace over [t0, t0 + duration]."""
        profile = self._profile
        steps = steps_in(duration, profile.dt)
        if steps == 0:
            return FatigueTrace.empty(self.initial_capacity, self._mode)
        n = np.arange(steps + 1)
        cycle, in_first, local = self._locate(n)
        first, second = profile.schedule.phase_order

        def select(values: Mapping[Phase, np.ndarray]) -> np.ndarray:
            head = values[first][np.minimum(local, profile.steps(first))]
            tail = values[second][np.minimum(local, profile.steps(second))]
            mask = in_first.reshape(in_first.shape + (1,) * (head.ndim - 1))
            return np.where(mask, head, tail)

        group_gamma_cem = self._grid_gamma_cem(cycle, in_first, local)
        mvc = np.stack(
            [
                select(
                    {
                        phase: self._capacity[group_for(phase, joint)]
                        for phase in (first, second)
                    }
                )
                for joint in JOINTS
            ],
            axis=-1,
        )
        gamma_cem = np.stack(
            [
                np.where(
                    in_first,
                    group_gamma_cem[group_for(first, joint)],
                    group_gamma_cem[group_for(second, joint)],
                )
                for joint in JOINTS
            ],
            axis=-1,
        )
        return FatigueTrace(
            t=profile.schedule.t0 + n * profile.dt,
            phase=np.where(in_first, first.value, second.value),
            theta=select({phase: profile.samples[phase].theta for phase in Phase}),
            joint_torque=select(
                {phase: profile.samples[phase].joint_torque for phase in Phase}
            ),
            mvc=mvc,
            gamma_cem=gamma_cem,
            group_gamma_cem=group_gamma_cem,
            initial_capacity=self.initial_capacity,
            mode=self._mode,
        )

    def _crossing_step(self, group: MuscleGroup, steps: int) -> Optional[int]:
        """Return the first grid index at which the group's capacity meets demand."""
        profile = self._profile
        phase = GROUP_PHASES[group]
        samples = profile.samples[phase]
        count = samples.steps
        demand = samples.demand[:count, _column(group.joint)]
        partial = self._partial[group][:count]
        anchor = self._capacity[group][0]
        increment = self._increment[group]
        cycle_steps = profile.cycle_steps
        offset = 0 if phase is profile.schedule.phase_order[0] else profile.steps(
            profile.schedule.phase_order[0]
        )
        limit = steps // cycle_steps + 1

        with np.errstate(divide="ignore"):
            needed = np.log(anchor / demand) - partial
        if increment > 0:
            estimate = np.ceil(np.maximum(needed, 0.0) / increment)
        else:
            estimate = np.where(needed <= 0, 0.0, np.inf)
        cycles = np.minimum(estimate, limit + 1).astype(np.int64)

        def crossed(candidate: np.ndarray) -> np.ndarray:
            return anchor * np.exp(-(candidate * increment + partial)) <= demand

        # Settle rounding in the estimate with the trace's own arithmetic.
        for _ in range(2):
            cycles = np.where((cycles > 0) & crossed(cycles - 1), cycles - 1, cycles)
        for _ in range(2):
            cycles = np.where(~crossed(cycles) & (cycles <= limit), cycles + 1, cycles)
        index = cycles * cycle_steps + offset + np.arange(count)
        index = index[crossed(cycles) & (index <= steps)]
        if index.size == 0:
            return None
        return int(index.min())

    def group_crossings(self, horizon: float) -> Dict[MuscleGroup, Optional[float]]:
        """Return, per group, the first grid instant its capacity meets demand."""
        steps = steps_in(horizon, self._profile.dt)
        result = {}
        for group in MUSCLE_GROUPS:
            step = self._crossing_step(group, steps) if steps > 0 else None
            result[group] = (
                None
                if step is None
                else self._profile.schedule.t0 + step * self._profile.dt
            )
        return result

    def risk_crossings(self, horizon: float) -> Dict[Joint, Optional[float]]:
        """Return, per joint, the first crossing within the horizon or None."""
        groups = self.group_crossings(horizon)
        result = {}
        for joint in JOINTS:
            times = [
                value
                for group, value in groups.items()
                if group.joint is joint and value is not None
            ]
            result[joint] = min(times) if times else None
        return result


@dataclass
class MuscleGroupState:
    """Fatigue state of one group advanced step by step."""

    group: MuscleGroup
    anchor: float
    accumulated_exponent: float = 0.0
    active_time: float = 0.0
    gamma_cem: float = field(init=False)

    def __post_init__(self) -> None:
        """Validate the anchor and derive the current capacity."""
        if not self.anchor > 0:
            raise ZeroCapacity(
                f"Initial capacity of {self.group.value} is {self.anchor}"
            )
        self.gamma_cem = self.anchor * math.exp(-self.accumulated_exponent)

    def advance(self, rate_start: float, rate_end: float, step: float) -> None:
        """Accumulate one trapezoid of the fatigue rate over step seconds."""
        increment = 0.5 * (rate_start + rate_end) * step
        if increment < 0:
            raise FatigueSimulatorException(
                f"Negative exponent increment {increment} for {self.group.value}"
            )
        self.accumulated_exponent += increment
        self.active_time += step
        self.gamma_cem = self.anchor * math.exp(-self.accumulated_exponent)


def integrate_stepwise(
    model: FatigueModel, duration: float
) -> Dict[MuscleGroup, np.ndarray]:
    """Return every group's Gamma_cem on the grid by stepping sample by sample."""
    profile = model.profile
    steps = steps_in(duration, profile.dt)
    if steps == 0:
        return {group: np.empty(0) for group in MUSCLE_GROUPS}
    initial = model.initial_capacity
    states = {group: MuscleGroupState(group, initial[group]) for group in MUSCLE_GROUPS}
    history = {group: np.empty(steps + 1) for group in MUSCLE_GROUPS}
    for group in MUSCLE_GROUPS:
        history[group][0] = states[group].gamma_cem
    order = profile.schedule.phase_order
    phase_index = 0
    local = 0
    for n in range(1, steps + 1):
        phase = order[phase_index]
        samples = profile.samples[phase]
        step = samples.t[local + 1] - samples.t[local]
        for group in PHASE_GROUPS[phase]:
            rate = model.integrand(group)
            states[group].advance(rate[local], rate[local + 1], step)
        local += 1
        if local == samples.steps:
            phase_index = 1 - phase_index
            local = 0
        for group in MUSCLE_GROUPS:
            history[group][n] = states[group].gamma_cem
    return history


def cycle_exponent_increments(
    profile: CycleProfile,
    k: Mapping[Joint, float],
    mode: FatigueMode = FatigueMode.QUASISTATIC,
    fixed_mvc: Optional[Mapping[MuscleGroup, float]] = None,
) -> Dict[MuscleGroup, float]:
    """Return the exponent each group gains over one cycle."""
    return FatigueModel(profile, k, mode, fixed_mvc).increments


def simulate(
    profile: CycleProfile,
    k: Mapping[Joint, float],
    duration: float,
    mode: FatigueMode = FatigueMode.QUASISTATIC,
    fixed_mvc: Optional[Mapping[MuscleGroup, float]] = None,
) -> FatigueTrace:
    """Return the trace of a repeated cycle over duration seconds."""
    return FatigueModel(profile, k, mode, fixed_mvc).trace(duration)


def simulate_static_mode(
    profile: CycleProfile,
    k: Mapping[Joint, float],
    duration: float,
    policy: FatigueMode = FatigueMode.STATIC_MIN_MVC,
    fixed_mvc: Optional[Mapping[MuscleGroup, float]] = None,
) -> FatigueTrace:
    """Return the trace with every group's capacity held constant."""
    if policy is FatigueMode.QUASISTATIC:
        raise FatigueSimulatorException(
            "Static simulation needs a constant capacity policy"
        )
    return simulate(profile, k, duration, policy, fixed_mvc)


def detect_risk_crossing(trace: FatigueTrace) -> Dict[Joint, Optional[float]]:
    """Return, per joint, the first trace instant where capacity meets demand."""
    reached = trace.gamma_cem <= trace.demand
    result = {}
    for joint in JOINTS:
        hits = np.flatnonzero(reached[:, _column(joint)])
        result[joint] = float(trace.t[hits[0]]) if hits.size else None
    return result
