"""Test for the fatigue model."""
import logging
import math

import numpy as np
import pytest

from pushpull_fatigue.consts import (
    MUSCLE_GROUPS,
    FatigueMode,
    Joint,
    MuscleGroup,
    Phase,
)
from pushpull_fatigue.exceptions import (
    FatigueSimulatorException,
    GridMismatch,
    NegativeTime,
    ZeroCapacity,
)
from pushpull_fatigue.fatigue import (
    CycleProfile,
    CycleSchedule,
    FatigueModel,
    MuscleGroupState,
    PhaseSamples,
    cycle_exponent_increments,
    detect_risk_crossing,
    group_for,
    integrate_stepwise,
    phase_clock,
    simulate,
    simulate_static_mode,
)
from tests.utils import constant_profile, varying_profile

K = {Joint.SHOULDER: 0.24, Joint.ELBOW: 0.24}
PUSH_GROUPS = (MuscleGroup.SHOULDER_FLEXOR, MuscleGroup.ELBOW_EXTENSOR)
PULL_GROUPS = (MuscleGroup.SHOULDER_EXTENSOR, MuscleGroup.ELBOW_FLEXOR)


def test_phase_clock():
    """Test phase, cycle and active time along the cycle."""
    schedule = CycleSchedule(5.0, 5.0)
    assert phase_clock(schedule, 0.0)[:3] == (Phase.PUSH, 0, 0.0)
    clock = phase_clock(schedule, 7.0)
    assert clock.phase is Phase.PULL
    assert clock.cycle_index == 0
    assert clock.active_time == pytest.approx(2.0)
    clock = phase_clock(schedule, 12.0)
    assert clock.phase is Phase.PUSH
    assert clock.cycle_index == 1
    assert clock.active_time == pytest.approx(7.0)
    # Boundaries belong to the phase starting there.
    assert phase_clock(schedule, 5.0).phase is Phase.PULL
    assert phase_clock(schedule, 10.0)[:2] == (Phase.PUSH, 1)
    with pytest.raises(NegativeTime):
        phase_clock(schedule, -0.5)


def test_phase_clock_start_time_and_order():
    """Test a cycle starting later and with a pull."""
    schedule = CycleSchedule(2.0, 3.0, t0=100.0, starts_with=Phase.PULL)
    assert schedule.period == 5.0
    assert schedule.phase_order == (Phase.PULL, Phase.PUSH)
    assert schedule.phase_start(Phase.PUSH) == 3.0
    assert schedule.first_activation(Phase.PUSH) == 103.0
    clock = phase_clock(schedule, 104.0)
    assert clock.phase is Phase.PUSH
    assert clock.offset == pytest.approx(1.0)
    clock = phase_clock(schedule, 106.0)
    assert clock.phase is Phase.PULL
    assert clock.cycle_index == 1
    assert clock.active_time == pytest.approx(4.0)
    with pytest.raises(NegativeTime):
        phase_clock(schedule, 99.0)


def test_schedule_validation():
    """Test invalid phase durations."""
    with pytest.raises(FatigueSimulatorException):
        CycleSchedule(0.0, 5.0)
    with pytest.raises(FatigueSimulatorException):
        CycleSchedule(5.0, -1.0)


def test_group_for():
    """Test the working group per phase and joint."""
    assert group_for(Phase.PUSH, Joint.SHOULDER) is MuscleGroup.SHOULDER_FLEXOR
    assert group_for(Phase.PUSH, Joint.ELBOW) is MuscleGroup.ELBOW_EXTENSOR
    assert group_for(Phase.PULL, Joint.SHOULDER) is MuscleGroup.SHOULDER_EXTENSOR
    assert group_for(Phase.PULL, Joint.ELBOW) is MuscleGroup.ELBOW_FLEXOR


def test_profile_validation():
    """Test sample shapes and grid checks."""
    with pytest.raises(FatigueSimulatorException):
        PhaseSamples(Phase.PUSH, np.zeros(1), np.zeros((1, 2)), np.zeros((1, 2)), 1)
    with pytest.raises(FatigueSimulatorException):
        PhaseSamples(
            Phase.PUSH, np.zeros(3), np.zeros((3, 2)), np.zeros((3, 2)), np.ones(3)
        )
    profile = constant_profile(t_push=5.0, t_pull=5.0)
    with pytest.raises(GridMismatch):
        CycleProfile(CycleSchedule(5.0, 4.0), 0.01, profile.samples)
    with pytest.raises(FatigueSimulatorException):
        CycleProfile(
            CycleSchedule(5.0, 5.0), 0.01, {Phase.PUSH: profile.samples[Phase.PUSH]}
        )
    assert profile.cycle_steps == 1000


def test_constant_ratio_increments():
    """Test the per-cycle exponent of a held posture."""
    increments = cycle_exponent_increments(constant_profile(0.5), K)
    for group in MUSCLE_GROUPS:
        assert increments[group] == pytest.approx(0.24 / 60 * 0.5 * 5.0, rel=1e-12)
    doubled = cycle_exponent_increments(
        constant_profile(0.5), {Joint.SHOULDER: 0.48, Joint.ELBOW: 0.48}
    )
    for group in MUSCLE_GROUPS:
        assert doubled[group] == pytest.approx(2 * increments[group], rel=1e-12)


def test_zero_demand():
    """Test no demand causes no fatigue."""
    model = FatigueModel(constant_profile(0.0), K)
    assert all(value == 0.0 for value in model.increments.values())
    assert model.fatigue_at(1000.0) == pytest.approx(model.initial_capacity)


def test_no_fatigue_rate():
    """Test k = 0 keeps the initial capacity and never crosses."""
    model = FatigueModel(constant_profile(0.5), {Joint.SHOULDER: 0, Joint.ELBOW: 0})
    trace = model.trace(100.0)
    for group in MUSCLE_GROUPS:
        assert np.all(trace.group_gamma_cem[group] == 100.0)
    assert model.risk_crossings(100.0) == {Joint.SHOULDER: None, Joint.ELBOW: None}
    with pytest.raises(FatigueSimulatorException):
        FatigueModel(constant_profile(0.5), {Joint.SHOULDER: -1, Joint.ELBOW: 0})


def test_closed_form_capacity():
    """Test ten minutes of continuous pushing at half capacity."""
    model = FatigueModel(constant_profile(0.5, t_push=60.0, t_pull=60.0), K)
    capacity = model.fatigue_at(1200.0)
    assert capacity[MuscleGroup.ELBOW_EXTENSOR] == pytest.approx(
        100.0 * math.exp(-1.2), rel=1e-9
    )
    assert capacity[MuscleGroup.ELBOW_EXTENSOR] == pytest.approx(30.12, abs=0.005)
    # The pull groups have worked ten minutes too and rest now.
    assert capacity[MuscleGroup.ELBOW_FLEXOR] == pytest.approx(
        100.0 * math.exp(-1.2), rel=1e-9
    )
    assert model.fatigue_at(1230.0)[MuscleGroup.ELBOW_FLEXOR] == pytest.approx(
        capacity[MuscleGroup.ELBOW_FLEXOR]
    )


def test_closed_form_crossing():
    """Test the crossing of a held posture against the analytic solution."""
    model = FatigueModel(constant_profile(0.5), K)
    # Active time until capacity meets demand, then back to wall time.
    active = -math.log(0.5) / (0.24 / 60 * 0.5)
    cycles = math.floor(active / 5.0)
    expected = cycles * 10.0 + (active - cycles * 5.0)
    crossings = model.risk_crossings(1200.0)
    assert crossings[Joint.ELBOW] == pytest.approx(expected, abs=0.011)
    assert crossings[Joint.SHOULDER] == pytest.approx(expected, abs=0.011)
    groups = model.group_crossings(1200.0)
    assert groups[MuscleGroup.ELBOW_EXTENSOR] == crossings[Joint.ELBOW]
    assert groups[MuscleGroup.ELBOW_FLEXOR] == pytest.approx(expected + 5.0, abs=0.011)
    # Beyond the horizon.
    assert model.risk_crossings(600.0)[Joint.ELBOW] is None


def test_trace_crossing_matches_analytic():
    """Test scanning the dense trace finds the analytic crossing."""
    model = FatigueModel(varying_profile(), {Joint.SHOULDER: 2.0, Joint.ELBOW: 3.0})
    constant = FatigueModel(constant_profile(0.5), K)
    for candidate, horizon in ((model, 400.0), (constant, 800.0)):
        analytic = candidate.risk_crossings(horizon)
        scanned = detect_risk_crossing(candidate.trace(horizon))
        assert analytic[Joint.ELBOW] is not None
        for joint in (Joint.SHOULDER, Joint.ELBOW):
            if analytic[joint] is None:
                assert scanned[joint] is None
            else:
                assert scanned[joint] == pytest.approx(analytic[joint], abs=1e-9)


def test_trace_grid():
    """Test trace length, phases and the piecewise capacity selection."""
    model = FatigueModel(varying_profile(), {Joint.SHOULDER: 0.17, Joint.ELBOW: 0.24})
    trace = model.trace(10.0)
    assert len(trace) == 1001
    assert trace.t[0] == 0.0
    assert trace.t[-1] == pytest.approx(10.0)
    assert trace.phase[0] == "push"
    assert trace.phase[199] == "push"
    assert trace.phase[200] == "pull"
    assert trace.phase[500] == "push"

    push = trace.phase == "push"
    assert np.array_equal(
        trace.gamma_cem[push, 1],
        trace.group_gamma_cem[MuscleGroup.ELBOW_EXTENSOR][push],
    )
    assert np.array_equal(
        trace.gamma_cem[~push, 0],
        trace.group_gamma_cem[MuscleGroup.SHOULDER_EXTENSOR][~push],
    )
    assert trace.gamma_cem[0] == pytest.approx(
        [model.initial_capacity[group] for group in PUSH_GROUPS]
    )
    assert np.array_equal(trace.demand, np.abs(trace.joint_torque))
    assert trace.mvc[0] == pytest.approx([60.0, 45.0])


def test_no_recovery():
    """Test groups only lose capacity and rest while inactive."""
    model = FatigueModel(varying_profile(), {Joint.SHOULDER: 0.17, Joint.ELBOW: 0.24})
    trace = model.trace(50.0)
    push = trace.phase == "push"
    for group in MUSCLE_GROUPS:
        series = trace.group_gamma_cem[group]
        assert np.all(np.diff(series) <= 0)
    # The pull groups keep their capacity during the first push phase.
    first_push = slice(0, 201)
    for group in PULL_GROUPS:
        series = trace.group_gamma_cem[group]
        assert np.all(series[first_push] == series[0])
    # Push groups hold still while pulling.
    for group in PUSH_GROUPS:
        series = trace.group_gamma_cem[group]
        pulling = np.flatnonzero(~push[:-1] & ~push[1:])
        assert np.all(series[pulling + 1] == series[pulling])


def test_anchor_per_group():
    """Test each group starts from the posture of its first activation."""
    model = FatigueModel(varying_profile(), {Joint.SHOULDER: 0.17, Joint.ELBOW: 0.24})
    initial = model.initial_capacity
    assert initial[MuscleGroup.SHOULDER_FLEXOR] == pytest.approx(60.0)
    assert initial[MuscleGroup.ELBOW_EXTENSOR] == pytest.approx(45.0)
    assert initial[MuscleGroup.SHOULDER_EXTENSOR] == pytest.approx(60.0)
    assert initial[MuscleGroup.ELBOW_FLEXOR] == pytest.approx(45.0)


def test_fatigue_at_matches_trace():
    """Test the closed form against the dense trace on grid instants."""
    model = FatigueModel(varying_profile(), {Joint.SHOULDER: 0.17, Joint.ELBOW: 0.24})
    trace = model.trace(100.0)
    for index in (0, 1, 137, 200, 499, 500, 4321, 10000):
        capacity = model.fatigue_at(float(trace.t[index]))
        for group in MUSCLE_GROUPS:
            assert capacity[group] == pytest.approx(
                trace.group_gamma_cem[group][index], rel=1e-12
            )


def test_fast_forward_matches_stepwise():
    """Test cycle fast-forward against stepping sample by sample for 100 cycles."""
    model = FatigueModel(varying_profile(), {Joint.SHOULDER: 1.7, Joint.ELBOW: 2.4})
    trace = model.trace(500.0)
    stepped = integrate_stepwise(model, 500.0)
    for group in MUSCLE_GROUPS:
        deviation = np.abs(trace.group_gamma_cem[group] - stepped[group])
        assert np.max(deviation / stepped[group]) < 1e-9
    assert integrate_stepwise(model, 0.0)[MuscleGroup.ELBOW_FLEXOR].size == 0


def test_empty_trace():
    """Test a zero horizon."""
    model = FatigueModel(constant_profile(0.5), K)
    trace = simulate(model.profile, K, 0.0)
    assert len(trace) == 0
    assert trace.theta.shape == (0, 2)
    assert trace.initial_capacity == model.initial_capacity
    assert detect_risk_crossing(trace) == {Joint.SHOULDER: None, Joint.ELBOW: None}
    assert model.group_crossings(0.0) == {group: None for group in MUSCLE_GROUPS}


def test_static_modes_on_constant_posture():
    """Test static capacity policies reduce to the quasi-static model."""
    profile = constant_profile(0.4)
    quasi = simulate(profile, K, 30.0)
    for policy in (FatigueMode.STATIC_MIN_MVC, FatigueMode.STATIC_MAX_MVC):
        static = simulate_static_mode(profile, K, 30.0, policy)
        assert static.mode is policy
        assert np.array_equal(static.gamma_cem, quasi.gamma_cem)
    with pytest.raises(FatigueSimulatorException):
        simulate_static_mode(profile, K, 30.0, FatigueMode.QUASISTATIC)


def test_static_modes_bound_quasistatic():
    """Test minimum capacity fatigues faster and maximum capacity slower."""
    profile = varying_profile()
    k = {Joint.SHOULDER: 2.0, Joint.ELBOW: 3.0}
    quasi = FatigueModel(profile, k)
    low = FatigueModel(profile, k, FatigueMode.STATIC_MIN_MVC)
    high = FatigueModel(profile, k, FatigueMode.STATIC_MAX_MVC)
    for group in MUSCLE_GROUPS:
        assert low.increments[group] >= quasi.increments[group]
        assert high.increments[group] <= quasi.increments[group]
    low_trace, quasi_trace = low.trace(200.0), quasi.trace(200.0)
    assert np.all(low_trace.gamma_cem <= quasi_trace.gamma_cem + 1e-12)
    quasi_crossing = quasi.risk_crossings(600.0)[Joint.ELBOW]
    assert low.risk_crossings(600.0)[Joint.ELBOW] <= quasi_crossing
    high_crossing = high.risk_crossings(600.0)[Joint.ELBOW]
    assert high_crossing is None or high_crossing >= quasi_crossing


def test_static_fixed():
    """Test fixed capacities per group."""
    profile = constant_profile(0.5)
    fixed = {group: 200.0 for group in MUSCLE_GROUPS}
    model = FatigueModel(profile, K, FatigueMode.STATIC_FIXED, fixed)
    assert model.initial_capacity == {group: 200.0 for group in MUSCLE_GROUPS}
    for group in MUSCLE_GROUPS:
        assert model.increments[group] == pytest.approx(0.24 / 60 * 0.25 * 5.0)
    del fixed[MuscleGroup.ELBOW_FLEXOR]
    with pytest.raises(FatigueSimulatorException):
        FatigueModel(profile, K, FatigueMode.STATIC_FIXED, fixed)


def test_zero_capacity():
    """Test capacity must be positive on active samples."""
    with pytest.raises(ZeroCapacity):
        FatigueModel(constant_profile(0.5, capacity=0.0), K)


def test_demand_sign_warning(caplog):
    """Test net torque opposing the working group is reported."""
    profile = constant_profile(0.5)
    push = profile.samples[Phase.PUSH]
    flipped = PhaseSamples(
        Phase.PUSH, push.t, push.theta, -push.joint_torque, push.capacity
    )
    samples = {Phase.PUSH: flipped, Phase.PULL: profile.samples[Phase.PULL]}
    profile = CycleProfile(profile.schedule, profile.dt, samples)
    with caplog.at_level(logging.WARNING):
        model = FatigueModel(profile, K)
    fractions = model.demand_sign_fractions
    assert fractions[MuscleGroup.SHOULDER_FLEXOR] == 1.0
    assert fractions[MuscleGroup.ELBOW_FLEXOR] == 0.0
    assert "opposes shoulder_flexor" in caplog.text
    # Demand is attributed to the phase's group regardless of sign.
    assert model.increments == FatigueModel(constant_profile(0.5), K).increments


def test_muscle_group_state():
    """Test stepping one group."""
    state = MuscleGroupState(MuscleGroup.ELBOW_FLEXOR, 50.0)
    assert state.gamma_cem == 50.0
    state.advance(0.01, 0.03, 0.5)
    assert state.accumulated_exponent == pytest.approx(0.01)
    assert state.active_time == 0.5
    assert state.gamma_cem == pytest.approx(50.0 * math.exp(-0.01))
    with pytest.raises(FatigueSimulatorException):
        state.advance(-0.01, -0.01, 0.5)
    with pytest.raises(ZeroCapacity):
        MuscleGroupState(MuscleGroup.ELBOW_FLEXOR, 0.0)


def test_model_accessors():
    """Test per-group arrays of the model."""
    profile = varying_profile()
    model = FatigueModel(profile, {Joint.SHOULDER: 0.17, Joint.ELBOW: 0.24})
    assert model.profile is profile
    assert model.mode is FatigueMode.QUASISTATIC
    group = MuscleGroup.ELBOW_FLEXOR
    assert model.capacity(group).shape == (301,)
    assert model.integrand(group).shape == (301,)
    assert model.partial(group)[0] == 0.0
    assert model.partial(group)[-1] == model.increments[group]
