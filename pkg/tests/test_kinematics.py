"""Test for the arm kinematics."""
import math

import numpy as np
import pytest

from pushpull_fatigue.consts import BlendProfile, ElbowBranch
from pushpull_fatigue.exceptions import (
    FatigueSimulatorException,
    GridMismatch,
    TimeOutOfRange,
    UnreachableTarget,
)
from pushpull_fatigue.kinematics import (
    ArmGeometry,
    JointState,
    TrajectoryLeg,
    blend,
    dh_forward_kinematics,
    forward_kinematics,
    inverse_kinematics,
    jacobian,
    jacobian_derivative,
    joint_trajectory,
    sample_task_trajectory,
    validate_leg,
)

GEOM = ArmGeometry(0.34968, 0.47752)


def test_geometry():
    """Test reach of the arm."""
    assert GEOM.max_reach == pytest.approx(0.8272)
    assert GEOM.min_reach == pytest.approx(0.12784)
    assert GEOM.shoulder_origin == (0.0, 0.0)
    assert GEOM.is_reachable((0.4, 0.1))
    assert not GEOM.is_reachable((1.0, 0.5))
    assert not GEOM.is_reachable((0.05, 0.0))
    assert not GEOM.is_reachable((0.827, 0.0), margin=1e-3)
    with pytest.raises(FatigueSimulatorException):
        ArmGeometry(0.0, 0.4)


def test_forward_kinematics():
    """Test hanging and horizontal arms."""
    elbow, hand = forward_kinematics(GEOM, 0.0, 0.0)
    assert elbow == pytest.approx([0.0, -0.34968])
    assert hand == pytest.approx([0.0, -0.8272])

    _, hand = forward_kinematics(GEOM, math.pi / 2, 0.0)
    assert hand == pytest.approx([0.8272, 0.0], abs=1e-12)

    # Forearm pointing forward from a hanging upper arm.
    elbow, hand = forward_kinematics(GEOM, 0.0, math.pi / 2)
    assert hand == pytest.approx([0.47752, -0.34968], abs=1e-12)


def test_dh_chain_matches_forward_kinematics():
    """Test the DH frames place elbow and hand like the closed form."""
    rng = np.random.default_rng(3)
    for theta_s, theta_e in rng.uniform(-1.0, 2.5, size=(20, 2)):
        frames = dh_forward_kinematics(GEOM, theta_s, theta_e)
        elbow, hand = forward_kinematics(GEOM, theta_s, theta_e)
        assert [frames[1][0, 3], frames[1][2, 3]] == pytest.approx(elbow, abs=1e-12)
        assert [frames[2][0, 3], frames[2][2, 3]] == pytest.approx(hand, abs=1e-12)
        # Motion stays in the sagittal plane.
        assert frames[2][1, 3] == pytest.approx(0.0, abs=1e-12)


def test_inverse_kinematics():
    """Test the Task 1 start posture."""
    angles = inverse_kinematics(GEOM, (0.4, 0.1))
    assert not angles.singular
    assert math.degrees(angles.theta_e) == pytest.approx(122.68, abs=0.05)
    assert math.degrees(angles.theta_s) == pytest.approx(26.9, abs=0.1)
    _, hand = forward_kinematics(GEOM, angles.theta_s, angles.theta_e)
    assert hand == pytest.approx([0.4, 0.1], abs=1e-12)


def test_inverse_kinematics_branches():
    """Test both solution branches reach the target."""
    up = ArmGeometry(0.34968, 0.47752, ElbowBranch.ELBOW_UP)
    down_angles = inverse_kinematics(GEOM, (0.5, -0.2))
    up_angles = inverse_kinematics(up, (0.5, -0.2))
    assert down_angles.theta_e > 0
    assert up_angles.theta_e == pytest.approx(-down_angles.theta_e)
    for geom, angles in ((GEOM, down_angles), (up, up_angles)):
        _, hand = forward_kinematics(geom, angles.theta_s, angles.theta_e)
        assert hand == pytest.approx([0.5, -0.2], abs=1e-12)


@pytest.mark.parametrize("branch", list(ElbowBranch))
def test_forward_inverse_roundtrip(branch):
    """Test FK after IK on random reachable targets."""
    geom = ArmGeometry(0.34968, 0.47752, branch)
    rng = np.random.default_rng(7)
    radius = rng.uniform(geom.min_reach + 1e-3, geom.max_reach - 1e-3, 10000)
    bearing = rng.uniform(-math.pi, math.pi, 10000)
    worst = 0.0
    for r, b in zip(radius, bearing):
        target = (r * math.cos(b), r * math.sin(b))
        angles = inverse_kinematics(geom, target)
        _, hand = forward_kinematics(geom, angles.theta_s, angles.theta_e)
        worst = max(worst, math.hypot(hand[0] - target[0], hand[1] - target[1]))
    assert worst < 1e-9


def test_inverse_kinematics_unreachable():
    """Test targets outside the annulus."""
    with pytest.raises(UnreachableTarget):
        inverse_kinematics(GEOM, (1.0, 0.5))
    with pytest.raises(UnreachableTarget):
        inverse_kinematics(GEOM, (0.1, 0.0))


def test_jacobian_finite_differences():
    """Test the Jacobian against central differences of FK."""
    step = 1e-6
    rng = np.random.default_rng(11)
    for theta_s, theta_e in rng.uniform(-0.5, 2.5, size=(1000, 2)):
        jac = jacobian(GEOM, theta_s, theta_e)
        numeric = np.empty((2, 2))
        for column, delta in enumerate(((step, 0.0), (0.0, step))):
            plus = forward_kinematics(GEOM, theta_s + delta[0], theta_e + delta[1])
            minus = forward_kinematics(GEOM, theta_s - delta[0], theta_e - delta[1])
            numeric[:, column] = (plus.hand_position - minus.hand_position) / (
                2 * step
            )
        assert np.max(np.abs(jac - numeric)) < 1e-6 * np.max(np.abs(jac))
        assert np.linalg.det(jac) == pytest.approx(
            0.34968 * 0.47752 * math.sin(theta_e), abs=1e-12
        )


def test_jacobian_derivative():
    """Test Jdot against the change of J along the motion."""
    theta = np.array([0.4, 1.9])
    rate = np.array([0.3, -0.7])
    step = 1e-6
    numeric = (
        jacobian(GEOM, *(theta + step * rate)) - jacobian(GEOM, *(theta - step * rate))
    ) / (2 * step)
    analytic = jacobian_derivative(GEOM, theta[0], theta[1], rate[0], rate[1])
    assert analytic == pytest.approx(numeric, abs=1e-8)


@pytest.mark.parametrize("profile", list(BlendProfile))
def test_blend(profile):
    """Test blend boundary values and monotonicity."""
    p, dp, _ = blend(profile, np.array([0.0, 0.5, 1.0]))
    assert p == pytest.approx([0.0, 0.5, 1.0])
    assert dp[0] == 0.0
    assert dp[2] == pytest.approx(0.0, abs=1e-12)
    p, _, _ = blend(profile, np.linspace(0.0, 1.0, 101))
    assert np.all(np.diff(p) >= 0)


def test_quintic_blend_rest_to_rest():
    """Test the quintic blend starts and ends without acceleration."""
    _, _, ddp = blend(BlendProfile.QUINTIC, np.array([0.0, 1.0]))
    assert ddp == pytest.approx([0.0, 0.0], abs=1e-12)
    _, _, ddp = blend(BlendProfile.CUBIC, np.array([0.0, 1.0]))
    assert ddp == pytest.approx([6.0, -6.0])


def test_sample_task_trajectory():
    """Test hand states along a leg."""
    leg = TrajectoryLeg((0.4, 0.1), (0.6, 0.1), 5.0)
    start = sample_task_trajectory(leg, 0.0)
    assert start.position == pytest.approx([0.4, 0.1])
    assert start.velocity == pytest.approx([0.0, 0.0])
    middle = sample_task_trajectory(leg, 2.5)
    assert middle.position == pytest.approx([0.5, 0.1])
    # Peak speed of the cubic blend is 1.5 times the mean speed.
    assert middle.velocity == pytest.approx([1.5 * 0.2 / 5.0, 0.0])
    end = sample_task_trajectory(leg, 5.0)
    assert end.position == pytest.approx([0.6, 0.1])
    with pytest.raises(TimeOutOfRange):
        sample_task_trajectory(leg, -0.1)
    with pytest.raises(TimeOutOfRange):
        sample_task_trajectory(leg, 5.1)


def test_trajectory_leg():
    """Test leg validation and reversal."""
    leg = TrajectoryLeg((0.4, 0.1), (0.6, 0.1), 5.0, BlendProfile.QUINTIC)
    back = leg.reversed()
    assert back.start == (0.6, 0.1)
    assert back.end == (0.4, 0.1)
    assert back.blend is BlendProfile.QUINTIC
    assert TrajectoryLeg([0.4, 0.1], [0.6, 0.1], 5.0) == TrajectoryLeg(
        (0.4, 0.1), (0.6, 0.1), 5.0
    )
    with pytest.raises(FatigueSimulatorException):
        TrajectoryLeg((0.4, 0.1), (0.6, 0.1), 0.0)
    validate_leg(GEOM, leg)
    with pytest.raises(UnreachableTarget):
        validate_leg(GEOM, TrajectoryLeg((0.4, 0.1), (1.0, 0.5), 5.0))
    # Both endpoints are reachable but the straight path cuts the inner disc.
    assert GEOM.path_clearance((0.15, 0.05), (-0.15, 0.05)) == pytest.approx(0.05)
    assert GEOM.path_clearance((0.4, 0.1), (0.6, 0.1)) == pytest.approx(
        math.hypot(0.4, 0.1)
    )
    with pytest.raises(UnreachableTarget):
        validate_leg(GEOM, TrajectoryLeg((0.15, 0.05), (-0.15, 0.05), 5.0))


def test_joint_trajectory():
    """Test joint samples along the Task 1 push leg."""
    leg = TrajectoryLeg((0.4, 0.1), (0.6, 0.1), 5.0)
    trajectory = joint_trajectory(GEOM, leg, 0.01)
    assert len(trajectory) == 501
    assert trajectory.t[0] == 0.0
    assert trajectory.t[-1] == 5.0

    start = inverse_kinematics(GEOM, leg.start)
    assert trajectory.theta[0] == pytest.approx([start.theta_s, start.theta_e])
    for state in (trajectory[0], trajectory[-1]):
        assert isinstance(state, JointState)
        assert state.dtheta == pytest.approx([0.0, 0.0], abs=1e-9)

    # The hand stays on the straight line.
    for state in trajectory:
        _, hand = forward_kinematics(GEOM, state.theta_s, state.theta_e)
        assert hand[1] == pytest.approx(0.1, abs=1e-9)

    # Rates and accelerations match differences of the samples.
    rates = np.gradient(trajectory.theta, trajectory.t, axis=0)
    assert trajectory.dtheta[1:-1] == pytest.approx(rates[1:-1], abs=1e-4)
    accelerations = np.gradient(trajectory.dtheta, trajectory.t, axis=0)
    assert trajectory.ddtheta[1:-1] == pytest.approx(accelerations[1:-1], abs=1e-4)


def test_joint_trajectory_quintic_endpoints():
    """Test rest-to-rest endpoints of a quintic leg."""
    leg = TrajectoryLeg((0.4, 0.1), (0.6, 0.1), 5.0, BlendProfile.QUINTIC)
    trajectory = joint_trajectory(GEOM, leg, 0.01)
    for index in (0, -1):
        assert trajectory.dtheta[index] == pytest.approx([0.0, 0.0], abs=1e-9)
        assert trajectory.ddtheta[index] == pytest.approx([0.0, 0.0], abs=1e-9)


def test_joint_trajectory_errors():
    """Test grid and reach errors."""
    with pytest.raises(GridMismatch):
        joint_trajectory(GEOM, TrajectoryLeg((0.4, 0.1), (0.6, 0.1), 5.0), 0.03)
    with pytest.raises(UnreachableTarget):
        joint_trajectory(GEOM, TrajectoryLeg((0.4, 0.1), (1.0, 0.5), 5.0), 0.01)


def test_joint_state():
    """Test joint state vectors."""
    state = JointState(0.1, 0.2, 0.3, 0.4, 0.5, 0.6, t=1.0)
    assert state.theta == pytest.approx([0.1, 0.2])
    assert state.dtheta == pytest.approx([0.3, 0.4])
    assert state.ddtheta == pytest.approx([0.5, 0.6])
    with pytest.raises(FatigueSimulatorException):
        JointState(float("nan"), 0.0)
