"""
Arm kinematics.

Planar two-link arm (shoulder + elbow) moving in the sagittal plane, x forward
and z up, with the shoulder fixed at the origin. The shoulder angle is measured
from the downward vertical and is positive forward; the elbow angle is zero at
full extension and positive in flexion.
"""
import logging
import math
from dataclasses import dataclass
from typing import Iterator, List, NamedTuple, Tuple

import numpy as np

from .consts import (
    DEFAULT_DT,
    LEG_REACH_MARGIN,
    REACH_TOLERANCE,
    SINGULAR_TOLERANCE,
    BlendProfile,
    ElbowBranch,
)
from .exceptions import (
    FatigueSimulatorException,
    SingularTrajectory,
    TimeOutOfRange,
    UnreachableTarget,
)
from .utils import steps_in

_LOGGER = logging.getLogger(__name__)

Point = Tuple[float, float]


@dataclass(frozen=True)
class ArmGeometry:
    """Segment lengths and IK branch of the arm."""

    upper_arm_length: float
    forearm_hand_length: float
    elbow_branch: ElbowBranch = ElbowBranch.ELBOW_DOWN

    def __post_init__(self) -> None:
        """Validate segment lengths."""
        if not (self.upper_arm_length > 0 and self.forearm_hand_length > 0):
            raise FatigueSimulatorException(
                "Segment lengths must be positive, got {} and {}".format(
                    self.upper_arm_length, self.forearm_hand_length
                )
            )

    @property
    def shoulder_origin(self) -> Point:
        """Return the fixed shoulder position."""
        return 0.0, 0.0

    @property
    def max_reach(self) -> float:
        """Return the outer radius of the reachable annulus."""
        return self.upper_arm_length + self.forearm_hand_length

    @property
    def min_reach(self) -> float:
        """Return the inner radius of the reachable annulus."""
        return abs(self.upper_arm_length - self.forearm_hand_length)

    def is_reachable(self, point: Point, margin: float = REACH_TOLERANCE) -> bool:
        """Return True if the point lies inside the annulus shrunk by margin."""
        radius = math.hypot(point[0], point[1])
        return self.min_reach + margin <= radius <= self.max_reach - margin

    def path_clearance(self, start: Point, end: Point) -> float:
        """Return the smallest distance from the shoulder to the segment start-end."""
        dx, dz = end[0] - start[0], end[1] - start[1]
        length_sq = dx * dx + dz * dz
        u = 0.0
        if length_sq > 0:
            u = min(1.0, max(0.0, -(start[0] * dx + start[1] * dz) / length_sq))
        return math.hypot(start[0] + u * dx, start[1] + u * dz)


@dataclass(frozen=True)
class JointState:
    """Joint angles, rates and accelerations at one instant."""

    theta_s: float
    theta_e: float
    dtheta_s: float = 0.0
    dtheta_e: float = 0.0
    ddtheta_s: float = 0.0
    ddtheta_e: float = 0.0
    t: float = 0.0

    def __post_init__(self) -> None:
        """Reject non-finite values."""
        values = (
            self.theta_s,
            self.theta_e,
            self.dtheta_s,
            self.dtheta_e,
            self.ddtheta_s,
            self.ddtheta_e,
            self.t,
        )
        if not all(math.isfinite(value) for value in values):
            raise FatigueSimulatorException(f"Non-finite joint state {values}")

    @property
    def theta(self) -> np.ndarray:
        """Return the joint angles."""
        return np.array([self.theta_s, self.theta_e])

    @property
    def dtheta(self) -> np.ndarray:
        """Return the joint angular velocities."""
        return np.array([self.dtheta_s, self.dtheta_e])

    @property
    def ddtheta(self) -> np.ndarray:
        """Return the joint angular accelerations."""
        return np.array([self.ddtheta_s, self.ddtheta_e])


@dataclass(frozen=True, eq=False)
class CartesianState:
    """Hand position, velocity and acceleration in the sagittal plane."""

    position: np.ndarray
    velocity: np.ndarray
    acceleration: np.ndarray


@dataclass(frozen=True)
class TrajectoryLeg:
    """Straight hand movement from start to end within duration."""

    start: Point
    end: Point
    duration: float
    blend: BlendProfile = BlendProfile.CUBIC

    def __post_init__(self) -> None:
        """Normalise endpoints and check the duration."""
        object.__setattr__(self, "start", (float(self.start[0]), float(self.start[1])))
        object.__setattr__(self, "end", (float(self.end[0]), float(self.end[1])))
        if not self.duration > 0:
            raise FatigueSimulatorException(
                f"Leg duration must be positive, got {self.duration}"
            )

    def reversed(self) -> "TrajectoryLeg":
        """Return the same movement travelled backwards."""
        return TrajectoryLeg(self.end, self.start, self.duration, self.blend)


class ArmPosition(NamedTuple):
    """Elbow and hand positions."""

    elbow_position: np.ndarray
    hand_position: np.ndarray


class JointAngles(NamedTuple):
    """Inverse kinematics solution."""

    theta_s: float
    theta_e: float
    singular: bool = False


class DHRow(NamedTuple):
    """Modified Denavit-Hartenberg row; theta_offset is added to the joint angle."""

    alpha: float
    d: float
    theta_offset: float
    r: float


@dataclass(frozen=True, eq=False)
class JointTrajectory:
    """Joint-space samples of one leg, indexable as a sequence of JointState."""

    t: np.ndarray
    theta: np.ndarray
    dtheta: np.ndarray
    ddtheta: np.ndarray

    def __len__(self) -> int:
        """Return the number of samples."""
        return len(self.t)

    def __getitem__(self, index: int) -> JointState:
        """Return one sample."""
        return JointState(
            theta_s=float(self.theta[index, 0]),
            theta_e=float(self.theta[index, 1]),
            dtheta_s=float(self.dtheta[index, 0]),
            dtheta_e=float(self.dtheta[index, 1]),
            ddtheta_s=float(self.ddtheta[index, 0]),
            ddtheta_e=float(self.ddtheta[index, 1]),
            t=float(self.t[index]),
        )

    def __iter__(self) -> Iterator[JointState]:
        """Iterate over samples."""
        for index in range(len(self)):
            yield self[index]


def dh_table(geom: ArmGeometry) -> Tuple[DHRow, ...]:
    """Return the DH rows of shoulder, elbow and hand frames."""
    return (
        DHRow(alpha=math.pi / 2, d=0.0, theta_offset=-math.pi / 2, r=0.0),
        DHRow(alpha=0.0, d=geom.upper_arm_length, theta_offset=0.0, r=0.0),
        DHRow(alpha=0.0, d=geom.forearm_hand_length, theta_offset=0.0, r=0.0),
    )


def dh_transform(alpha: float, d: float, theta: float, r: float) -> np.ndarray:
    """Return Rot(x, alpha) Trans(x, d) Rot(z, theta) Trans(z, r)."""
    ca, sa = math.cos(alpha), math.sin(alpha)
    ct, st = math.cos(theta), math.sin(theta)
    return np.array(
        [
            [ct, -st, 0.0, d],
            [ca * st, ca * ct, -sa, -r * sa],
            [sa * st, sa * ct, ca, r * ca],
            [0.0, 0.0, 0.0, 1.0],
        ]
    )


def dh_forward_kinematics(
    geom: ArmGeometry, theta_s: float, theta_e: float
) -> List[np.ndarray]:
    """Return base-frame transforms of the shoulder, elbow and hand frames."""
    frames = []
    transform = np.eye(4)
    for row, angle in zip(dh_table(geom), (theta_s, theta_e, 0.0)):
        transform = transform @ dh_transform(
            row.alpha, row.d, angle + row.theta_offset, row.r
        )
        frames.append(transform)
    return frames


def forward_kinematics(
    geom: ArmGeometry, theta_s: float, theta_e: float
) -> ArmPosition:
    """Return elbow and hand positions for the given joint angles."""
    forearm_angle = theta_s + theta_e
    elbow = geom.upper_arm_length * np.array([math.sin(theta_s), -math.cos(theta_s)])
    hand = elbow + geom.forearm_hand_length * np.array(
        [math.sin(forearm_angle), -math.cos(forearm_angle)]
    )
    return ArmPosition(elbow, hand)


def _wrap(angle):
    """Wrap angles to [-pi, pi)."""
    return (angle + np.pi) % (2 * np.pi) - np.pi


def _solve_ik(geom: ArmGeometry, x: np.ndarray, z: np.ndarray):
    """Solve the planar IK for arrays of hand targets."""
    l1, l2 = geom.upper_arm_length, geom.forearm_hand_length
    radius = np.hypot(x, z)
    outside = (radius < geom.min_reach + REACH_TOLERANCE) | (
        radius > geom.max_reach - REACH_TOLERANCE
    )
    if np.any(outside):
        index = int(np.argmax(outside))
        raise UnreachableTarget(
            "Target ({}, {}) at distance {:.6f} m is outside [{:.6f}, {:.6f}] m".format(
                float(x[index]),
                float(z[index]),
                float(radius[index]),
                geom.min_reach,
                geom.max_reach,
            )
        )
    cos_elbow = np.clip((radius**2 - l1**2 - l2**2) / (2 * l1 * l2), -1.0, 1.0)
    theta_e = np.arccos(cos_elbow)
    if geom.elbow_branch is ElbowBranch.ELBOW_UP:
        theta_e = -theta_e
    # Upper arm bearing from +x, then shifted to the downward vertical.
    bearing = np.arctan2(z, x) - np.arctan2(
        l2 * np.sin(theta_e), l1 + l2 * np.cos(theta_e)
    )
    theta_s = _wrap(bearing + np.pi / 2)
    singular = np.abs(np.sin(theta_e)) < SINGULAR_TOLERANCE
    return theta_s, theta_e, singular


def inverse_kinematics(geom: ArmGeometry, point: Point) -> JointAngles:
    """Return the joint angles placing the hand at point on the configured branch."""
    theta_s, theta_e, singular = _solve_ik(
        geom, np.array([float(point[0])]), np.array([float(point[1])])
    )
    if singular[0]:
        _LOGGER.warning("Singular posture for target %s", point)
    return JointAngles(float(theta_s[0]), float(theta_e[0]), bool(singular[0]))


def _jacobian_arrays(geom: ArmGeometry, theta_s, theta_e) -> np.ndarray:
    """Return Jacobians stacked along the leading axes of the angles."""
    l1, l2 = geom.upper_arm_length, geom.forearm_hand_length
    forearm_angle = theta_s + theta_e
    column_e = l2 * np.stack([np.cos(forearm_angle), np.sin(forearm_angle)], axis=-1)
    column_s = l1 * np.stack([np.cos(theta_s), np.sin(theta_s)], axis=-1) + column_e
    return np.stack([column_s, column_e], axis=-1)


def jacobian(geom: ArmGeometry, theta_s: float, theta_e: float) -> np.ndarray:
    """Return d(hand position)/d(theta_s, theta_e).

    The determinant equals L1 * L2 * sin(theta_e) and vanishes at full extension.
    """
    return _jacobian_arrays(geom, np.float64(theta_s), np.float64(theta_e))


def _jacobian_derivative_arrays(geom: ArmGeometry, theta, dtheta) -> np.ndarray:
    l1, l2 = geom.upper_arm_length, geom.forearm_hand_length
    theta_s, theta_e = theta[..., 0], theta[..., 1]
    rate_s = dtheta[..., 0]
    rate_forearm = dtheta[..., 0] + dtheta[..., 1]
    forearm_angle = theta_s + theta_e
    column_e = (l2 * rate_forearm)[..., None] * np.stack(
        [-np.sin(forearm_angle), np.cos(forearm_angle)], axis=-1
    )
    column_s = (l1 * rate_s)[..., None] * np.stack(
        [-np.sin(theta_s), np.cos(theta_s)], axis=-1
    ) + column_e
    return np.stack([column_s, column_e], axis=-1)


def jacobian_derivative(
    geom: ArmGeometry, theta_s: float, theta_e: float, dtheta_s: float, dtheta_e: float
) -> np.ndarray:
    """Return the time derivative of the Jacobian."""
    return _jacobian_derivative_arrays(
        geom, np.array([theta_s, theta_e]), np.array([dtheta_s, dtheta_e])
    )


def blend(profile: BlendProfile, tau):
    """Return p, dp/dtau and d2p/dtau2 of the normalised blend at tau in [0, 1]."""
    tau = np.asarray(tau, dtype=float)
    if profile is BlendProfile.QUINTIC:
        return (
            10 * tau**3 - 15 * tau**4 + 6 * tau**5,
            30 * tau**2 - 60 * tau**3 + 30 * tau**4,
            60 * tau - 180 * tau**2 + 120 * tau**3,
        )
    return 3 * tau**2 - 2 * tau**3, 6 * tau - 6 * tau**2, 6 - 12 * tau


def sample_task_trajectory(leg: TrajectoryLeg, t: float) -> CartesianState:
    """Return the hand state at time t of the leg."""
    if t < 0 or t > leg.duration:
        raise TimeOutOfRange(f"Time {t} outside [0, {leg.duration}]")
    p, dp, ddp = blend(leg.blend, t / leg.duration)
    start = np.array(leg.start)
    delta = np.array(leg.end) - start
    return CartesianState(
        position=start + float(p) * delta,
        velocity=float(dp) / leg.duration * delta,
        acceleration=float(ddp) / leg.duration**2 * delta,
    )


def validate_leg(geom: ArmGeometry, leg: TrajectoryLeg) -> None:
    """Raise UnreachableTarget unless the whole leg keeps a margin from the annulus."""
    for point in (leg.start, leg.end):
        if not geom.is_reachable(point, LEG_REACH_MARGIN):
            raise UnreachableTarget(
                "Endpoint {} is not inside the reachable annulus "
                "[{:.4f}, {:.4f}] m with {} m margin".format(
                    point, geom.min_reach, geom.max_reach, LEG_REACH_MARGIN
                )
            )
    clearance = geom.path_clearance(leg.start, leg.end)
    if clearance < geom.min_reach + LEG_REACH_MARGIN:
        raise UnreachableTarget(
            "Path {} -> {} passes {:.4f} m from the shoulder, inside the "
            "inner reach {:.4f} m".format(leg.start, leg.end, clearance, geom.min_reach)
        )


def joint_trajectory(
    geom: ArmGeometry, leg: TrajectoryLeg, dt: float = DEFAULT_DT
) -> JointTrajectory:
    """Return joint angles, rates and accelerations sampled every dt along the leg.

    Rates come from the inverse Jacobian of the hand velocity and accelerations
    from J^-1 (hand acceleration - Jdot * rates), with Jdot in closed form.
    """
    steps = steps_in(leg.duration, dt)
    t = np.arange(steps + 1) * dt
    t[-1] = leg.duration
    p, dp, ddp = blend(leg.blend, t / leg.duration)
    start = np.array(leg.start)
    delta = np.array(leg.end) - start
    position = start + p[:, None] * delta
    velocity = (dp / leg.duration)[:, None] * delta
    acceleration = (ddp / leg.duration**2)[:, None] * delta

    theta_s, theta_e, singular = _solve_ik(geom, position[:, 0], position[:, 1])
    if np.any(singular):
        raise SingularTrajectory(
            "Leg {} -> {} passes within {} rad of full extension at t = {} s".format(
                leg.start, leg.end, SINGULAR_TOLERANCE, float(t[np.argmax(singular)])
            )
        )
    theta = np.stack([theta_s, theta_e], axis=-1)
    jac = _jacobian_arrays(geom, theta_s, theta_e)
    dtheta = np.linalg.solve(jac, velocity[..., None])[..., 0]
    jac_dot = _jacobian_derivative_arrays(geom, theta, dtheta)
    bias = np.einsum("nij,nj->ni", jac_dot, dtheta)
    ddtheta = np.linalg.solve(jac, (acceleration - bias)[..., None])[..., 0]
    _LOGGER.debug(
        "Joint trajectory %s -> %s: %d samples, dt = %s", leg.start, leg.end, len(t), dt
    )
    return JointTrajectory(t=t, theta=theta, dtheta=dtheta, ddtheta=ddtheta)
