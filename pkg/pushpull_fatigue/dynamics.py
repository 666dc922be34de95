"""
Arm dynamics.

Inertial model of the two-link arm derived from stature and body mass,
Lagrangian inverse dynamics M(theta) theta'' + C(theta, theta') theta' + G(theta),
and the joint torques caused by a force at the hand. The tool is a point mass
at the hand. Positive torques act in flexion at both joints.
"""
import logging
from dataclasses import dataclass, replace
from typing import Mapping, NamedTuple, Optional

import numpy as np

from .consts import (
    BODY_MASS_RANGE,
    FOREARM_HAND_COM_FRACTION,
    FOREARM_HAND_GYRATION_FRACTION,
    FOREARM_HAND_LENGTH_FRACTION,
    FOREARM_HAND_MASS_FRACTION,
    GRAVITY,
    STATURE_RANGE,
    UPPER_ARM_COM_FRACTION,
    UPPER_ARM_GYRATION_FRACTION,
    UPPER_ARM_LENGTH_FRACTION,
    UPPER_ARM_MASS_FRACTION,
    ElbowBranch,
    ForceConvention,
    Phase,
)
from .exceptions import FatigueSimulatorException, OutOfRangeAnthropometry
from .kinematics import (
    ArmGeometry,
    JointState,
    JointTrajectory,
    _jacobian_arrays,
    jacobian,
)

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class SegmentParams:
    """Inertial parameters of one rigid segment."""

    mass: float
    com_distance: float
    inertia_com: float
    length: float

    def __post_init__(self) -> None:
        """Validate segment parameters."""
        if not (
            self.mass > 0
            and self.com_distance > 0
            and self.inertia_com > 0
            and self.length > 0
        ):
            raise FatigueSimulatorException(
                f"Segment parameters must be positive: {self}"
            )
        if self.com_distance > self.length:
            raise FatigueSimulatorException(
                f"Centre of mass {self.com_distance} m beyond "
                f"segment length {self.length} m"
            )

    @classmethod
    def from_fractions(
        cls,
        length: float,
        mass: float,
        com_fraction: float,
        gyration_fraction: float,
    ) -> "SegmentParams":
        """Build a segment from its length, mass and regression fractions."""
        return cls(
            mass=mass,
            com_distance=com_fraction * length,
            inertia_com=mass * (gyration_fraction * length) ** 2,
            length=length,
        )


@dataclass(frozen=True)
class ArmInertialModel:
    """Segments, tool and gravity of the arm."""

    upper_arm: SegmentParams
    forearm_hand: SegmentParams
    tool_mass: float = 0.0
    gravity: float = GRAVITY

    def __post_init__(self) -> None:
        """Validate tool mass."""
        if self.tool_mass < 0:
            raise FatigueSimulatorException(
                f"Tool mass must not be negative, got {self.tool_mass}"
            )

    def geometry(
        self, elbow_branch: ElbowBranch = ElbowBranch.ELBOW_DOWN
    ) -> ArmGeometry:
        """Return the arm geometry matching the segment lengths."""
        return ArmGeometry(
            self.upper_arm.length, self.forearm_hand.length, elbow_branch
        )

    def with_tool(self, tool_mass: float) -> "ArmInertialModel":
        """Return a copy carrying the given tool mass."""
        return replace(self, tool_mass=tool_mass)


@dataclass(frozen=True)
class LoadSpec:
    """Process force magnitudes at the hand."""

    push_force: float
    pull_force: float

    def __post_init__(self) -> None:
        """Validate force magnitudes."""
        if self.push_force < 0 or self.pull_force < 0:
            raise FatigueSimulatorException(
                f"Force magnitudes must not be negative: {self}"
            )


class _Lumped(NamedTuple):
    """Lumped inertial constants of the planar two-link chain."""

    a1: float
    a2: float
    a3: float
    b1: float
    b2: float


def _lumped(model: ArmInertialModel) -> _Lumped:
    upper, fore = model.upper_arm, model.forearm_hand
    distal_mass = fore.mass + model.tool_mass
    # First and second moments of forearm + tool about the elbow.
    first_moment = fore.mass * fore.com_distance + model.tool_mass * fore.length
    elbow_inertia = (
        fore.inertia_com
        + fore.mass * fore.com_distance**2
        + model.tool_mass * fore.length**2
    )
    return _Lumped(
        a1=upper.inertia_com
        + upper.mass * upper.com_distance**2
        + distal_mass * upper.length**2,
        a2=elbow_inertia,
        a3=upper.length * first_moment,
        b1=model.gravity
        * (upper.mass * upper.com_distance + distal_mass * upper.length),
        b2=model.gravity * first_moment,
    )


def derive_anthropometry(
    stature: float,
    body_mass: float,
    tool_mass: float = 0.0,
    gravity: float = GRAVITY,
    overrides: Optional[Mapping[str, Mapping[str, float]]] = None,
) -> ArmInertialModel:
    """Return the arm model from body-segment regression fractions.

    overrides maps "upper_arm" / "forearm_hand" to replacement SegmentParams
    field values.
    """
    if not STATURE_RANGE[0] <= stature <= STATURE_RANGE[1]:
        raise OutOfRangeAnthropometry(
            f"Stature {stature} m outside {list(STATURE_RANGE)} m"
        )
    if not BODY_MASS_RANGE[0] <= body_mass <= BODY_MASS_RANGE[1]:
        raise OutOfRangeAnthropometry(
            f"Body mass {body_mass} kg outside {list(BODY_MASS_RANGE)} kg"
        )
    upper_arm = SegmentParams.from_fractions(
        UPPER_ARM_LENGTH_FRACTION * stature,
        UPPER_ARM_MASS_FRACTION * body_mass,
        UPPER_ARM_COM_FRACTION,
        UPPER_ARM_GYRATION_FRACTION,
    )
    forearm_hand = SegmentParams.from_fractions(
        FOREARM_HAND_LENGTH_FRACTION * stature,
        FOREARM_HAND_MASS_FRACTION * body_mass,
        FOREARM_HAND_COM_FRACTION,
        FOREARM_HAND_GYRATION_FRACTION,
    )
    if overrides:
        if "upper_arm" in overrides:
            upper_arm = replace(upper_arm, **overrides["upper_arm"])
        if "forearm_hand" in overrides:
            forearm_hand = replace(forearm_hand, **overrides["forearm_hand"])
    model = ArmInertialModel(upper_arm, forearm_hand, tool_mass, gravity)
    _LOGGER.debug("Anthropometry for %s m, %s kg: %s", stature, body_mass, model)
    return model


def mass_matrix(model: ArmInertialModel, theta) -> np.ndarray:
    """Return the joint-space mass matrix M(theta)."""
    c = _lumped(model)
    cos_e = np.cos(np.asarray(theta, dtype=float)[..., 1])
    m11 = c.a1 + c.a2 + 2 * c.a3 * cos_e
    m12 = c.a2 + c.a3 * cos_e
    m22 = np.full_like(cos_e, c.a2)
    return np.stack([np.stack([m11, m12], -1), np.stack([m12, m22], -1)], -2)


def mass_matrix_derivative(model: ArmInertialModel, theta, dtheta) -> np.ndarray:
    """Return dM/dt along the motion."""
    c = _lumped(model)
    theta, dtheta = np.asarray(theta, dtype=float), np.asarray(dtheta, dtype=float)
    rate = -c.a3 * np.sin(theta[..., 1]) * dtheta[..., 1]
    zero = np.zeros_like(rate)
    return np.stack([np.stack([2 * rate, rate], -1), np.stack([rate, zero], -1)], -2)


def coriolis_matrix(model: ArmInertialModel, theta, dtheta) -> np.ndarray:
    """Return C(theta, dtheta) with C(theta, dtheta) dtheta the velocity torques."""
    c = _lumped(model)
    theta, dtheta = np.asarray(theta, dtype=float), np.asarray(dtheta, dtype=float)
    h = c.a3 * np.sin(theta[..., 1])
    rate_s, rate_e = dtheta[..., 0], dtheta[..., 1]
    return np.stack(
        [
            np.stack([-h * rate_e, -h * (rate_s + rate_e)], -1),
            np.stack([h * rate_s, np.zeros_like(h)], -1),
        ],
        -2,
    )


def gravity_torque(model: ArmInertialModel, theta) -> np.ndarray:
    """Return G(theta), the joint torques holding the arm against gravity."""
    c = _lumped(model)
    theta = np.asarray(theta, dtype=float)
    forearm = c.b2 * np.sin(theta[..., 0] + theta[..., 1])
    return np.stack([c.b1 * np.sin(theta[..., 0]) + forearm, forearm], -1)


def kinetic_energy(model: ArmInertialModel, theta, dtheta) -> np.ndarray:
    """Return the kinetic energy of arm and tool."""
    dtheta = np.asarray(dtheta, dtype=float)
    return 0.5 * np.einsum(
        "...i,...ij,...j->...", dtheta, mass_matrix(model, theta), dtheta
    )


def potential_energy(model: ArmInertialModel, theta) -> np.ndarray:
    """Return the gravitational potential energy relative to the shoulder height."""
    c = _lumped(model)
    theta = np.asarray(theta, dtype=float)
    return -c.b1 * np.cos(theta[..., 0]) - c.b2 * np.cos(theta[..., 0] + theta[..., 1])


def _inverse_dynamics_arrays(
    model: ArmInertialModel, theta, dtheta, ddtheta
) -> np.ndarray:
    c = _lumped(model)
    sin_e = np.sin(theta[..., 1])
    rate_s, rate_e = dtheta[..., 0], dtheta[..., 1]
    inertial = np.einsum("...ij,...j->...i", mass_matrix(model, theta), ddtheta)
    velocity = np.stack(
        [
            -c.a3 * sin_e * (2 * rate_s * rate_e + rate_e**2),
            c.a3 * sin_e * rate_s**2,
        ],
        -1,
    )
    return inertial + velocity + gravity_torque(model, theta)


def inverse_dynamics(
    model: ArmInertialModel, geom: ArmGeometry, state: JointState
) -> np.ndarray:
    """Return the body torques d/dt(dL/dtheta') - dL/dtheta at one joint state."""
    return _inverse_dynamics_arrays(model, state.theta, state.dtheta, state.ddtheta)


def external_joint_torque(geom: ArmGeometry, theta, f_hand) -> np.ndarray:
    """Return J^T f_hand for the force f_hand the hand applies to the environment.

    Holding the environment against f_hand costs the joints +J^T f_hand on top of
    the body torques, so a push exerting +x enters as +x.
    """
    theta = np.asarray(theta, dtype=float)
    return jacobian(geom, theta[0], theta[1]).T @ np.asarray(f_hand, dtype=float)


def hand_force(
    phase: Phase,
    loads: LoadSpec,
    convention: ForceConvention = ForceConvention.EXERTED_BY_HAND,
) -> np.ndarray:
    """Return the hand force vector entering external_joint_torque for a phase.

    Pushes act along +x and pulls along -x. With REACTION_ON_HAND the magnitudes
    describe the environment's reaction and the exerted force is reversed.
    """
    if phase is Phase.PUSH:
        force = np.array([loads.push_force, 0.0])
    else:
        force = np.array([-loads.pull_force, 0.0])
    if convention is ForceConvention.REACTION_ON_HAND:
        return -force
    return force


def total_joint_torque(
    model: ArmInertialModel, geom: ArmGeometry, state: JointState, f_hand
) -> np.ndarray:
    """Return the demanded joint torques: body motion plus external load."""
    return inverse_dynamics(model, geom, state) + external_joint_torque(
        geom, state.theta, f_hand
    )


def trajectory_torques(
    model: ArmInertialModel, geom: ArmGeometry, trajectory: JointTrajectory, f_hand
) -> np.ndarray:
    """Return total_joint_torque for every sample of a joint trajectory."""
    body = _inverse_dynamics_arrays(
        model, trajectory.theta, trajectory.dtheta, trajectory.ddtheta
    )
    jac = _jacobian_arrays(geom, trajectory.theta[:, 0], trajectory.theta[:, 1])
    external = np.einsum("nji,j->ni", jac, np.asarray(f_hand, dtype=float))
    return body + external
