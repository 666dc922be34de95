"""
Push/pull task.

Operator and task descriptions, and the pipeline turning them into one
sampled cycle: hand path, joint motion, joint torques and capacities.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional

import numpy as np

from .capacity import DEFAULT_COEFFICIENTS, CapacityCoefficients, phase_capacity
from .consts import (
    DEFAULT_DT,
    DEFAULT_K_ELBOW,
    DEFAULT_K_SHOULDER,
    DEFAULT_TRAJECTORY_CACHE_SIZE,
    GRAVITY,
    JOINTS,
    BlendProfile,
    ElbowBranch,
    ForceConvention,
    Gender,
    Joint,
    Phase,
)
from .dynamics import (
    ArmInertialModel,
    LoadSpec,
    derive_anthropometry,
    hand_force,
    trajectory_torques,
)
from .fatigue import CycleProfile, CycleSchedule, PhaseSamples
from .kinematics import (
    ArmGeometry,
    JointTrajectory,
    Point,
    TrajectoryLeg,
    joint_trajectory,
    validate_leg,
)
from .utils import BoundedCache

_LOGGER = logging.getLogger(__name__)

TRAJECTORY_CACHE = BoundedCache(max=DEFAULT_TRAJECTORY_CACHE_SIZE)


@dataclass(frozen=True)
class OperatorModel:
    """Body, strength and fatigue description of the operator."""

    stature: float
    body_mass: float
    gender: Gender = Gender.MALE
    k_shoulder: float = DEFAULT_K_SHOULDER
    k_elbow: float = DEFAULT_K_ELBOW
    segment_overrides: Mapping[str, Mapping[str, float]] = field(
        default_factory=dict
    )
    capacity: CapacityCoefficients = DEFAULT_COEFFICIENTS

    @property
    def k(self) -> Dict[Joint, float]:
        """Return the fatigue rates per joint in 1/min."""
        return {Joint.SHOULDER: self.k_shoulder, Joint.ELBOW: self.k_elbow}

    def inertial_model(
        self, tool_mass: float = 0.0, gravity: float = GRAVITY
    ) -> ArmInertialModel:
        """Return the operator's arm carrying the tool."""
        return derive_anthropometry(
            self.stature,
            self.body_mass,
            tool_mass=tool_mass,
            gravity=gravity,
            overrides=self.segment_overrides,
        )


@dataclass(frozen=True)
class PushPullTask:
    """Repeated push from p0 to pf followed by a pull back to p0."""

    p0: Point
    pf: Point
    t_push: float
    t_pull: float
    push_force: float
    pull_force: float
    tool_mass: float = 0.0
    force_convention: ForceConvention = ForceConvention.EXERTED_BY_HAND
    blend: BlendProfile = BlendProfile.CUBIC
    starts_with: Phase = Phase.PUSH

    @property
    def loads(self) -> LoadSpec:
        """Return the process forces."""
        return LoadSpec(self.push_force, self.pull_force)

    @property
    def schedule(self) -> CycleSchedule:
        """Return the cycle timing."""
        return CycleSchedule(self.t_push, self.t_pull, starts_with=self.starts_with)

    @property
    def legs(self) -> Dict[Phase, TrajectoryLeg]:
        """Return the hand movement of each phase."""
        push = TrajectoryLeg(self.p0, self.pf, self.t_push, self.blend)
        pull = TrajectoryLeg(self.pf, self.p0, self.t_pull, self.blend)
        return {Phase.PUSH: push, Phase.PULL: pull}


def cached_joint_trajectory(
    geom: ArmGeometry,
    leg: TrajectoryLeg,
    dt: float = DEFAULT_DT,
    cache: Optional[BoundedCache] = None,
) -> JointTrajectory:
    """Return the joint trajectory of a leg, reusing earlier solutions."""
    if cache is None:
        cache = TRAJECTORY_CACHE
    return cache.get_or_compute(
        (geom, leg, dt), lambda: joint_trajectory(geom, leg, dt)
    )


def build_cycle_profile(
    operator: OperatorModel,
    task: PushPullTask,
    dt: float = DEFAULT_DT,
    elbow_branch: ElbowBranch = ElbowBranch.ELBOW_DOWN,
    gravity: float = GRAVITY,
    cache: Optional[BoundedCache] = None,
) -> CycleProfile:
    """Return joint motion, torques and capacities of one cycle."""
    model = operator.inertial_model(task.tool_mass, gravity)
    geom = model.geometry(elbow_branch)
    samples = {}
    for phase, leg in task.legs.items():
        validate_leg(geom, leg)
        trajectory = cached_joint_trajectory(geom, leg, dt, cache)
        torque = trajectory_torques(
            model,
            geom,
            trajectory,
            hand_force(phase, task.loads, task.force_convention),
        )
        capacity = phase_capacity(
            operator.capacity, phase, trajectory.theta, operator.gender
        )
        samples[phase] = PhaseSamples(
            phase=phase,
            t=trajectory.t,
            theta=trajectory.theta,
            joint_torque=torque,
            capacity=np.stack([capacity[joint] for joint in JOINTS], axis=-1),
        )
        _LOGGER.debug(
            "%s leg: peak torque %s N.m, capacity range %s..%s N.m",
            phase.value,
            np.max(np.abs(torque), axis=0),
            np.min(samples[phase].capacity, axis=0),
            np.max(samples[phase].capacity, axis=0),
        )
    return CycleProfile(task.schedule, dt, samples)
