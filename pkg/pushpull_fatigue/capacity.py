"""
Joint capacity.

Posture dependent maximal voluntary joint torques from static strength
prediction polynomials. Polynomials take joint angles in degrees, with zero
matching a straight arm hanging in a standing posture, and return N.m once
multiplied by the gender gain.
"""
import logging
from dataclasses import dataclass, fields
from typing import Dict, Mapping

import numpy as np

from .consts import PHASE_MOVEMENTS, Gender, Joint, Movement, Phase
from .exceptions import FatigueSimulatorException

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class CapacityRow:
    """(constant + theta_e*e + theta_e_sq*e^2 + theta_s*s) * gain."""

    constant: float
    theta_e: float = 0.0
    theta_e_sq: float = 0.0
    theta_s: float = 0.0
    gain_male: float = 1.0
    gain_female: float = 1.0

    def __post_init__(self) -> None:
        """Validate gains."""
        if self.gain_male < 0 or self.gain_female < 0:
            raise FatigueSimulatorException(
                f"Capacity gains must not be negative: {self}"
            )

    def gain(self, gender: Gender) -> float:
        """Return the gain of the given gender."""
        return self.gain_male if gender is Gender.MALE else self.gain_female

    def polynomial(self, theta_s_deg, theta_e_deg):
        """Return the polynomial value before the gain."""
        return (
            self.constant
            + self.theta_e * theta_e_deg
            + self.theta_e_sq * theta_e_deg**2
            + self.theta_s * theta_s_deg
        )


def row_name(joint: Joint, movement: Movement) -> str:
    """Return the scenario key of a row, e.g. elbow_flexion."""
    return f"{joint.value}_{movement.value}"


@dataclass(frozen=True)
class CapacityCoefficients:
    """The four capacity rows, one per joint and movement."""

    elbow_flexion: CapacityRow
    elbow_extension: CapacityRow
    shoulder_flexion: CapacityRow
    shoulder_extension: CapacityRow

    def row(self, joint: Joint, movement: Movement) -> CapacityRow:
        """Return the row of a joint and movement."""
        return getattr(self, row_name(joint, movement))

    def with_overrides(
        self, overrides: Mapping[str, Mapping[str, float]]
    ) -> "CapacityCoefficients":
        """Return a copy with selected row fields replaced."""
        rows = {}
        row_fields = {item.name for item in fields(CapacityRow)}
        for name, values in overrides.items():
            if name not in {item.name for item in fields(self)}:
                raise FatigueSimulatorException(f"Unknown capacity row {name}")
            unknown = set(values) - row_fields
            if unknown:
                raise FatigueSimulatorException(
                    f"Unknown fields {sorted(unknown)} in capacity row {name}"
                )
            current = getattr(self, name)
            rows[name] = CapacityRow(
                **{
                    field: float(values.get(field, getattr(current, field)))
                    for field in row_fields
                }
            )
        return CapacityCoefficients(
            **{
                item.name: rows.get(item.name, getattr(self, item.name))
                for item in fields(self)
            }
        )


DEFAULT_COEFFICIENTS = CapacityCoefficients(
    elbow_flexion=CapacityRow(
        336.29,
        theta_e=1.544,
        theta_e_sq=-0.0085,
        theta_s=-0.5,
        gain_male=0.1913,
        gain_female=0.1005,
    ),
    elbow_extension=CapacityRow(
        264.153, theta_e=0.575, theta_s=-0.425, gain_male=0.2126, gain_female=0.1153
    ),
    shoulder_flexion=CapacityRow(
        227.338, theta_e=0.525, theta_s=-0.296, gain_male=0.2854, gain_female=0.1495
    ),
    shoulder_extension=CapacityRow(
        204.562, theta_s=0.099, gain_male=0.4957, gain_female=0.2485
    ),
)


def to_capacity_degrees(theta) -> np.ndarray:
    """Convert kinematic joint angles in radians to capacity polynomial degrees.

    Both conventions put zero at a straight arm hanging by the body with
    flexion positive, so only the unit changes.
    """
    return np.degrees(np.asarray(theta, dtype=float))


def movement_for(phase: Phase, joint: Joint) -> Movement:
    """Return the movement a joint performs during a phase."""
    return PHASE_MOVEMENTS[phase][joint]


def joint_capacity(
    coeffs: CapacityCoefficients,
    joint: Joint,
    movement: Movement,
    theta_s_deg,
    theta_e_deg,
    gender: Gender = Gender.MALE,
):
    """Return the maximal voluntary torque, clamped at zero from below.

    Accepts scalars or arrays of angles.
    """
    row = coeffs.row(joint, movement)
    value = row.polynomial(
        np.asarray(theta_s_deg, dtype=float), np.asarray(theta_e_deg, dtype=float)
    ) * row.gain(gender)
    if np.any(value <= 0):
        _LOGGER.warning(
            "Non-positive %s %s capacity (min %.3f N.m) clamped to zero, "
            "posture outside the strength model range",
            joint.value,
            movement.value,
            float(np.min(value)),
        )
        value = np.maximum(value, 0.0)
    if np.ndim(value) == 0:
        return float(value)
    return value


def phase_capacity(
    coeffs: CapacityCoefficients,
    phase: Phase,
    theta,
    gender: Gender = Gender.MALE,
) -> Dict[Joint, float]:
    """Return the capacity of the phase's active group at each joint.

    theta holds (theta_s, theta_e) in radians along its last axis.
    """
    degrees = to_capacity_degrees(theta)
    theta_s_deg, theta_e_deg = degrees[..., 0], degrees[..., 1]
    return {
        joint: joint_capacity(
            coeffs, joint, movement_for(phase, joint), theta_s_deg, theta_e_deg, gender
        )
        for joint in (Joint.SHOULDER, Joint.ELBOW)
    }
