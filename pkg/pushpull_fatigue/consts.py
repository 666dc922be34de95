"""
Constants.

Constants for arm models, task phases, scenario files and trace output.
"""
from enum import Enum


class Phase(str, Enum):
    """Working phase of a push/pull cycle."""

    PUSH = "push"
    PULL = "pull"


class Joint(str, Enum):
    """Observed joint."""

    SHOULDER = "shoulder"
    ELBOW = "elbow"


class Movement(str, Enum):
    """Direction of joint action."""

    FLEXION = "flexion"
    EXTENSION = "extension"


class MuscleGroup(str, Enum):
    """Muscle group acting on one joint in one direction."""

    SHOULDER_FLEXOR = "shoulder_flexor"
    SHOULDER_EXTENSOR = "shoulder_extensor"
    ELBOW_FLEXOR = "elbow_flexor"
    ELBOW_EXTENSOR = "elbow_extensor"

    @property
    def joint(self) -> Joint:
        """Return the joint this group acts on."""
        return Joint(self.value.split("_")[0])

    @property
    def movement(self) -> Movement:
        """Return the movement this group produces."""
        if self.value.endswith("flexor"):
            return Movement.FLEXION
        return Movement.EXTENSION

    @property
    def action_sign(self) -> int:
        """Return the sign of the joint torque this group produces."""
        return 1 if self.movement is Movement.FLEXION else -1


class Gender(str, Enum):
    """Gender selecting the capacity gain."""

    MALE = "male"
    FEMALE = "female"


class ElbowBranch(str, Enum):
    """Inverse kinematics solution branch."""

    ELBOW_DOWN = "elbow_down"
    ELBOW_UP = "elbow_up"


class ForceConvention(str, Enum):
    """Meaning of the push/pull force magnitudes."""

    EXERTED_BY_HAND = "exerted_by_hand"
    REACTION_ON_HAND = "reaction_on_hand"


class BlendProfile(str, Enum):
    """Polynomial time blend of a trajectory leg."""

    CUBIC = "cubic"
    QUINTIC = "quintic"


class FatigueMode(str, Enum):
    """Joint capacity used inside the fatigue integral."""

    QUASISTATIC = "quasistatic"
    STATIC_MIN_MVC = "static_min_mvc"
    STATIC_MAX_MVC = "static_max_mvc"
    STATIC_FIXED = "static_fixed"


class SweepObjective(str, Enum):
    """Ranking objective of a sweep."""

    MAX_TIME_TO_RISK = "max_time_to_risk"
    MIN_TOTAL_EXPONENT = "min_total_exponent"


JOINTS = (Joint.SHOULDER, Joint.ELBOW)
MUSCLE_GROUPS = tuple(MuscleGroup)

# Push: shoulder flexion + elbow extension, pull: the antagonists.
PHASE_MOVEMENTS = {
    Phase.PUSH: {Joint.SHOULDER: Movement.FLEXION, Joint.ELBOW: Movement.EXTENSION},
    Phase.PULL: {Joint.SHOULDER: Movement.EXTENSION, Joint.ELBOW: Movement.FLEXION},
}
PHASE_GROUPS = {
    Phase.PUSH: (MuscleGroup.SHOULDER_FLEXOR, MuscleGroup.ELBOW_EXTENSOR),
    Phase.PULL: (MuscleGroup.SHOULDER_EXTENSOR, MuscleGroup.ELBOW_FLEXOR),
}

GRAVITY = 9.81
DEFAULT_DT = 0.01
SECONDS_PER_MINUTE = 60.0

REACH_TOLERANCE = 1e-9
LEG_REACH_MARGIN = 1e-3
SINGULAR_TOLERANCE = 1e-6
GRID_TOLERANCE = 1e-9
DEMAND_SIGN_TOLERANCE = 0.05

STATURE_RANGE = (1.0, 2.5)
BODY_MASS_RANGE = (30.0, 200.0)

# Body-segment fractions: length of stature, mass of body mass,
# centre of mass and radius of gyration of segment length.
UPPER_ARM_LENGTH_FRACTION = 0.186
FOREARM_HAND_LENGTH_FRACTION = 0.254
UPPER_ARM_MASS_FRACTION = 0.028
FOREARM_HAND_MASS_FRACTION = 0.022
UPPER_ARM_COM_FRACTION = 0.436
FOREARM_HAND_COM_FRACTION = 0.682
UPPER_ARM_GYRATION_FRACTION = 0.322
FOREARM_HAND_GYRATION_FRACTION = 0.468

DEFAULT_K_SHOULDER = 0.17
DEFAULT_K_ELBOW = 0.24

DEFAULT_TRAJECTORY_CACHE_SIZE = 64

# Scenario file keys.
ATTR_OPERATOR = "operator"
ATTR_TASK = "task"
ATTR_RUN = "run"
ATTR_STATURE = "stature_m"
ATTR_BODY_MASS = "body_mass_kg"
ATTR_GENDER = "gender"
ATTR_K_SHOULDER = "k_shoulder_per_min"
ATTR_K_ELBOW = "k_elbow_per_min"
ATTR_SEGMENT_OVERRIDES = "segment_overrides"
ATTR_CAPACITY_COEFFICIENTS = "capacity_coefficients"
ATTR_P0 = "p0_m"
ATTR_PF = "pf_m"
ATTR_T_PUSH = "t_push_s"
ATTR_T_PULL = "t_pull_s"
ATTR_PUSH_FORCE = "push_force_n"
ATTR_PULL_FORCE = "pull_force_n"
ATTR_TOOL_MASS = "tool_mass_kg"
ATTR_FORCE_CONVENTION = "force_convention"
ATTR_BLEND = "blend"
ATTR_STARTS_WITH = "starts_with"
ATTR_DURATION = "duration_s"
ATTR_DT = "dt_s"
ATTR_MODE = "mode"
ATTR_ELBOW_BRANCH = "elbow_branch"
ATTR_FIXED_MVC = "fixed_mvc_nm"
ATTR_GRAVITY = "gravity_mps2"
ATTR_LENGTH = "length_m"
ATTR_MASS = "mass_kg"
ATTR_COM_DISTANCE = "com_distance_m"
ATTR_INERTIA_COM = "inertia_com_kgm2"
ATTR_UPPER_ARM = "upper_arm"
ATTR_FOREARM_HAND = "forearm_hand"

# Sweep grid keys.
ATTR_PHASE_DURATIONS = "phase_durations_s"
ATTR_PAIR_ENDPOINTS = "pair_endpoints"
ATTR_OBJECTIVE = "objective"
ATTR_OBJECTIVE_JOINT = "objective_joint"

TRACE_COLUMNS = (
    "t_s",
    "phase",
    "theta_s_rad",
    "theta_e_rad",
    "gamma_joint_shoulder_nm",
    "gamma_joint_elbow_nm",
    "gamma_mvc_shoulder_nm",
    "gamma_mvc_elbow_nm",
    "gamma_cem_shoulder_nm",
    "gamma_cem_elbow_nm",
    "gamma_cem_shoulder_flexor_nm",
    "gamma_cem_shoulder_extensor_nm",
    "gamma_cem_elbow_flexor_nm",
    "gamma_cem_elbow_extensor_nm",
)

SWEEP_COLUMNS = (
    "rank",
    "cell",
    "status",
    "objective",
    "p0_x_m",
    "p0_z_m",
    "pf_x_m",
    "pf_z_m",
    "push_force_n",
    "pull_force_n",
    "t_push_s",
    "t_pull_s",
    "crossing_shoulder_s",
    "crossing_elbow_s",
    "total_exponent",
    "error",
)

STATUS_OK = "OK"
STATUS_ERROR = "ERROR"

EXIT_OK = 0
EXIT_VALIDATION_FAILURE = 1
EXIT_RUNTIME_FAILURE = 2
