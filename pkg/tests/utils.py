"""Test utilities."""
import os

import numpy as np

from pushpull_fatigue.consts import Phase
from pushpull_fatigue.fatigue import CycleProfile, CycleSchedule, PhaseSamples
from pushpull_fatigue.scenario import load_scenario


def load_fixture(filename):
    """Load a fixture."""
    path = os.path.join(os.path.dirname(__file__), "fixtures", filename)
    with open(path, encoding="utf-8") as fptr:
        return fptr.read()


def fixture_path(filename):
    """Return the path of a fixture."""
    return os.path.join(os.path.dirname(__file__), "fixtures", filename)


def load_scenario_fixture(filename):
    """Load a scenario fixture."""
    return load_scenario(load_fixture(filename))


def constant_profile(ratio=0.5, t_push=5.0, t_pull=5.0, dt=0.01, capacity=100.0):
    """Return a held posture cycle whose demand is ratio times capacity.

    Torque signs match the working groups of each phase.
    """
    torque = ratio * capacity
    samples = {
        Phase.PUSH: PhaseSamples.constant(
            Phase.PUSH, t_push, dt, (0.5, 1.5), (torque, -torque), (capacity, capacity)
        ),
        Phase.PULL: PhaseSamples.constant(
            Phase.PULL, t_pull, dt, (0.5, 1.5), (-torque, torque), (capacity, capacity)
        ),
    }
    return CycleProfile(CycleSchedule(t_push, t_pull), dt, samples)


def varying_profile(t_push=2.0, t_pull=3.0, dt=0.01):
    """Return a cycle with posture, torque and capacity changing within phases."""
    samples = {}
    legs = ((Phase.PUSH, t_push, 1.0), (Phase.PULL, t_pull, -1.0))
    for phase, duration, sign in legs:
        count = int(round(duration / dt))
        t = np.arange(count + 1) * dt
        t[-1] = duration
        tau = t / duration
        theta = np.stack([0.3 + 0.2 * tau, 1.8 - 0.4 * tau], axis=-1)
        torque = np.stack(
            [
                sign * (12.0 + 6.0 * np.sin(np.pi * tau)),
                -sign * (8.0 + 3.0 * np.cos(np.pi * tau)),
            ],
            axis=-1,
        )
        capacity = np.stack([60.0 + 10.0 * tau, 45.0 - 5.0 * tau**2], axis=-1)
        samples[phase] = PhaseSamples(phase, t, theta, torque, capacity)
    return CycleProfile(CycleSchedule(t_push, t_pull), dt, samples)
