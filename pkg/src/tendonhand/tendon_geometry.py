"""Moment arms, tendon excursions and excursion gradients.

Arms follow the pulley model: each crossing contributes a constant, signed
moment arm r = sign * (r0 + a * tan(theta)), independent of posture. A
tendon's excursion (cable drawn out at the wrist, equal to the required
muscle shortening) is therefore linear in the joint angles:

    excursion = sum_j arm_j * (theta_j - theta_rest_j)

Moment-arm vectors are plain float arrays of length ``model.dof`` in
canonical axis order, zero on axes the tendon does not cross.
"""

from __future__ import annotations

import math

import numpy as np

from .hand_model import HandModel, Posture, RoutingCrossing, Tendon


def moment_arm(crossing: RoutingCrossing) -> float:
    """Signed composite moment arm of one crossing, millimeters."""
    if crossing.angle_theta >= 90.0:
        raise ValueError(
            f"guide inclination must be < 90 deg, got {crossing.angle_theta}"
        )
    return crossing.sign * (
        crossing.base_arm_r0
        + crossing.offset_a * math.tan(math.radians(crossing.angle_theta))
    )


def moment_arm_vector(tendon: Tendon, model: HandModel) -> np.ndarray:
    """Per-axis signed arms for one tendon; zero where it does not cross."""
    arms = np.zeros(model.dof)
    index = {spec: i for i, spec in enumerate(model.axis_specs())}
    for c in tendon.crossings:
        key = (c.finger, c.joint, c.axis)
        if key not in index:
            raise KeyError(
                f"tendon {tendon.name!r} crossing references missing joint axis "
                f"{c.finger}/{c.joint}/{c.axis}"
            )
        arms[index[key]] += moment_arm(c)
    return arms


def tendon_arm_matrix(model: HandModel) -> np.ndarray:
    """Stacked (tendon x axis) arm matrix in model tendon order."""
    return np.stack([moment_arm_vector(t, model) for t in model.tendons])


def excursion(tendon: Tendon, posture: Posture, model: HandModel) -> float:
    """Cable drawn in by the actuator at this posture, millimeters.

    Zero at the rest posture; positive when the crossed joints flex beyond
    rest on the tendon's pull side.
    """
    if len(posture) != model.dof:
        raise ValueError(
            f"posture has {len(posture)} entries, model has {model.dof} axes"
        )
    arms = moment_arm_vector(tendon, model)
    return float(arms @ (posture.angles - model.rest_rad()))


def excursion_gradient(tendon: Tendon, model: HandModel) -> np.ndarray:
    """d(excursion)/d(posture); equals the arm vector under the pulley model."""
    return moment_arm_vector(tendon, model)
