"""Lumped per-axis joint dynamics for impact-recovery simulation.

Each joint axis evolves as an independent damped torsional oscillator

    I_j theta_dd = tau_j - k_j (theta_j - rest_j) - c_j theta_d

with the lumped inertia I_j of the distal chain, optionally a constant
tendon torque tau (tension-on impact cases), and joint limits enforced by
inelastic clamping. Integration is a symplectic kick-drift-kick step with
the damping term handled implicitly in each half kick, so the undamped
case reduces to velocity Verlet and pure damping is unconditionally
stable.

Hammer hits are modeled as initial joint-velocity impulses; with tension
applied, the return target is the equilibrium under that tension rather
than the rest posture.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .hand_model import HandModel, Posture
from .statics import ActuationCommand, TENSION, equilibrium_tension
from .tendon_geometry import tendon_arm_matrix

# 1 kg*mm^2 = 1e-3 N*mm*s^2
_NMM_S2_PER_KG_MM2 = 1e-3

MAX_STABLE_DT = 1e-3
DEFAULT_DT = 1e-4
SETTLE_BAND_DEG = 2.0
SETTLE_HOLD_S = 0.1
SETTLE_TIMEOUT_S = 10.0


class SettleTimeoutError(RuntimeError):
    """The hand did not settle into the tolerance band within the time cap."""


@dataclass(frozen=True)
class DynamicState:
    posture: Posture
    velocities: np.ndarray  # rad/s per axis
    time: float  # s

    def __post_init__(self):
        v = np.asarray(self.velocities, dtype=float).copy()
        v.setflags(write=False)
        object.__setattr__(self, "velocities", v)


@dataclass(frozen=True)
class ImpulseResponse:
    times: np.ndarray  # s
    angles: np.ndarray  # (samples, dof) rad
    settle_time: float  # s, entry time of the first in-band hold
    target: np.ndarray  # rad, return posture


def _tendon_torque(model: HandModel, command: Optional[ActuationCommand]) -> np.ndarray:
    if command is None:
        return np.zeros(model.dof)
    if command.mode != TENSION:
        raise ValueError("dynamics accepts tension-mode commands only")
    return tendon_arm_matrix(model).T @ command.values


def step(
    model: HandModel,
    state: DynamicState,
    dt: float,
    command: Optional[ActuationCommand] = None,
) -> DynamicState:
    """Advance one integration step of length dt (dt <= 1e-3 s)."""
    if not 0.0 < dt <= MAX_STABLE_DT:
        raise ValueError(f"dt must be in (0, {MAX_STABLE_DT}] s, got {dt}")
    theta = state.posture.angles
    v = state.velocities
    if not (np.all(np.isfinite(theta)) and np.all(np.isfinite(v))):
        raise ValueError("dynamic state contains non-finite entries")

    k = model.stiffness_array()
    c = model.damping_array()
    inertia = model.inertia_array() * _NMM_S2_PER_KG_MM2
    rest = model.rest_rad()
    lo, hi = model.lower_rad(), model.upper_rad()
    tau = _tendon_torque(model, command)

    half = 0.5 * dt
    damp = 1.0 + half * c / inertia

    v_half = (v + half * (tau - k * (theta - rest)) / inertia) / damp
    theta_new = theta + dt * v_half
    # Inelastic limit contact: clamp and zero the outward velocity component.
    below = theta_new < lo
    above = theta_new > hi
    theta_new = np.clip(theta_new, lo, hi)
    v_half = np.where(below & (v_half < 0), 0.0, v_half)
    v_half = np.where(above & (v_half > 0), 0.0, v_half)
    v_new = (v_half + half * (tau - k * (theta_new - rest)) / inertia) / damp

    return DynamicState(Posture(theta_new), v_new, state.time + dt)


def standard_impulses(model: HandModel, magnitude: float = 20.0) -> dict[str, np.ndarray]:
    """The three documented hammer-impact directions as velocity impulses.

    Palm-side and dorsal-side hits excite every flexion axis (positive and
    negative respectively); lateral hits excite the thumb base axes, the
    only non-flexion axes of the hand. The default magnitude deflects the
    calibrated hand well beyond the settle band (peaks of several degrees),
    like a hammer strike; smaller kicks die inside the band and settle at 0.
    """
    dof = model.dof
    palm = np.full(dof, magnitude)
    dorsal = -palm
    lateral = np.zeros(dof)
    for f in model.fingers:
        if f.name != "thumb":
            continue
        for j in f.joints:
            if j.kind == "spherical2dof":
                lateral[model.axis_index(f.name, j.name, 0)] = magnitude
                lateral[model.axis_index(f.name, j.name, 1)] = magnitude
    return {"palm": palm, "dorsal": dorsal, "lateral": lateral}


def impulse_response(
    model: HandModel,
    impulse: np.ndarray,
    command: Optional[ActuationCommand] = None,
    dt: float = DEFAULT_DT,
    band_deg: float = SETTLE_BAND_DEG,
    hold_s: float = SETTLE_HOLD_S,
    timeout_s: float = SETTLE_TIMEOUT_S,
    sample_every: int = 10,
) -> ImpulseResponse:
    """Kick the return posture with a joint-velocity impulse and time the recovery.

    The settle time is the entry time of the first interval of length
    `hold_s` during which every axis stays within `band_deg` of the return
    posture. With a tension command, the return posture is the equilibrium
    under that tension.
    """
    impulse = np.asarray(impulse, dtype=float)
    if impulse.shape != (model.dof,):
        raise ValueError(f"impulse must have shape ({model.dof},)")
    if command is not None:
        target = equilibrium_tension(model, command).posture.angles
    else:
        target = model.rest_rad()

    band = math.radians(band_deg)
    state = DynamicState(Posture(target.copy()), impulse, 0.0)
    times = [0.0]
    angles = [state.posture.angles.copy()]

    in_band_since: Optional[float] = 0.0  # in band at t=0 by construction
    settle: Optional[float] = None
    n_steps = int(round(timeout_s / dt))
    for i in range(1, n_steps + 1):
        state = step(model, state, dt, command)
        if i % sample_every == 0:
            times.append(state.time)
            angles.append(state.posture.angles.copy())
        inside = bool(np.max(np.abs(state.posture.angles - target)) <= band)
        if inside:
            if in_band_since is None:
                in_band_since = state.time
            if state.time - in_band_since >= hold_s:
                settle = in_band_since
                break
        else:
            in_band_since = None
    if settle is None:
        raise SettleTimeoutError(
            f"hand did not stay within {band_deg} deg of the return posture for "
            f"{hold_s} s within {timeout_s} s"
        )
    if times[-1] != state.time:
        times.append(state.time)
        angles.append(state.posture.angles.copy())
    return ImpulseResponse(
        times=np.array(times),
        angles=np.array(angles),
        settle_time=float(settle),
        target=target,
    )
