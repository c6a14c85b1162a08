"""Fit model parameters to the measured single-finger tension data.

Three calibrations:

* variant factors: the four printed finger variants (palm-side hole and/or
  dorsal wrinkle removed) were flexed to the same posture and the required
  tension recorded. The factor model treats each removed feature as a
  tension multiplier, either solved exactly with an interaction term
  (`exact4`) or as a pure two-factor model fit by least squares on the log
  tensions (`multiplicative3`).
* joint stiffness: chosen so the full measured flexion tension drives every
  joint the tendon crosses to its limit simultaneously,
  k_j = T_full * arm_j / (limit_j - rest_j).
* damping: critical per axis, c_j = 2 sqrt(k_j I_j), then verified to bring
  the hand back within 2 degrees of rest inside the settle-time target.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from .dynamics import impulse_response, standard_impulses
from .hand_model import HandModel
from .tendon_geometry import tendon_arm_matrix

_NMM_S2_PER_KG_MM2 = 1e-3

EXACT4 = "exact4"
MULTIPLICATIVE3 = "multiplicative3"

#: Measured peak flexion tensions, newtons, keyed by (hole present, wrinkle
#: present). The proposed joint design has both features.
MEASURED_VARIANT_TENSIONS: dict[tuple[bool, bool], float] = {
    (True, True): 52.7,
    (False, True): 63.9,
    (True, False): 57.6,
    (False, False): 87.8,
}


class CalibrationError(RuntimeError):
    pass


@dataclass(frozen=True)
class CalibrationDataset:
    variant_tensions: Mapping[tuple[bool, bool], float] = field(
        default_factory=lambda: dict(MEASURED_VARIANT_TENSIONS)
    )
    settle_time_target: float = 1.0  # s
    full_flexion_tension: float = 52.7  # N, proposed variant


@dataclass(frozen=True)
class VariantFactors:
    """Tension multipliers attributed to removing each joint feature."""

    base_tension: float  # N, both features present
    hole_absent_factor: float
    wrinkle_absent_factor: float
    interaction_factor: float  # exact4 only; 1.0 under multiplicative3
    residual: float  # rms log-tension residual
    model_kind: str


def default_dataset() -> CalibrationDataset:
    return CalibrationDataset()


def fit_variant_factors(
    data: CalibrationDataset, model_kind: str = EXACT4
) -> VariantFactors:
    t = data.variant_tensions
    for key in ((True, True), (False, True), (True, False), (False, False)):
        if key not in t:
            raise ValueError(f"dataset is missing the variant {key}")
        if not t[key] > 0:
            raise ValueError(f"variant {key} tension must be positive")

    if model_kind == EXACT4:
        base = t[(True, True)]
        fh = t[(False, True)] / base
        fw = t[(True, False)] / base
        g = t[(False, False)] / (base * fh * fw)
        return VariantFactors(base, fh, fw, g, 0.0, EXACT4)

    if model_kind == MULTIPLICATIVE3:
        # log T = log base + [no hole] log fh + [no wrinkle] log fw,
        # least squares over all four variants.
        rows, y = [], []
        for (hole, wrinkle), tension in sorted(t.items()):
            rows.append([1.0, 0.0 if hole else 1.0, 0.0 if wrinkle else 1.0])
            y.append(math.log(tension))
        X = np.array(rows)
        yv = np.array(y)
        beta, *_ = np.linalg.lstsq(X, yv, rcond=None)
        resid = yv - X @ beta
        rms = float(np.sqrt(np.mean(resid**2)))
        return VariantFactors(
            float(np.exp(beta[0])),
            float(np.exp(beta[1])),
            float(np.exp(beta[2])),
            1.0,
            rms,
            MULTIPLICATIVE3,
        )

    raise ValueError(f"unknown variant factor model {model_kind!r}")


def predict_variant_tension(factors: VariantFactors, hole: bool, wrinkle: bool) -> float:
    """Model tension for one variant, newtons."""
    value = factors.base_tension
    if not hole:
        value *= factors.hole_absent_factor
    if not wrinkle:
        value *= factors.wrinkle_absent_factor
    if not hole and not wrinkle:
        value *= factors.interaction_factor
    return value


# ---------------------------------------------------------------------------
# Stiffness and damping
# ---------------------------------------------------------------------------


def calibrate_stiffness(model: HandModel, data: CalibrationDataset) -> HandModel:
    """Set per-axis spring stiffness from the full-flexion holding tension.

    The tendon crossing an axis with total arm `a` reaches the joint limit
    exactly when its tension is the measured full-flexion value:
    k = T_full * a / (limit - rest). Axes no tendon crosses keep their
    stiffness.
    """
    if not data.full_flexion_tension > 0:
        raise ValueError("full_flexion_tension must be positive")
    arms = np.abs(tendon_arm_matrix(model)).sum(axis=0)

    ai = 0
    fingers = []
    for f in model.fingers:
        joints = []
        for j in f.joints:
            stiff = list(j.stiffness)
            for a in range(j.n_axes):
                if arms[ai] > 0:
                    span = math.radians(j.limits[a][1] - j.rest_angle[a])
                    if span <= 0:
                        raise CalibrationError(
                            f"joint {f.name}.{j.name} axis {a} has no travel between "
                            f"rest and its upper limit"
                        )
                    stiff[a] = data.full_flexion_tension * arms[ai] / span
                ai += 1
            joints.append(dataclasses.replace(j, stiffness=tuple(stiff)))
        fingers.append(dataclasses.replace(f, joints=tuple(joints)))
    return dataclasses.replace(model, fingers=tuple(fingers))


def _with_critical_damping(model: HandModel) -> HandModel:
    fingers = []
    for f in model.fingers:
        joints = []
        for j in f.joints:
            damping = tuple(
                2.0 * math.sqrt(j.stiffness[a] * j.inertia[a] * _NMM_S2_PER_KG_MM2)
                for a in range(j.n_axes)
            )
            joints.append(dataclasses.replace(j, damping=damping))
        fingers.append(dataclasses.replace(f, joints=tuple(joints)))
    return dataclasses.replace(model, fingers=tuple(fingers))


def _shrink_inertia(model: HandModel, factor: float) -> HandModel:
    fingers = []
    for f in model.fingers:
        joints = tuple(
            dataclasses.replace(j, inertia=tuple(i * factor for i in j.inertia))
            for j in f.joints
        )
        fingers.append(dataclasses.replace(f, joints=joints))
    return dataclasses.replace(model, fingers=tuple(fingers))


def calibrate_damping(
    model: HandModel, data: CalibrationDataset
) -> tuple[HandModel, float]:
    """Critically damp every axis, verifying the settle-time target.

    Returns the updated model and the achieved settle time for the standard
    palm-side impulse. If the target cannot be met, the lumped inertia
    defaults are halved (the stiffness calibration is measured, the inertia
    is not) a few times before giving up.
    """
    candidate = model
    for _ in range(8):
        candidate = _with_critical_damping(candidate)
        impulse = standard_impulses(candidate)["palm"]
        try:
            settle = impulse_response(candidate, impulse).settle_time
        except Exception:
            settle = math.inf
        if settle <= data.settle_time_target:
            return candidate, settle
        candidate = _shrink_inertia(candidate, 0.5)
    raise CalibrationError(
        f"could not reach the {data.settle_time_target} s settle target with "
        f"positive parameters"
    )


def calibrated_default_hand(
    data: Optional[CalibrationDataset] = None,
) -> HandModel:
    """The default hand with measured stiffness and critical damping applied."""
    from .hand_model import build_default_hand

    data = data or default_dataset()
    model = calibrate_stiffness(build_default_hand(), data)
    model, _ = calibrate_damping(model, data)
    return dataclasses.replace(model, name="default-calibrated")
