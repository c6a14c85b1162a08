"""Articulated hand data model: links, joints, tendon routing, and the default hand.

The hand is a palm plus five serial-chain fingers. Four fingers carry three
hinge joints each (MP, PIP, DIP); the thumb carries a two-axis spherical base
joint (CM: adduction + opposition) followed by an MP hinge. Flexion is driven
by pull-only tendons routed through the skeleton; extension is passive, from
torsional springs at every joint axis that restore a slightly flexed rest
posture.

Conventions
-----------
* Palm frame: +y distal (wrist toward fingertips), +z palmar (the direction
  fingertips move under flexion), +x toward the thumb side. Origin at the
  wrist center.
* Angles are DEGREES in all dataclass fields and config files, RADIANS in
  `Posture` and everything the solvers touch.
* Lengths are millimeters, stiffness N*mm/rad, damping N*mm*s/rad,
  inertia kg*mm^2.
* Canonical joint-axis order: fingers in model order, joints base to tip,
  axes in joint order. The default hand is thumb, index, middle, ring,
  little, for 15 axes total.

Absolute sizes are documented defaults (only segment ratios are fixed by the
design); everything is overridable through the JSON hand configuration.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

FOUR_FINGER_JOINT_NAMES = ("mp", "pip", "dip")
THUMB_JOINT_NAMES = ("cm", "mp")
FINGER_ORDER = ("thumb", "index", "middle", "ring", "little")

# Soft-tissue density used for the thin-rod inertia defaults, mg/mm^3.
TISSUE_DENSITY_KG_PER_MM3 = 1.1e-6

HAND_SCHEMA_VERSION = 1


def _as_tuple3(v) -> tuple[float, float, float]:
    a, b, c = (float(x) for x in v)
    return (a, b, c)


def _rotation_from_rpy(rpy_deg: Sequence[float]) -> np.ndarray:
    """Rotation matrix for extrinsic x-y-z Euler angles, degrees."""
    rx, ry, rz = (math.radians(a) for a in rpy_deg)
    cx, sx = math.cos(rx), math.sin(rx)
    cy, sy = math.cos(ry), math.sin(ry)
    cz, sz = math.cos(rz), math.sin(rz)
    Rx = np.array([[1, 0, 0], [0, cx, -sx], [0, sx, cx]])
    Ry = np.array([[cy, 0, sy], [0, 1, 0], [-sy, 0, cy]])
    Rz = np.array([[cz, -sz, 0], [sz, cz, 0], [0, 0, 1]])
    return Rz @ Ry @ Rx


@dataclass(frozen=True)
class Transform:
    """Rigid transform: rotation as extrinsic xyz Euler angles plus a translation."""

    origin_mm: tuple[float, float, float] = (0.0, 0.0, 0.0)
    rpy_deg: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def rotation(self) -> np.ndarray:
        return _rotation_from_rpy(self.rpy_deg)

    def origin(self) -> np.ndarray:
        return np.array(self.origin_mm, dtype=float)


@dataclass(frozen=True)
class Link:
    """One rigid finger segment, modeled as a capsule for contact."""

    name: str
    length: float  # mm
    radius: float  # mm, capsule radius


@dataclass(frozen=True)
class Joint:
    """One joint with 1 (hinge) or 2 (spherical2dof) rotational axes.

    Hinges rotate about the local +x axis; positive angle is flexion (the
    distal chain tips toward local +z). The spherical2dof kind is the thumb
    base: axis 0 is adduction about local +z (an in-plane sweep toward the
    fingers), axis 1 is opposition about local +x (the saddle axis), which
    pitches the thumb column out of the palm plane and turns its flexion
    plane toward the palm center.

    Angle-valued fields are degrees; stiffness is per radian.
    """

    name: str
    kind: str  # "hinge" | "spherical2dof"
    rest_angle: tuple[float, ...]  # deg per axis
    stiffness: tuple[float, ...]  # N*mm/rad per axis
    damping: tuple[float, ...]  # N*mm*s/rad per axis
    limits: tuple[tuple[float, float], ...]  # (min, max) deg per axis
    inertia: tuple[float, ...]  # kg*mm^2 per axis, lumped, dynamics only

    @property
    def n_axes(self) -> int:
        return 2 if self.kind == "spherical2dof" else 1

    @property
    def axis_names(self) -> tuple[str, ...]:
        return ("add", "opp") if self.kind == "spherical2dof" else ("flex",)


@dataclass(frozen=True)
class RoutingCrossing:
    """One tendon crossing of one joint axis.

    The moment arm about the axis is sign * (base_arm_r0 + offset_a *
    tan(angle_theta)): a centerline arm plus the gain from exiting the
    skeletal wire guide a distance `offset_a` before the joint at an
    inclination `angle_theta` to the centerline. sign +1 is the flexion
    side.
    """

    finger: str
    joint: str
    axis: int = 0
    base_arm_r0: float = 5.6  # mm, centerline arm
    offset_a: float = 0.0  # mm, guide exit distance
    angle_theta: float = 0.0  # deg, guide inclination, < 90
    sign: int = 1


@dataclass(frozen=True)
class Tendon:
    name: str
    crossings: tuple[RoutingCrossing, ...]
    muscle_analog: str = ""


@dataclass(frozen=True)
class Finger:
    """A serial chain of links and joints mounted on the palm at base_frame."""

    name: str
    links: tuple[Link, ...]
    joints: tuple[Joint, ...]
    base_frame: Transform


@dataclass(frozen=True)
class PalmPatch:
    """Rigid palm capsule patch in the palm frame.

    The thumb-side (thenar) patch follows the thumb opposition angle, which
    approximates the palm fold that accompanies opposition.
    """

    name: str
    p0_mm: tuple[float, float, float]
    p1_mm: tuple[float, float, float]
    radius: float
    follows_thumb_opposition: bool = False


@dataclass(frozen=True)
class HandModel:
    name: str
    fingers: tuple[Finger, ...]
    tendons: tuple[Tendon, ...]
    palm_frame: Transform = Transform()
    palm_patches: tuple[PalmPatch, ...] = ()

    # -- canonical axis bookkeeping ------------------------------------

    def axis_specs(self) -> list[tuple[str, str, int]]:
        """(finger, joint, axis-within-joint) triplets in canonical order."""
        specs = []
        for f in self.fingers:
            for j in f.joints:
                for a in range(j.n_axes):
                    specs.append((f.name, j.name, a))
        return specs

    def axis_names(self) -> list[str]:
        out = []
        for f in self.fingers:
            for j in f.joints:
                for aname in j.axis_names:
                    label = f"{f.name}.{j.name}"
                    out.append(label if j.n_axes == 1 else f"{label}.{aname}")
        return out

    @property
    def dof(self) -> int:
        return sum(j.n_axes for f in self.fingers for j in f.joints)

    def axis_index(self, finger: str, joint: str, axis: int = 0) -> int:
        for i, spec in enumerate(self.axis_specs()):
            if spec == (finger, joint, axis):
                return i
        raise KeyError(f"no joint axis {finger}/{joint}/{axis} in model {self.name!r}")

    def finger(self, name: str) -> Finger:
        for f in self.fingers:
            if f.name == name:
                return f
        raise KeyError(f"no finger {name!r} in model {self.name!r}")

    def tendon(self, name: str) -> Tendon:
        for t in self.tendons:
            if t.name == name:
                return t
        raise KeyError(f"no tendon {name!r} in model {self.name!r}")

    def tendon_index(self, name: str) -> int:
        for i, t in enumerate(self.tendons):
            if t.name == name:
                return i
        raise KeyError(f"no tendon {name!r} in model {self.name!r}")

    # -- per-axis arrays (radians / SI-mm units) -----------------------

    def _axis_array(self, pick) -> np.ndarray:
        vals = []
        for f in self.fingers:
            for j in f.joints:
                for a in range(j.n_axes):
                    vals.append(pick(j, a))
        return np.array(vals, dtype=float)

    def rest_rad(self) -> np.ndarray:
        return self._axis_array(lambda j, a: math.radians(j.rest_angle[a]))

    def lower_rad(self) -> np.ndarray:
        return self._axis_array(lambda j, a: math.radians(j.limits[a][0]))

    def upper_rad(self) -> np.ndarray:
        return self._axis_array(lambda j, a: math.radians(j.limits[a][1]))

    def stiffness_array(self) -> np.ndarray:
        return self._axis_array(lambda j, a: j.stiffness[a])

    def damping_array(self) -> np.ndarray:
        return self._axis_array(lambda j, a: j.damping[a])

    def inertia_array(self) -> np.ndarray:
        return self._axis_array(lambda j, a: j.inertia[a])

    def rest_posture(self) -> "Posture":
        return Posture(self.rest_rad())


@dataclass(frozen=True)
class Posture:
    """Joint angles in radians, one per axis, in canonical axis order."""

    angles: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.angles, dtype=float).copy()
        arr.setflags(write=False)
        object.__setattr__(self, "angles", arr)

    def __len__(self) -> int:
        return self.angles.shape[0]


@dataclass(frozen=True)
class Diagnostic:
    """One validation finding: which invariant failed on which element."""

    element: str
    invariant: str
    message: str

    def __str__(self) -> str:
        return f"{self.element}: {self.invariant}: {self.message}"


# ---------------------------------------------------------------------------
# Default hand
# ---------------------------------------------------------------------------

# Distal : middle : proximal segment lengths are 2 : 3 : 5. Only the ratio is
# fixed by the design; the 50 mm proximal default approximates an adult male
# index finger.
_FOUR_FINGER_PROXIMAL_MM = {"index": 50.0, "middle": 54.0, "ring": 50.0, "little": 42.0}
_FOUR_FINGER_RADII_MM = {
    "index": (9.0, 8.0, 7.0),
    "middle": (9.0, 8.0, 7.0),
    "ring": (8.5, 7.5, 6.5),
    "little": (8.0, 7.0, 6.0),
}
_FOUR_FINGER_BASE_X_MM = {"index": 27.0, "middle": 9.0, "ring": -9.0, "little": -27.0}
_PALM_LENGTH_MM = 90.0

# Rest posture, degrees from full extension.
_REST_DEG = {"mp": 35.0, "pip": 40.0, "dip": 15.0}
# Joint ranges, degrees from full extension (human-range defaults).
_LIMITS_DEG = {"mp": (0.0, 90.0), "pip": (0.0, 110.0), "dip": (0.0, 80.0)}

# Centerline moment arms before the guide-exit correction. Only the DIP value
# is a measured quantity; MP and PIP are documented assumptions.
_BASE_ARM_MM = {"mp": 6.5, "pip": 6.0, "dip": 5.6}
_GUIDE_OFFSET_A_MM = 3.0
_GUIDE_ANGLE_THETA_DEG = 30.0

# Uncalibrated nominal stiffness; calibrate_stiffness replaces these.
_NOMINAL_STIFFNESS = 300.0

_THUMB_BASE_ORIGIN_MM = (30.0, 20.0, 0.0)
_THUMB_AZIMUTH_DEG = 25.0  # metacarpal direction from +x toward +y, in-plane
_THUMB_METACARPAL_MM = 45.0
_THUMB_PHALANX_MM = 50.0  # proximal and distal phalanges merged into one link
_THUMB_RADII_MM = (11.0, 10.0)
_THUMB_CM_REST_DEG = (10.0, 20.0)  # (adduction, opposition)
_THUMB_CM_LIMITS_DEG = ((0.0, 60.0), (0.0, 90.0))
_THUMB_MP_REST_DEG = 10.0
_THUMB_MP_LIMITS_DEG = (0.0, 80.0)
_THUMB_ARM_MM = {"cm_add": 10.0, "cm_opp": 10.0, "mp": 6.5}


def _rod_inertia(mass: float, length: float, offset: float) -> float:
    """Thin rod of given mass/length about a pivot `offset` before its near end."""
    return mass * ((offset + length) ** 3 - offset**3) / (3.0 * length)


def _chain_inertias(links: Sequence[Link]) -> list[float]:
    """Lumped inertia seen by each joint: all distal links, straight-chain pose."""
    masses = [math.pi * l.radius**2 * l.length * TISSUE_DENSITY_KG_PER_MM3 for l in links]
    out = []
    for i in range(len(links)):
        total, offset = 0.0, 0.0
        for l, m in zip(links[i:], masses[i:]):
            total += _rod_inertia(m, l.length, offset)
            offset += l.length
        out.append(total)
    return out


def _four_finger(name: str) -> Finger:
    prox = _FOUR_FINGER_PROXIMAL_MM[name]
    lengths = (prox, prox * 0.6, prox * 0.4)  # 5 : 3 : 2 base to tip
    radii = _FOUR_FINGER_RADII_MM[name]
    links = tuple(
        Link(seg, length, radius)
        for seg, length, radius in zip(("proximal", "middle", "distal"), lengths, radii)
    )
    inertias = _chain_inertias(links)
    joints = tuple(
        Joint(
            name=jn,
            kind="hinge",
            rest_angle=(_REST_DEG[jn],),
            stiffness=(_NOMINAL_STIFFNESS,),
            damping=(0.0,),
            limits=(_LIMITS_DEG[jn],),
            inertia=(inertias[i],),
        )
        for i, jn in enumerate(FOUR_FINGER_JOINT_NAMES)
    )
    base = Transform(origin_mm=(_FOUR_FINGER_BASE_X_MM[name], _PALM_LENGTH_MM, 0.0))
    return Finger(name=name, links=links, joints=joints, base_frame=base)


def _thumb() -> Finger:
    links = (
        Link("metacarpal", _THUMB_METACARPAL_MM, _THUMB_RADII_MM[0]),
        Link("phalanx", _THUMB_PHALANX_MM, _THUMB_RADII_MM[1]),
    )
    inertias = _chain_inertias(links)
    cm = Joint(
        name="cm",
        kind="spherical2dof",
        rest_angle=_THUMB_CM_REST_DEG,
        stiffness=(_NOMINAL_STIFFNESS, _NOMINAL_STIFFNESS),
        damping=(0.0, 0.0),
        limits=_THUMB_CM_LIMITS_DEG,
        inertia=(inertias[0], inertias[0]),
    )
    mp = Joint(
        name="mp",
        kind="hinge",
        rest_angle=(_THUMB_MP_REST_DEG,),
        stiffness=(_NOMINAL_STIFFNESS,),
        damping=(0.0,),
        limits=(_THUMB_MP_LIMITS_DEG,),
        inertia=(inertias[1],),
    )
    # Local +y maps to the metacarpal direction: rotate about z by azimuth-90.
    base = Transform(
        origin_mm=_THUMB_BASE_ORIGIN_MM, rpy_deg=(0.0, 0.0, _THUMB_AZIMUTH_DEG - 90.0)
    )
    return Finger(name="thumb", links=links, joints=(cm, mp), base_frame=base)


def _default_palm_patches() -> tuple[PalmPatch, ...]:
    return (
        PalmPatch("palm.distal_bar", (-30.0, 80.0, 0.0), (30.0, 80.0, 0.0), 11.0),
        PalmPatch("palm.center", (-20.0, 52.0, 0.0), (20.0, 52.0, 0.0), 11.0),
        PalmPatch("palm.hypothenar", (-26.0, 28.0, 0.0), (-30.0, 62.0, 0.0), 11.0),
        PalmPatch(
            "palm.thenar",
            (22.0, 22.0, 0.0),
            (36.0, 52.0, 0.0),
            11.0,
            follows_thumb_opposition=True,
        ),
    )


def build_default_hand() -> HandModel:
    """Build the default 15-DoF, 7-tendon hand.

    Four fingers each carry one flexor tendon crossing MP, PIP and DIP; the
    thumb carries a flexor (MP), an adductor (CM adduction axis) and an
    opponens (CM opposition axis). Four-finger crossings use the in-skeleton
    guide geometry (offset 3 mm, inclination 30 deg); the rigid thumb carries
    plain centerline arms.
    """
    fingers = (_thumb(),) + tuple(_four_finger(n) for n in FINGER_ORDER[1:])

    def flexor(finger: str) -> Tendon:
        crossings = tuple(
            RoutingCrossing(
                finger=finger,
                joint=jn,
                axis=0,
                base_arm_r0=_BASE_ARM_MM[jn],
                offset_a=_GUIDE_OFFSET_A_MM,
                angle_theta=_GUIDE_ANGLE_THETA_DEG,
                sign=1,
            )
            for jn in FOUR_FINGER_JOINT_NAMES
        )
        return Tendon(
            name=f"{finger}_flexor",
            crossings=crossings,
            muscle_analog="flexor digitorum profundus",
        )

    tendons = (
        flexor("index"),
        flexor("middle"),
        flexor("ring"),
        flexor("little"),
        Tendon(
            "thumb_flexor",
            (RoutingCrossing("thumb", "mp", 0, _THUMB_ARM_MM["mp"], 0.0, 0.0, 1),),
            muscle_analog="flexor pollicis brevis",
        ),
        Tendon(
            "thumb_adductor",
            (RoutingCrossing("thumb", "cm", 0, _THUMB_ARM_MM["cm_add"], 0.0, 0.0, 1),),
            muscle_analog="adductor pollicis",
        ),
        Tendon(
            "thumb_opponens",
            (RoutingCrossing("thumb", "cm", 1, _THUMB_ARM_MM["cm_opp"], 0.0, 0.0, 1),),
            muscle_analog="opponens pollicis",
        ),
    )
    return HandModel(
        name="default",
        fingers=fingers,
        tendons=tendons,
        palm_frame=Transform(),
        palm_patches=_default_palm_patches(),
    )


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


def validate(model: HandModel) -> list[Diagnostic]:
    """Check every structural invariant; returns an empty list iff all hold."""
    out: list[Diagnostic] = []

    def bad(element, invariant, message):
        out.append(Diagnostic(element, invariant, message))

    for f in model.fingers:
        for l in f.links:
            el = f"{f.name}.{l.name}"
            if not l.length > 0:
                bad(el, "link.length > 0", f"length = {l.length}")
            if not l.radius > 0:
                bad(el, "link.radius > 0", f"radius = {l.radius}")
        for j in f.joints:
            el = f"{f.name}.{j.name}"
            if j.kind not in ("hinge", "spherical2dof"):
                bad(el, "joint.kind known", f"kind = {j.kind!r}")
                continue
            n = j.n_axes
            for fieldname in ("rest_angle", "stiffness", "damping", "limits", "inertia"):
                if len(getattr(j, fieldname)) != n:
                    bad(el, "per-axis field lengths match joint kind", fieldname)
            for a in range(n):
                try:
                    k, c = j.stiffness[a], j.damping[a]
                    lim, rest = j.limits[a], j.rest_angle[a]
                except IndexError:
                    continue
                if not k > 0:
                    bad(el, "joint.stiffness > 0", f"axis {a}: stiffness = {k}")
                if c < 0:
                    bad(el, "joint.damping >= 0", f"axis {a}: damping = {c}")
                if not (lim[0] <= rest <= lim[1]):
                    bad(
                        el,
                        "limits.min <= rest_angle <= limits.max",
                        f"axis {a}: rest {rest} outside {lim}",
                    )
            if j.kind == "spherical2dof" and not (f.name == "thumb" and j.name == "cm"):
                bad(el, "spherical2dof only at the thumb CM joint", j.name)
        if f.name == "thumb":
            kinds = tuple(j.kind for j in f.joints)
            if kinds != ("spherical2dof", "hinge"):
                bad(f.name, "thumb joints are [CM spherical2dof, MP hinge]", str(kinds))
        else:
            if tuple(j.kind for j in f.joints) != ("hinge",) * 3 or len(f.joints) != 3:
                bad(f.name, "four-finger joints are [MP, PIP, DIP] hinges", f.name)

    joint_table = {
        (f.name, j.name): j.n_axes for f in model.fingers for j in f.joints
    }
    for t in model.tendons:
        if not t.crossings:
            bad(t.name, "tendon.crossings nonempty", "no crossings")
        seen: set[tuple[str, str, int]] = set()
        for c in t.crossings:
            el = f"{t.name}@{c.finger}.{c.joint}[{c.axis}]"
            key = (c.finger, c.joint)
            if key not in joint_table:
                bad(el, "crossing references an existing joint", f"{key} missing")
                continue
            if not (0 <= c.axis < joint_table[key]):
                bad(el, "crossing axis index in range", f"axis = {c.axis}")
            if (c.finger, c.joint, c.axis) in seen:
                bad(el, "tendon crosses each joint axis at most once", "duplicate")
            seen.add((c.finger, c.joint, c.axis))
            if not c.base_arm_r0 > 0:
                bad(el, "crossing.base_arm_r0 > 0", f"r0 = {c.base_arm_r0}")
            if c.offset_a < 0:
                bad(el, "crossing.offset_a >= 0", f"a = {c.offset_a}")
            if not (0 <= c.angle_theta < 90):
                bad(el, "0 <= crossing.angle_theta < 90", f"theta = {c.angle_theta}")
            if c.sign not in (1, -1):
                bad(el, "crossing.sign in {+1, -1}", f"sign = {c.sign}")

    for p in model.palm_patches:
        if not p.radius > 0:
            bad(p.name, "palm patch radius > 0", f"radius = {p.radius}")

    return out


# ---------------------------------------------------------------------------
# Scaling
# ---------------------------------------------------------------------------


def scale_hand(model: HandModel, factor: float) -> HandModel:
    """Uniformly scale every length, radius and moment-arm parameter.

    Angles, stiffnesses, damping and inertia defaults are unchanged.
    """
    if not factor > 0:
        raise ValueError(f"scale factor must be positive, got {factor}")

    def scale_tf(tf: Transform) -> Transform:
        return replace(tf, origin_mm=tuple(v * factor for v in tf.origin_mm))

    fingers = tuple(
        replace(
            f,
            links=tuple(
                replace(l, length=l.length * factor, radius=l.radius * factor)
                for l in f.links
            ),
            base_frame=scale_tf(f.base_frame),
        )
        for f in model.fingers
    )
    tendons = tuple(
        replace(
            t,
            crossings=tuple(
                replace(
                    c,
                    base_arm_r0=c.base_arm_r0 * factor,
                    offset_a=c.offset_a * factor,
                )
                for c in t.crossings
            ),
        )
        for t in model.tendons
    )
    patches = tuple(
        replace(
            p,
            p0_mm=tuple(v * factor for v in p.p0_mm),
            p1_mm=tuple(v * factor for v in p.p1_mm),
            radius=p.radius * factor,
        )
        for p in model.palm_patches
    )
    return replace(
        model,
        fingers=fingers,
        tendons=tendons,
        palm_frame=scale_tf(model.palm_frame),
        palm_patches=patches,
    )


# ---------------------------------------------------------------------------
# Hand configuration files (JSON, degrees and millimeters, unknown keys rejected)
# ---------------------------------------------------------------------------


class ConfigError(ValueError):
    """Malformed hand or scenario configuration; message names file and field."""


def _check_keys(obj: Mapping, allowed: Iterable[str], required: Iterable[str], where: str):
    allowed = set(allowed)
    for k in obj:
        if k not in allowed:
            raise ConfigError(f"{where}: unknown key {k!r}")
    for k in required:
        if k not in obj:
            raise ConfigError(f"{where}: missing key {k!r}")


def _transform_to_dict(tf: Transform) -> dict:
    return {"origin_mm": list(tf.origin_mm), "rpy_deg": list(tf.rpy_deg)}


def _transform_from_dict(d: Mapping, where: str) -> Transform:
    _check_keys(d, ("origin_mm", "rpy_deg"), ("origin_mm",), where)
    return Transform(
        origin_mm=_as_tuple3(d["origin_mm"]),
        rpy_deg=_as_tuple3(d.get("rpy_deg", (0.0, 0.0, 0.0))),
    )


def hand_to_dict(model: HandModel) -> dict:
    return {
        "schema_version": HAND_SCHEMA_VERSION,
        "name": model.name,
        "palm_frame": _transform_to_dict(model.palm_frame),
        "fingers": [
            {
                "name": f.name,
                "base_frame": _transform_to_dict(f.base_frame),
                "links": [
                    {"name": l.name, "length_mm": l.length, "radius_mm": l.radius}
                    for l in f.links
                ],
                "joints": [
                    {
                        "name": j.name,
                        "kind": j.kind,
                        "rest_deg": list(j.rest_angle),
                        "stiffness_nmm_per_rad": list(j.stiffness),
                        "damping_nmm_s_per_rad": list(j.damping),
                        "limits_deg": [list(lim) for lim in j.limits],
                        "inertia_kg_mm2": list(j.inertia),
                    }
                    for j in f.joints
                ],
            }
            for f in model.fingers
        ],
        "tendons": [
            {
                "name": t.name,
                "muscle_analog": t.muscle_analog,
                "crossings": [
                    {
                        "finger": c.finger,
                        "joint": c.joint,
                        "axis": c.axis,
                        "base_arm_r0_mm": c.base_arm_r0,
                        "offset_a_mm": c.offset_a,
                        "angle_theta_deg": c.angle_theta,
                        "sign": c.sign,
                    }
                    for c in t.crossings
                ],
            }
            for t in model.tendons
        ],
        "palm_patches": [
            {
                "name": p.name,
                "p0_mm": list(p.p0_mm),
                "p1_mm": list(p.p1_mm),
                "radius_mm": p.radius,
                "follows_thumb_opposition": p.follows_thumb_opposition,
            }
            for p in model.palm_patches
        ],
    }


def hand_from_dict(data: Mapping, where: str = "hand config") -> HandModel:
    _check_keys(
        data,
        ("schema_version", "name", "palm_frame", "fingers", "tendons", "palm_patches"),
        ("name", "fingers", "tendons"),
        where,
    )
    version = data.get("schema_version", HAND_SCHEMA_VERSION)
    if version != HAND_SCHEMA_VERSION:
        raise ConfigError(f"{where}: unsupported schema_version {version!r}")

    fingers = []
    for fd in data["fingers"]:
        fw = f"{where}: finger {fd.get('name', '?')!r}"
        _check_keys(fd, ("name", "base_frame", "links", "joints"), ("name", "links", "joints"), fw)
        links = []
        for ld in fd["links"]:
            _check_keys(ld, ("name", "length_mm", "radius_mm"), ("name", "length_mm", "radius_mm"), fw)
            links.append(Link(ld["name"], float(ld["length_mm"]), float(ld["radius_mm"])))
        joints = []
        for jd in fd["joints"]:
            jw = f"{fw}: joint {jd.get('name', '?')!r}"
            _check_keys(
                jd,
                (
                    "name",
                    "kind",
                    "rest_deg",
                    "stiffness_nmm_per_rad",
                    "damping_nmm_s_per_rad",
                    "limits_deg",
                    "inertia_kg_mm2",
                ),
                ("name", "kind", "rest_deg", "stiffness_nmm_per_rad", "limits_deg"),
                jw,
            )
            n = 2 if jd["kind"] == "spherical2dof" else 1
            joints.append(
                Joint(
                    name=jd["name"],
                    kind=jd["kind"],
                    rest_angle=tuple(float(x) for x in jd["rest_deg"]),
                    stiffness=tuple(float(x) for x in jd["stiffness_nmm_per_rad"]),
                    damping=tuple(float(x) for x in jd.get("damping_nmm_s_per_rad", [0.0] * n)),
                    limits=tuple(
                        (float(lo), float(hi)) for lo, hi in jd["limits_deg"]
                    ),
                    inertia=tuple(float(x) for x in jd.get("inertia_kg_mm2", [1.0] * n)),
                )
            )
        base = (
            _transform_from_dict(fd["base_frame"], fw)
            if "base_frame" in fd
            else Transform()
        )
        fingers.append(Finger(fd["name"], tuple(links), tuple(joints), base))

    tendons = []
    for td in data["tendons"]:
        tw = f"{where}: tendon {td.get('name', '?')!r}"
        _check_keys(td, ("name", "muscle_analog", "crossings"), ("name", "crossings"), tw)
        crossings = []
        for cd in td["crossings"]:
            _check_keys(
                cd,
                (
                    "finger",
                    "joint",
                    "axis",
                    "base_arm_r0_mm",
                    "offset_a_mm",
                    "angle_theta_deg",
                    "sign",
                ),
                ("finger", "joint", "base_arm_r0_mm"),
                tw,
            )
            crossings.append(
                RoutingCrossing(
                    finger=cd["finger"],
                    joint=cd["joint"],
                    axis=int(cd.get("axis", 0)),
                    base_arm_r0=float(cd["base_arm_r0_mm"]),
                    offset_a=float(cd.get("offset_a_mm", 0.0)),
                    angle_theta=float(cd.get("angle_theta_deg", 0.0)),
                    sign=int(cd.get("sign", 1)),
                )
            )
        tendons.append(Tendon(td["name"], tuple(crossings), td.get("muscle_analog", "")))

    patches = []
    for pd in data.get("palm_patches", []):
        pw = f"{where}: palm patch {pd.get('name', '?')!r}"
        _check_keys(
            pd,
            ("name", "p0_mm", "p1_mm", "radius_mm", "follows_thumb_opposition"),
            ("name", "p0_mm", "p1_mm", "radius_mm"),
            pw,
        )
        patches.append(
            PalmPatch(
                pd["name"],
                _as_tuple3(pd["p0_mm"]),
                _as_tuple3(pd["p1_mm"]),
                float(pd["radius_mm"]),
                bool(pd.get("follows_thumb_opposition", False)),
            )
        )

    palm_frame = (
        _transform_from_dict(data["palm_frame"], where)
        if "palm_frame" in data
        else Transform()
    )
    return HandModel(
        name=data["name"],
        fingers=tuple(fingers),
        tendons=tuple(tendons),
        palm_frame=palm_frame,
        palm_patches=tuple(patches),
    )


def save_hand(model: HandModel, path) -> None:
    with open(path, "w") as fh:
        json.dump(hand_to_dict(model), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_hand(path) -> HandModel:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as e:
        raise ConfigError(f"{path}: cannot read hand config: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: invalid JSON: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: hand config must be a JSON object")
    return hand_from_dict(data, where=str(path))
