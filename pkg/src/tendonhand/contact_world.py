"""Graspable objects, forward kinematics, and capsule-object contact geometry.

Every hand link is a capsule (3D segment plus radius). Objects are spheres,
finite cylinders, boxes, or dials (squat cylinders with a designated rotation
axis). Signed distance is the exact segment-to-shape distance minus the
capsule radius; negative means penetration.

Forward kinematics composes each finger chain from its palm mount: joint
rotations are intrinsic (each axis rotates the frames of everything distal
to it, including later axes of the same joint). The four palm patches are
rigid in the palm frame, except the thenar patch, which follows the thumb
opposition angle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from .hand_model import (
    ConfigError,
    HandModel,
    Posture,
    Transform,
    _check_keys,
)

_GRID_SAMPLES = 33
_GOLDEN_ITERS = 48
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
# Pairs whose cheap lower-bound distance exceeds this margin skip the exact
# narrow-phase search in batch queries; their reported gap is the bound.
_NEAR_MARGIN_MM = 10.0


# ---------------------------------------------------------------------------
# Shapes and world
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Sphere:
    radius: float


@dataclass(frozen=True)
class Cylinder:
    radius: float
    height: float  # full height along the local z axis


@dataclass(frozen=True)
class Box:
    ex: float  # half extents, mm
    ey: float
    ez: float


@dataclass(frozen=True)
class DiscDial:
    """Rotary dial: a squat cylinder free to spin about its fixed axis.

    The surface is rotationally symmetric, so spinning never moves geometry;
    the rotation angle is tracked kinematically by the dial scenario.
    """

    radius: float
    axis: tuple[float, float, float] = (0.0, 0.0, 1.0)  # local frame
    thickness: float = 6.0


Shape = Union[Sphere, Cylinder, Box, DiscDial]


@dataclass(frozen=True)
class Object:
    name: str
    shape: Shape
    pose: Transform = Transform()
    fixation: str = "fixed"  # "fixed" | "free"; equilibria treat both as pose-fixed


@dataclass(frozen=True)
class ContactWorld:
    objects: tuple[Object, ...] = ()


@dataclass(frozen=True)
class Capsule:
    """World-frame capsule for one hand link (or palm patch)."""

    name: str
    p0: np.ndarray
    p1: np.ndarray
    radius: float
    ancestors: tuple[int, ...] = ()  # joint-axis indices that move this capsule


@dataclass(frozen=True)
class Contact:
    link: str
    object: str
    point: np.ndarray  # witness on the object surface, mm
    normal: np.ndarray  # outward object normal (toward the link), unit
    gap: float  # mm, negative = penetration


# ---------------------------------------------------------------------------
# Forward kinematics
# ---------------------------------------------------------------------------

def _axis_rotation(axis: np.ndarray, angle: float) -> np.ndarray:
    """Rodrigues rotation about a unit axis."""
    c, s = math.cos(angle), math.sin(angle)
    x, y, z = axis
    C = 1.0 - c
    return np.array(
        [
            [c + x * x * C, x * y * C - z * s, x * z * C + y * s],
            [y * x * C + z * s, c + y * y * C, y * z * C - x * s],
            [z * x * C - y * s, z * y * C + x * s, c + z * z * C],
        ]
    )


# Local joint axes: hinges flex about +x. The thumb base adducts about +z
# (sweep within the palm plane) and opposes about +x (the saddle axis,
# in-plane and perpendicular to the metacarpal): opposition pitches the
# thumb column out of the palm plane and turns its flexion plane toward the
# palm center, so the tip can meet the flexed fingertips.
_AXIS_X = np.array([1.0, 0.0, 0.0])
_AXIS_Z = np.array([0.0, 0.0, 1.0])
_AXIS_NY = np.array([0.0, -1.0, 0.0])


def _rot_x(c, s):
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def _rot_z(c, s):
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def _rot_ny(c, s):
    # rotation about (0, -1, 0)
    return np.array([[c, 0.0, -s], [0.0, 1.0, 0.0], [s, 0.0, c]])


_AXIS_TAGS = {"x": (_AXIS_X, _rot_x), "z": (_AXIS_Z, _rot_z), "ny": (_AXIS_NY, _rot_ny)}


class _Skeleton:
    """Numeric arrays extracted once from a HandModel for fast kinematics."""

    def __init__(self, model: HandModel):
        palm_R = model.palm_frame.rotation()
        palm_o = model.palm_frame.origin()
        self.dof = model.dof
        self.fingers = []  # (base_R, base_o, [per-link (axis tags, length)], ...)
        self.cap_names: list[str] = []
        self.cap_radius: list[float] = []
        self.cap_ancestors: list[tuple[int, ...]] = []
        self.thumb_opp_axis: Optional[int] = None
        ai = 0
        for f in model.fingers:
            base_R = palm_R @ f.base_frame.rotation()
            base_o = palm_o + palm_R @ f.base_frame.origin()
            chain = []
            ancestors: list[int] = []
            for j, link in zip(f.joints, f.links):
                tags = ("z", "x") if j.kind == "spherical2dof" else ("x",)
                if f.name == "thumb" and j.name == "cm":
                    self.thumb_opp_axis = ai + 1
                axis_ids = tuple(range(ai, ai + len(tags)))
                ai += len(tags)
                ancestors.extend(axis_ids)
                chain.append((tags, axis_ids, link.length))
                self.cap_names.append(f"{f.name}.{link.name}")
                self.cap_radius.append(link.radius)
                self.cap_ancestors.append(tuple(ancestors))
            self.fingers.append((base_R, base_o, chain))
        self.palm = []
        for p in model.palm_patches:
            self.palm.append(
                (
                    palm_o + palm_R @ np.asarray(p.p0_mm, float),
                    palm_o + palm_R @ np.asarray(p.p1_mm, float),
                    p.follows_thumb_opposition,
                )
            )
            self.cap_names.append(p.name)
            self.cap_radius.append(p.radius)
            self.cap_ancestors.append(
                (self.thumb_opp_axis,)
                if p.follows_thumb_opposition and self.thumb_opp_axis is not None
                else ()
            )
        self.radius = np.array(self.cap_radius)


_SKELETON_CACHE: "dict[int, tuple[HandModel, _Skeleton]]" = {}


def _skeleton(model: HandModel) -> _Skeleton:
    key = id(model)
    hit = _SKELETON_CACHE.get(key)
    if hit is not None and hit[0] is model:
        return hit[1]
    skel = _Skeleton(model)
    if len(_SKELETON_CACHE) > 64:
        _SKELETON_CACHE.clear()
    _SKELETON_CACHE[key] = (model, skel)
    return skel


class FKState:
    """Capsule geometry plus the world pose of every joint axis at one posture."""

    def __init__(self, skel: _Skeleton, seg0, seg1, axis_origin, axis_dir):
        self._skel = skel
        self.seg0 = seg0  # (n_capsules, 3)
        self.seg1 = seg1
        self.radius = skel.radius
        self.names = skel.cap_names
        self.ancestors = skel.cap_ancestors
        self.axis_origin = axis_origin  # (dof, 3)
        self.axis_dir = axis_dir  # (dof, 3), unit

    @property
    def capsules(self) -> list[Capsule]:
        return [
            Capsule(n, self.seg0[i], self.seg1[i], float(self.radius[i]), self.ancestors[i])
            for i, n in enumerate(self.names)
        ]

    def capsule(self, name: str) -> Capsule:
        for i, n in enumerate(self.names):
            if n == name:
                return Capsule(
                    n, self.seg0[i], self.seg1[i], float(self.radius[i]), self.ancestors[i]
                )
        raise KeyError(name)


def forward_kinematics(model: HandModel, posture: Posture) -> FKState:
    if len(posture) != model.dof:
        raise ValueError(
            f"posture has {len(posture)} entries, model has {model.dof} axes"
        )
    skel = _skeleton(model)
    angles = posture.angles
    n_caps = len(skel.cap_names)
    seg0 = np.empty((n_caps, 3))
    seg1 = np.empty((n_caps, 3))
    axis_origin = np.empty((skel.dof, 3))
    axis_dir = np.empty((skel.dof, 3))

    ci = 0
    opp_anchor = None
    for base_R, base_o, chain in skel.fingers:
        R = base_R
        o = base_o
        for tags, axis_ids, length in chain:
            for tag, ai in zip(tags, axis_ids):
                local_axis, rot = _AXIS_TAGS[tag]
                axis_origin[ai] = o
                axis_dir[ai] = R @ local_axis
                if ai == skel.thumb_opp_axis:
                    opp_anchor = (o, axis_dir[ai], angles[ai])
                a = angles[ai]
                R = R @ rot(math.cos(a), math.sin(a))
            tip = o + length * R[:, 1]
            seg0[ci] = o
            seg1[ci] = tip
            o = tip
            ci += 1

    for p0, p1, follows in skel.palm:
        if follows and opp_anchor is not None:
            anchor, axis, angle = opp_anchor
            Rp = _axis_rotation(axis, angle)
            seg0[ci] = anchor + Rp @ (p0 - anchor)
            seg1[ci] = anchor + Rp @ (p1 - anchor)
        else:
            seg0[ci] = p0
            seg1[ci] = p1
        ci += 1

    return FKState(skel, seg0, seg1, axis_origin, axis_dir)


def link_capsules(model: HandModel, posture: Posture) -> list[Capsule]:
    """One world-frame capsule per link plus the palm patches."""
    return forward_kinematics(model, posture).capsules


# ---------------------------------------------------------------------------
# Point signed-distance kernels (object local frame, vectorized over points)
# ---------------------------------------------------------------------------


def _points_sphere(P: np.ndarray, radius: float):
    d = np.linalg.norm(P, axis=-1)
    safe = np.where(d > 1e-12, d, 1.0)
    n = P / safe[..., None]
    n = np.where(d[..., None] > 1e-12, n, np.array([1.0, 0.0, 0.0]))
    sd = d - radius
    cp = radius * n
    return sd, cp, n


def _points_box(P: np.ndarray, e: np.ndarray):
    q = np.abs(P) - e
    qpos = np.maximum(q, 0.0)
    outside = np.linalg.norm(qpos, axis=-1)
    inside = np.minimum(np.max(q, axis=-1), 0.0)
    sd = outside + inside

    cp_out = np.clip(P, -e, e)
    diff = P - cp_out
    dn = np.where(outside > 1e-12, outside, 1.0)
    n_out = diff / dn[..., None]

    # Inside: project to the nearest face.
    k = np.argmax(q, axis=-1)
    sign = np.where(np.take_along_axis(P, k[..., None], -1) >= 0.0, 1.0, -1.0)
    n_in = np.zeros_like(P)
    np.put_along_axis(n_in, k[..., None], sign, -1)
    cp_in = P.copy()
    np.put_along_axis(cp_in, k[..., None], sign * e[k][..., None], -1)

    is_out = (outside > 1e-12)[..., None]
    return sd, np.where(is_out, cp_out, cp_in), np.where(is_out, n_out, n_in)


def _points_cylinder(P: np.ndarray, radius: float, half_h: float):
    rxy = np.hypot(P[..., 0], P[..., 1])
    dr = rxy - radius
    dz = np.abs(P[..., 2]) - half_h
    zsign = np.where(P[..., 2] >= 0.0, 1.0, -1.0)

    safe = np.where(rxy > 1e-12, rxy, 1.0)
    u = np.stack([P[..., 0] / safe, P[..., 1] / safe, np.zeros_like(rxy)], axis=-1)
    u = np.where(rxy[..., None] > 1e-12, u, np.array([1.0, 0.0, 0.0]))

    out = np.hypot(np.maximum(dr, 0.0), np.maximum(dz, 0.0))
    ins = np.minimum(np.maximum(dr, dz), 0.0)
    sd = np.where((dr > 0) | (dz > 0), out, ins)

    side_cp = radius * u + np.stack(
        [np.zeros_like(rxy), np.zeros_like(rxy), np.clip(P[..., 2], -half_h, half_h)],
        axis=-1,
    )
    cap_cp = np.stack([P[..., 0], P[..., 1], zsign * half_h], axis=-1)
    rim_cp = radius * u
    rim_cp[..., 2] = zsign * half_h

    cap_n = np.stack([np.zeros_like(rxy), np.zeros_like(rxy), zsign], axis=-1)
    rim_diff = P - rim_cp
    rim_d = np.linalg.norm(rim_diff, axis=-1)
    rim_n = rim_diff / np.where(rim_d > 1e-12, rim_d, 1.0)[..., None]

    side = (dr >= dz)[..., None]  # inside: nearer to the side wall than a cap
    cp = np.where(side, side_cp, cap_cp)
    n = np.where(side, u, cap_n)
    # Outside overrides by region.
    out_side = ((dr > 0) & (dz <= 0))[..., None]
    out_cap = ((dz > 0) & (dr <= 0))[..., None]
    out_rim = ((dr > 0) & (dz > 0))[..., None]
    cp = np.where(out_side, side_cp, cp)
    n = np.where(out_side, u, n)
    cp = np.where(out_cap, cap_cp, cp)
    n = np.where(out_cap, cap_n, n)
    cp = np.where(out_rim, rim_cp, cp)
    n = np.where(out_rim, rim_n, n)
    return sd, cp, n


def _points_sd_only(P: np.ndarray, shape: Shape) -> np.ndarray:
    """Signed distance values only; the cheap kernel for the line search."""
    if isinstance(shape, Sphere):
        return np.linalg.norm(P, axis=-1) - shape.radius
    if isinstance(shape, Box):
        e = np.array([shape.ex, shape.ey, shape.ez])
        q = np.abs(P) - e
        return np.linalg.norm(np.maximum(q, 0.0), axis=-1) + np.minimum(
            np.max(q, axis=-1), 0.0
        )
    if isinstance(shape, (Cylinder, DiscDial)):
        r = shape.radius
        h = (shape.height if isinstance(shape, Cylinder) else shape.thickness) / 2.0
        dr = np.hypot(P[..., 0], P[..., 1]) - r
        dz = np.abs(P[..., 2]) - h
        out = np.hypot(np.maximum(dr, 0.0), np.maximum(dz, 0.0))
        return np.where((dr > 0) | (dz > 0), out, np.maximum(dr, dz))
    raise TypeError(f"unsupported shape {type(shape).__name__}")


def _segment_lower_bounds(A: np.ndarray, B: np.ndarray, shape: Shape) -> np.ndarray:
    """Cheap per-segment lower bounds on the distance to the shape surface."""
    if isinstance(shape, Sphere):
        # exact via the closed form below, no bound needed
        return np.full(A.shape[0], -np.inf)
    if isinstance(shape, (Cylinder, DiscDial)):
        r = shape.radius
        h = (shape.height if isinstance(shape, Cylinder) else shape.thickness) / 2.0
        # radial: 2D point-segment distance from the origin to the xy projection
        a2, b2 = A[:, :2], B[:, :2]
        d2 = b2 - a2
        dd = np.einsum("ij,ij->i", d2, d2)
        t = np.where(dd > 1e-18, -np.einsum("ij,ij->i", a2, d2) / np.where(dd > 1e-18, dd, 1.0), 0.0)
        t = np.clip(t, 0.0, 1.0)
        radial = np.linalg.norm(a2 + t[:, None] * d2, axis=1) - r
        zlo = np.minimum(A[:, 2], B[:, 2])
        zhi = np.maximum(A[:, 2], B[:, 2])
        axial = np.maximum(np.maximum(zlo - h, -h - zhi), 0.0)
        return np.maximum(radial, axial)
    if isinstance(shape, Box):
        e = np.array([shape.ex, shape.ey, shape.ez])
        lo = np.minimum(A, B)
        hi = np.maximum(A, B)
        slab = np.maximum(np.maximum(lo - e, -e - hi), 0.0)
        return np.linalg.norm(slab, axis=1)
    raise TypeError(f"unsupported shape {type(shape).__name__}")


def _object_frame(obj: Object) -> tuple[np.ndarray, np.ndarray]:
    """Local computation frame; cylinders and dials get their axis on local z."""
    R = obj.pose.rotation()
    o = obj.pose.origin()
    if isinstance(obj.shape, DiscDial):
        a = np.asarray(obj.shape.axis, float)
        norm = np.linalg.norm(a)
        if norm < 1e-12:
            raise ValueError(f"object {obj.name!r}: dial axis must be nonzero")
        a = a / norm
        z = np.array([0.0, 0.0, 1.0])
        v = np.cross(z, a)
        s, c = np.linalg.norm(v), float(z @ a)
        if s < 1e-12:
            align = np.eye(3) if c > 0 else _axis_rotation(np.array([1.0, 0.0, 0.0]), math.pi)
        else:
            align = _axis_rotation(v / s, math.atan2(s, c))
        R = R @ align
    return R, o


def _points_signed_distance(P_local: np.ndarray, shape: Shape):
    if isinstance(shape, Sphere):
        return _points_sphere(P_local, shape.radius)
    if isinstance(shape, Box):
        return _points_box(P_local, np.array([shape.ex, shape.ey, shape.ez]))
    if isinstance(shape, Cylinder):
        return _points_cylinder(P_local, shape.radius, shape.height / 2.0)
    if isinstance(shape, DiscDial):
        return _points_cylinder(P_local, shape.radius, shape.thickness / 2.0)
    raise TypeError(f"unsupported shape {type(shape).__name__}")


def _closest_t(A, B, shape: Shape) -> "np.ndarray":
    """Per-segment parameter of the closest approach, object local frame."""
    if isinstance(shape, Sphere):
        d = B - A
        dd = np.einsum("ij,ij->i", d, d)
        t = np.where(
            dd > 1e-18, -np.einsum("ij,ij->i", A, d) / np.where(dd > 1e-18, dd, 1.0), 0.0
        )
        return np.clip(t, 0.0, 1.0)
    # The point-distance field is convex outside the shape: bracket on a
    # grid, then golden-section refine per segment (both probes batched).
    ts = np.linspace(0.0, 1.0, _GRID_SAMPLES)
    pts = A[:, None, :] + ts[None, :, None] * (B - A)[:, None, :]
    sd = _points_sd_only(pts, shape)
    best = np.argmin(sd, axis=1)
    lo = ts[np.maximum(best - 1, 0)]
    hi = ts[np.minimum(best + 1, _GRID_SAMPLES - 1)]
    d = B - A
    for _ in range(_GOLDEN_ITERS):
        x1 = hi - _INVPHI * (hi - lo)
        x2 = lo + _INVPHI * (hi - lo)
        probes = np.concatenate([A + x1[:, None] * d, A + x2[:, None] * d])
        f = _points_sd_only(probes, shape)
        f1, f2 = f[: len(x1)], f[len(x1):]
        pick1 = f1 < f2
        hi = np.where(pick1, x2, hi)
        lo = np.where(pick1, lo, x1)
    return 0.5 * (lo + hi)


def _segments_to_object(P0, P1, obj: Object):
    """Closest approach of N segments to one object.

    Returns (distance to the shape surface, witness on the surface, outward
    normal, witness on the segment), all world frame. Capsule radii are not
    applied here.
    """
    R, o = _object_frame(obj)
    A = (P0 - o) @ R  # local coordinates
    B = (P1 - o) @ R
    t = _closest_t(A, B, obj.shape)
    P = A + t[:, None] * (B - A)
    sd, cp, n = _points_signed_distance(P, obj.shape)
    # Back to world frame.
    w_cp = cp @ R.T + o
    w_n = n @ R.T
    w_seg = P @ R.T + o
    return sd, w_cp, w_n, w_seg, t


def signed_distance(capsule: Capsule, obj: Object) -> float:
    """Exact capsule-to-object signed distance, mm; negative inside."""
    sd, *_ = _segments_to_object(capsule.p0[None, :], capsule.p1[None, :], obj)
    return float(sd[0]) - capsule.radius


def closest_point(capsule: Capsule, obj: Object) -> tuple[float, "np.ndarray", "np.ndarray", "np.ndarray"]:
    """(gap, witness on object, outward normal, witness on the capsule axis)."""
    sd, cp, n, seg, _ = _segments_to_object(capsule.p0[None, :], capsule.p1[None, :], obj)
    return float(sd[0]) - capsule.radius, cp[0], n[0], seg[0]


def capsules_to_object(capsules: Sequence[Capsule], obj: Object):
    """Batch gaps for many capsules against one object (vectorized, exact)."""
    P0 = np.stack([c.p0 for c in capsules])
    P1 = np.stack([c.p1 for c in capsules])
    radii = np.array([c.radius for c in capsules])
    sd, cp, n, seg, t = _segments_to_object(P0, P1, obj)
    return sd - radii, cp, n, seg


def fk_gaps(fk: FKState, obj: Object):
    """(gap, surface witness, outward normal, capsule-axis witness) per capsule.

    Uses a broad phase: pairs whose cheap lower-bound distance exceeds the
    near margin report that bound as the gap with placeholder geometry.
    Contact tolerances and solver penalty zones are far below the margin, so
    callers never consume far-pair geometry.
    """
    R, o = _object_frame(obj)
    A = (fk.seg0 - o) @ R
    B = (fk.seg1 - o) @ R
    radii = fk.radius
    n_seg = A.shape[0]
    bounds = _segment_lower_bounds(A, B, obj.shape)
    near = bounds - radii <= _NEAR_MARGIN_MM

    gap = bounds - radii
    cp = 0.5 * (fk.seg0 + fk.seg1)
    nrm = np.tile(np.array([0.0, 0.0, 1.0]), (n_seg, 1))
    seg = cp.copy()
    if np.any(near):
        t = _closest_t(A[near], B[near], obj.shape)
        P = A[near] + t[:, None] * (B[near] - A[near])
        sd, cpl, nl = _points_signed_distance(P, obj.shape)
        gap[near] = sd - radii[near]
        cp[near] = cpl @ R.T + o
        nrm[near] = nl @ R.T
        seg[near] = P @ R.T + o
    return gap, cp, nrm, seg


def detect_contacts(
    model: HandModel,
    posture: Posture,
    world: ContactWorld,
    tolerance: float = 0.0,
) -> list[Contact]:
    """All (link, object) pairs with signed distance <= tolerance."""
    if tolerance < 0:
        raise ValueError("contact tolerance must be >= 0")
    fk = forward_kinematics(model, posture)
    return contacts_from_fk(fk, world, tolerance)


def contacts_from_fk(fk: FKState, world: ContactWorld, tolerance: float) -> list[Contact]:
    out: list[Contact] = []
    if not world.objects:
        return out
    for obj in world.objects:
        gaps, cps, ns, _ = fk_gaps(fk, obj)
        for i, name in enumerate(fk.names):
            if gaps[i] <= tolerance:
                out.append(
                    Contact(
                        link=name,
                        object=obj.name,
                        point=cps[i],
                        normal=ns[i],
                        gap=float(gaps[i]),
                    )
                )
    return out


# ---------------------------------------------------------------------------
# Scenario-file object serialization (mm and degrees throughout)
# ---------------------------------------------------------------------------


def object_to_dict(obj: Object) -> dict:
    d: dict = {
        "name": obj.name,
        "pose": {"origin_mm": list(obj.pose.origin_mm), "rpy_deg": list(obj.pose.rpy_deg)},
        "fixation": obj.fixation,
    }
    s = obj.shape
    if isinstance(s, Sphere):
        d.update(shape="sphere", radius_mm=s.radius)
    elif isinstance(s, Cylinder):
        d.update(shape="cylinder", radius_mm=s.radius, height_mm=s.height)
    elif isinstance(s, Box):
        d.update(shape="box", half_extents_mm=[s.ex, s.ey, s.ez])
    elif isinstance(s, DiscDial):
        d.update(
            shape="disc_dial",
            radius_mm=s.radius,
            axis=list(s.axis),
            thickness_mm=s.thickness,
        )
    else:
        raise TypeError(f"unsupported shape {type(s).__name__}")
    return d


def object_from_dict(d: Mapping, where: str = "scenario") -> Object:
    _check_keys(
        d,
        (
            "name",
            "shape",
            "pose",
            "fixation",
            "radius_mm",
            "height_mm",
            "half_extents_mm",
            "axis",
            "thickness_mm",
        ),
        ("name", "shape"),
        where,
    )
    kind = d["shape"]
    if kind == "sphere":
        shape: Shape = Sphere(float(d["radius_mm"]))
    elif kind == "cylinder":
        shape = Cylinder(float(d["radius_mm"]), float(d["height_mm"]))
    elif kind == "box":
        ex, ey, ez = (float(v) for v in d["half_extents_mm"])
        shape = Box(ex, ey, ez)
    elif kind == "disc_dial":
        shape = DiscDial(
            float(d["radius_mm"]),
            tuple(float(v) for v in d.get("axis", (0.0, 0.0, 1.0))),
            float(d.get("thickness_mm", 6.0)),
        )
    else:
        raise ConfigError(f"{where}: object {d['name']!r}: unknown shape {kind!r}")
    for fieldname, dims in (("radius_mm", 1), ("height_mm", 1), ("thickness_mm", 1)):
        if fieldname in d and float(d[fieldname]) <= 0:
            raise ConfigError(f"{where}: object {d['name']!r}: {fieldname} must be > 0")
    if "half_extents_mm" in d and any(float(v) <= 0 for v in d["half_extents_mm"]):
        raise ConfigError(f"{where}: object {d['name']!r}: half_extents_mm must be > 0")
    pose = Transform()
    if "pose" in d:
        pd = d["pose"]
        _check_keys(pd, ("origin_mm", "rpy_deg"), ("origin_mm",), f"{where}: object {d['name']!r} pose")
        pose = Transform(
            origin_mm=tuple(float(v) for v in pd["origin_mm"]),
            rpy_deg=tuple(float(v) for v in pd.get("rpy_deg", (0.0, 0.0, 0.0))),
        )
    fixation = d.get("fixation", "fixed")
    if fixation not in ("fixed", "free"):
        raise ConfigError(f"{where}: object {d['name']!r}: fixation must be fixed|free")
    return Object(name=d["name"], shape=shape, pose=pose, fixation=fixation)


def world_to_dict(world: ContactWorld) -> list[dict]:
    return [object_to_dict(o) for o in world.objects]


def world_from_list(items: Sequence[Mapping], where: str = "scenario") -> ContactWorld:
    return ContactWorld(tuple(object_from_dict(d, where) for d in items))
