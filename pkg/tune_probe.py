# scratch: derive catalog geometry + excursions, validate all 16 classes
import dataclasses
import math
import sys
import time

import numpy as np

from tendonhand.calibration import calibrated_default_hand
from tendonhand.contact_world import (
    Box,
    ContactWorld,
    Cylinder,
    Object,
    Sphere,
    detect_contacts,
    fk_gaps,
    forward_kinematics,
    signed_distance,
)
from tendonhand.grasp_taxonomy import GraspScenario, grasp_class, run_scenario, _fixed_axes
from tendonhand.hand_model import Posture, Transform
from tendonhand.statics import ActuationCommand, equilibrium_tension
from tendonhand.tendon_geometry import tendon_arm_matrix

hand = calibrated_default_hand()
A = tendon_arm_matrix(hand)
rest = hand.rest_rad()
rest_fk = forward_kinematics(hand, hand.rest_posture())
static_palm_idx = [
    i for i, n in enumerate(rest_fk.names)
    if n.startswith("palm.") and n != "palm.thenar"
]
XA = (0.0, 90.0, 0.0)
YA = (-90.0, 0.0, 0.0)


def obj(name, shape, origin, rpy=(0.0, 0.0, 0.0)):
    return Object(name, shape, Transform(tuple(float(v) for v in np.round(origin, 2)), tuple(rpy)))


def snap_palm(o, clearance=0.2):
    # rest 0.2 mm above the static palm patches (thenar may fold away)
    g, *_ = fk_gaps(rest_fk, o)
    gap = float(np.min(g[static_palm_idx]))
    orig = list(o.pose.origin_mm)
    orig[2] -= gap - clearance
    return dataclasses.replace(o, pose=dataclasses.replace(o.pose, origin_mm=tuple(np.round(orig, 2))))


def free_tips(fractions):
    res = equilibrium_tension(hand, ActuationCommand.tension(52.7 * np.asarray(fractions)))
    fk = forward_kinematics(hand, res.posture)
    return {n: fk.capsule(n).p1 for n in
            ("thumb.phalanx", "index.distal", "middle.distal", "ring.distal", "little.distal")}


_thumb_cache = {}


def thumb_tip(fa, fo, fx):
    key = (round(fa, 3), round(fo, 3), round(fx, 3))
    if key not in _thumb_cache:
        _thumb_cache[key] = free_tips([0, 0, 0, 0, fx, fa, fo])["thumb.phalanx"]
    return _thumb_cache[key]


def find_thumb(target, fa_range, fo_range, fx_range):
    best = None
    for fa in fa_range:
        for fo in fo_range:
            for fx in fx_range:
                d = float(np.linalg.norm(thumb_tip(fa, fo, fx) - target))
                if best is None or d < best[0]:
                    best = (d, fa, fo, fx)
    return best


# fingertip fractions used to place precision objects
F_PRECISION = 0.5
tips = free_tips([F_PRECISION] * 4 + [0, 0, 0])


def rod_center(digits, r):
    pts = np.array([tips[f"{d}.distal"] for d in digits])
    mean_yz = pts[:, 1:].mean(axis=0)
    push = np.array([0.55, 0.80])
    push = push / np.linalg.norm(push)
    c_yz = mean_yz - push * (r + 4.0)
    x_lo = min(pts[:, 0]) - 12.0
    x_hi = max(pts[:, 0]) + 14.0
    return (0.5 * (x_lo + x_hi), c_yz[0], c_yz[1]), (x_hi - x_lo)


# precision objects sit between the finger planes and the thumb wall at
# x ~ 37, so lateral (+x vs -x) opposition is available
sph6 = np.array([0.0, 68.0, 50.0])
sph7 = np.array([6.0, 66.0, 54.0])
rod8 = np.array([18.0, 64.0, 53.0])
sph9 = np.array([32.0, 66.0, 55.0])
sph13 = np.array([6.0, 64.0, 53.0])
sph14 = np.array([18.0, 64.0, 55.0])
disc12 = np.array([12.0, 70.0, 52.0])

WORLDS = {
    1: obj("barrel", Cylinder(25.0, 140.0), (0.0, 68.0, 36.0), XA),
    2: obj("handle", Cylinder(12.5, 140.0), (0.0, 62.0, 24.0), XA),
    3: obj("bar", Cylinder(18.0, 140.0), (0.0, 64.0, 29.0), XA),
    4: obj("tool", Cylinder(15.0, 140.0), (0.0, 64.0, 26.5), XA),
    5: obj("stick", Cylinder(7.0, 140.0), (0.0, 60.0, 18.0), XA),
    6: obj("ball", Sphere(22.0), sph6),
    7: obj("ball", Sphere(18.0), sph7),
    8: obj("pen", Cylinder(10.0, 60.0), rod8, YA),
    9: obj("bead", Sphere(10.0), sph9),
    10: obj("lid", Cylinder(40.0, 16.0), (0.0, 45.0, 19.2)),
    11: obj("ball", Sphere(20.0), (0.0, 62.0, 31.0)),
    12: obj("disc", Cylinder(22.0, 8.0), disc12, YA),
    13: obj("ball", Sphere(15.0), sph13),
    14: obj("ball", Sphere(11.0), sph14),
    15: obj("book", Box(16.0, 30.0, 4.0), (-6.0, 55.0, 16.0)),
    16: obj("card", Box(3.0, 18.0, 10.0), (37.4, 84.0, 53.5)),
}
SNAP = {1, 2, 3, 4, 5, 10, 11, 15}

# finger probe fractions per class (index, middle, ring, little)
FINGERS_F = {
    1: (0.6, 0.6, 0.6, 0.6),
    2: (0.75, 0.75, 0.75, 0.75),
    3: (0.68, 0.68, 0.68, 0.68),
    4: (0.68, 0.68, 0.68, 0.68),
    5: (0.85, 0.85, 0.85, 0.85),
    6: (0.55, 0.5, 0.5, 0.55),
    7: (0.55, 0.5, 0.55, 0.0),
    8: (0.5, 0.5, 0.0, 0.0),
    9: (0.5, 0.0, 0.0, 0.0),
    10: (0.9, 0.9, 0.9, 0.9),
    11: (0.8, 0.62, 0.62, 0.8),
    12: (0.5, 0.5, 0.5, 0.0),
    13: (0.56, 0.52, 0.56, 0.0),
    14: (0.5, 0.5, 0.0, 0.0),
    15: (0.0, 0.0, 0.0, 0.0),
    16: (0.8, 0.8, 0.8, 0.8),
}
# fixed thumb fractions for the wraps (low opposition presses the side)
THUMB_F = {
    1: (0.5, 0.3, 0.1),  # (flex, add, opp)
    2: (0.55, 0.3, 0.1),
    3: (0.5, 0.3, 0.1),
    5: (0.6, 0.3, 0.1),
    10: (0.5, 0.35, 0.02),
    11: (0.55, 0.45, 0.12),
    15: (0.0, 0.0, 0.0),
    16: (0.35, 0.75, 0.06),
}
# precision classes: search the thumb posture pressing from under the object
UNDER = {
    6: (WORLDS[6].pose.origin(), 12.0),
    7: (WORLDS[7].pose.origin(), 11.0),
    8: (WORLDS[8].pose.origin(), 10.0),
    9: (np.asarray(sph9), 10.0),
    12: (disc12, 22.0),
    13: (sph13, 14.0),
    14: (sph14, 11.0),
}


def solve_class4_override(world):
    best = None
    for add in np.linspace(10, 60, 11):
        for opp in np.linspace(0, 45, 10):
            for mp in np.linspace(0, 70, 15):
                angles = rest.copy()
                angles[0] = math.radians(add)
                angles[1] = math.radians(opp)
                angles[2] = math.radians(mp)
                fk = forward_kinematics(hand, Posture(angles))
                gap = signed_distance(fk.capsule("thumb.phalanx"), world.objects[0])
                score = abs(gap - 0.1)
                if best is None or score < best[0]:
                    best = (score, add, opp, mp, gap)
    _, add, opp, mp, gap = best
    return {"thumb.cm.add": round(add, 1), "thumb.cm.opp": round(opp, 1), "thumb.mp": round(mp, 1)}, gap


def ramp(e_cmd, steps=4):
    neg = np.minimum(e_cmd, 0.0)
    pos = np.maximum(e_cmd, 0.0)
    return tuple(ActuationCommand.excursion(neg + pos * (i / steps)) for i in range(1, steps + 1))


only = {int(a) for a in sys.argv[1:]} if len(sys.argv) > 1 else None
for cid in range(1, 17):
    if only and cid not in only:
        continue
    t0 = time.time()
    o = WORLDS[cid]
    if cid in SNAP:
        o = snap_palm(o)
    world = ContactWorld((o,))
    overrides = None
    if cid == 4:
        overrides, g4 = solve_class4_override(world)
        print(f" 4 override {overrides} (gap {g4:.3f})")
    if cid in UNDER:
        thumb_f = (0.75, 0.9, 0.05)
    elif cid == 4:
        thumb_f = (0.0, 0.0, 0.0)
    else:
        thumb_f = THUMB_F[cid]
    fr = FINGERS_F[cid]
    T = 52.7 * np.array(list(fr) + list(thumb_f))
    fixed = _fixed_axes(hand, overrides)
    warm, ok = None, True
    for frac in (1 / 3, 2 / 3, 1.0):
        res = equilibrium_tension(hand, ActuationCommand.tension(T * frac), world, initial=warm, fixed_axes=fixed)
        warm = res.posture
        ok &= res.converged
    e_probe = A @ (res.posture.angles - rest)
    e_cmd = e_probe.copy()
    e_cmd[:4] *= 1.02
    e_cmd[4:] = np.where(e_cmd[4:] >= 0, e_cmd[4:] * 0.999 / 1.02, e_cmd[4:] * 1.05 - 0.2)
    if overrides:
        e_cmd[4:] = -6.0
    if cid == 15:
        e_cmd[:] = 0.0
    e_cmd = np.round(e_cmd, 2)
    sc = GraspScenario(grasp_class(cid), world, ramp(e_cmd), overrides)
    try:
        res2 = run_scenario(hand, sc)
    except Exception as e:
        print(f"{cid:2d} EXC {type(e).__name__}: {e}")
        continue
    marks = " ".join(f"{k}={'Y' if v else 'N'}" for k, v in res2.criteria_report.items())
    print(
        f"{cid:2d} {sc.grasp_class.name:28s} {res2.verdict:8s} [{marks}] probe_ok={ok} {time.time()-t0:5.1f}s obj@{tuple(o.pose.origin_mm)}"
    )
    print(f"    e_cmd={e_cmd.tolist()}")
    for c in res2.contacts:
        print(f"     {c.link:18s} gap={c.gap:7.3f} n={np.round(c.normal,2)}")
