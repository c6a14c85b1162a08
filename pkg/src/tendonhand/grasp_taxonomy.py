"""Scripted grasp catalog, success rules, and the dial-turning scenario.

The catalog covers the 16 grasp classes of the classic power/precision
taxonomy, each as a fixed object plus a ramped excursion script for the
seven tendons. Objects are pose-fixed (mirroring experiments where a helper
holds the object at a graspable point); success is judged from the contact
pattern at the final equilibrium.

Success rules (original encoding, thresholds below):

* power classes need at least one contact on the palm or a non-distal link
  and a pair of contact normals more than 120 degrees apart (opposition);
* the platform class needs palm-patch support only;
* precision classes need all contacts on distal links (the thumb's merged
  phalanx counts as its distal link), the class digit set covered, and an
  opposing normal pair.

The dial scenario holds a fixed-axis disc between thumb and index and
integrates rim rotation from the tangential motion of the contact points
under a no-slip assumption.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .contact_world import Contact, ContactWorld, DiscDial, Object, Sphere, Cylinder, Box, detect_contacts
from .hand_model import HandModel, Posture, Transform
from .statics import ActuationCommand, EquilibriumResult, equilibrium_excursion

POWER = "power"
PRECISION = "precision"

#: Pairwise contact-normal angle that counts as opposition.
OPPOSITION_ANGLE_DEG = 120.0
#: Contact-detection tolerance when judging a grasp, mm. Taut-cable commands
#: hold single-tendon digits a fraction of a millimeter off hard surfaces at
#: the commanded margin, so grasp topology is judged with a 1 mm skin.
CONTACT_TOL_MM = 1.0

ACHIEVED = "achieved"
FAILED = "failed"

# Tendon order: index, middle, ring, little flexors, thumb flexor, thumb
# adductor, thumb opponens. Full-range excursions of the default calibrated
# hand, mm (flexing every crossed joint from rest to its limit).
FOUR_FINGER_FULL_MM = 25.666
THUMB_FLEXOR_FULL_MM = 7.941
THUMB_ADDUCTOR_FULL_MM = 8.726
THUMB_OPPONENS_FULL_MM = 12.217


class DialSetupError(RuntimeError):
    """The pre-grasp did not put both digits on the dial rim."""


@dataclass(frozen=True)
class GraspClass:
    id: int
    name: str
    family: str  # POWER | PRECISION


@dataclass(frozen=True)
class GraspScenario:
    grasp_class: GraspClass
    world: ContactWorld
    command_script: tuple[ActuationCommand, ...]
    overrides: Optional[Mapping[str, float]] = None  # axis name -> degrees
    contact_tolerance: float = CONTACT_TOL_MM
    notes: str = ""


@dataclass(frozen=True)
class GraspResult:
    final: EquilibriumResult
    contacts: tuple[Contact, ...]
    verdict: str
    criteria_report: Mapping[str, bool]


GRASP_CLASSES: tuple[GraspClass, ...] = (
    GraspClass(1, "Heavy Wrap (Large Diameter)", POWER),
    GraspClass(2, "Heavy Wrap (Small Diameter)", POWER),
    GraspClass(3, "Medium Wrap", POWER),
    GraspClass(4, "Adducted Thumb", POWER),
    GraspClass(5, "Light Tool", POWER),
    GraspClass(6, "Thumb-4 Finger", PRECISION),
    GraspClass(7, "Thumb-3 Finger", PRECISION),
    GraspClass(8, "Thumb-2 Finger", PRECISION),
    GraspClass(9, "Thumb-Index Finger", PRECISION),
    GraspClass(10, "Power Disk", POWER),
    GraspClass(11, "Power Sphere", POWER),
    GraspClass(12, "Precision Disk", PRECISION),
    GraspClass(13, "Precision Sphere", PRECISION),
    GraspClass(14, "Tripod", PRECISION),
    GraspClass(15, "Platform", POWER),
    GraspClass(16, "Lateral Pinch", POWER),
)

#: Digit sets that must show distal contacts in the precision classes.
PRECISION_DIGITS: dict[int, frozenset[str]] = {
    6: frozenset({"thumb", "index", "middle", "ring", "little"}),
    7: frozenset({"thumb", "index", "middle", "ring"}),
    8: frozenset({"thumb", "index", "middle"}),
    9: frozenset({"thumb", "index"}),
    12: frozenset({"thumb", "index", "middle", "ring"}),
    13: frozenset({"thumb", "index", "middle", "ring"}),
    14: frozenset({"thumb", "index", "middle"}),
}

_DISTAL_LINKS = {"index.distal", "middle.distal", "ring.distal", "little.distal", "thumb.phalanx"}


def grasp_class(class_id: int) -> GraspClass:
    for gc in GRASP_CLASSES:
        if gc.id == class_id:
            return gc
    raise KeyError(f"no grasp class with id {class_id}")


def _is_palm(link: str) -> bool:
    return link.startswith("palm.")


def _is_distal(link: str) -> bool:
    return link in _DISTAL_LINKS


def _digit(link: str) -> Optional[str]:
    if _is_palm(link):
        return None
    return link.split(".", 1)[0]


def _has_opposing_pair(contacts: Sequence[Contact]) -> bool:
    thresh = math.cos(math.radians(OPPOSITION_ANGLE_DEG))
    for i in range(len(contacts)):
        for j in range(i + 1, len(contacts)):
            if float(contacts[i].normal @ contacts[j].normal) < thresh:
                return True
    return False


def classify(result, grasp_cls: GraspClass) -> tuple[str, dict[str, bool]]:
    """Apply the class success rules to a result's contact set.

    `result` is anything carrying `.contacts` (GraspResult, EquilibriumResult)
    or a plain contact sequence.
    """
    contacts = tuple(getattr(result, "contacts", result))
    report: dict[str, bool] = {}
    if grasp_cls.name == "Platform":
        report["has_contact"] = len(contacts) > 0
        report["palm_only"] = all(_is_palm(c.link) for c in contacts) and bool(contacts)
        verdict = ACHIEVED if all(report.values()) else FAILED
        return verdict, report
    if grasp_cls.family == POWER:
        report["has_contact"] = len(contacts) > 0
        report["palm_or_nondistal_contact"] = any(
            _is_palm(c.link) or not _is_distal(c.link) for c in contacts
        )
        report["opposing_normals"] = _has_opposing_pair(contacts)
        verdict = ACHIEVED if all(report.values()) else FAILED
        return verdict, report
    digits = PRECISION_DIGITS[grasp_cls.id]
    touching = {_digit(c.link) for c in contacts} - {None}
    report["has_contact"] = len(contacts) > 0
    report["distal_only"] = bool(contacts) and all(_is_distal(c.link) for c in contacts)
    report["digits_covered"] = digits <= touching
    report["opposing_normals"] = _has_opposing_pair(contacts)
    verdict = ACHIEVED if all(report.values()) else FAILED
    return verdict, report


# ---------------------------------------------------------------------------
# Catalog
# ---------------------------------------------------------------------------


def _excursions(
    index=0.0, middle=0.0, ring=0.0, little=0.0, thumb_flex=0.0, thumb_add=0.0, thumb_opp=0.0
) -> np.ndarray:
    """Per-tendon excursions from range fractions, mm."""
    return np.array(
        [
            index * FOUR_FINGER_FULL_MM,
            middle * FOUR_FINGER_FULL_MM,
            ring * FOUR_FINGER_FULL_MM,
            little * FOUR_FINGER_FULL_MM,
            thumb_flex * THUMB_FLEXOR_FULL_MM,
            thumb_add * THUMB_ADDUCTOR_FULL_MM,
            thumb_opp * THUMB_OPPONENS_FULL_MM,
        ]
    )


def _ramp(final: np.ndarray, steps: int = 4) -> tuple[ActuationCommand, ...]:
    return tuple(
        ActuationCommand.excursion(final * (i / steps)) for i in range(1, steps + 1)
    )


def _resting_z(radius: float, clearance: float = 0.2) -> float:
    # Palm patch surfaces sit at z = 11 in the default hand.
    return 11.0 + radius + clearance


def _obj(name, shape, origin, rpy=(0.0, 0.0, 0.0)) -> Object:
    return Object(name, shape, Transform(tuple(origin), tuple(rpy)))


_X_AXIS_RPY = (0.0, 90.0, 0.0)  # local z -> palm x: cylinder lying across the palm


def taxonomy_catalog() -> list[GraspScenario]:
    """One scripted scenario per grasp class, tuned for the calibrated hand."""
    four = dict(index=1.0, middle=1.0, ring=1.0, little=1.0)

    def fingers(f):
        return {k: f * v for k, v in four.items()}

    scenarios = [
        GraspScenario(
            grasp_class(1),
            ContactWorld(
                (_obj("barrel", Cylinder(25.0, 140.0), (0.0, 68.0, _resting_z(25.0)), _X_AXIS_RPY),)
            ),
            _ramp(_excursions(**fingers(0.55), thumb_flex=0.5, thumb_add=0.35, thumb_opp=0.45)),
            notes="large cylinder across the palm, full-hand wrap",
        ),
        GraspScenario(
            grasp_class(2),
            ContactWorld(
                (_obj("handle", Cylinder(12.5, 140.0), (0.0, 62.0, _resting_z(12.5)), _X_AXIS_RPY),)
            ),
            _ramp(_excursions(**fingers(0.72), thumb_flex=0.6, thumb_add=0.4, thumb_opp=0.5)),
            notes="dumbbell-handle wrap",
        ),
        GraspScenario(
            grasp_class(3),
            ContactWorld(
                (_obj("bar", Cylinder(18.0, 140.0), (0.0, 64.0, _resting_z(18.0)), _X_AXIS_RPY),)
            ),
            _ramp(_excursions(**fingers(0.64), thumb_flex=0.55, thumb_add=0.4, thumb_opp=0.48)),
            notes="medium cylinder wrap",
        ),
        GraspScenario(
            grasp_class(4),
            ContactWorld(
                (_obj("tool", Cylinder(14.0, 90.0), (34.0, 66.0, 24.0), (90.0, 0.0, 0.0)),)
            ),
            _ramp(_excursions(**fingers(0.6))),
            overrides={"thumb.cm.add": 50.0, "thumb.cm.opp": 15.0, "thumb.mp": 35.0},
            notes="thumb fixed by assistance, handle clamped against the radial palm",
        ),
        GraspScenario(
            grasp_class(5),
            ContactWorld(
                (_obj("stick", Cylinder(7.0, 140.0), (0.0, 60.0, _resting_z(7.0)), _X_AXIS_RPY),)
            ),
            _ramp(_excursions(**fingers(0.8), thumb_flex=0.6, thumb_add=0.45, thumb_opp=0.55)),
            notes="14 mm drumstick wrap",
        ),
        GraspScenario(
            grasp_class(6),
            ContactWorld(
                (_obj("rod", Cylinder(12.0, 80.0), (-5.0, 88.0, 62.0), _X_AXIS_RPY),)
            ),
            _ramp(_excursions(**fingers(0.33), thumb_flex=0.45, thumb_add=0.3, thumb_opp=0.55)),
            notes="prismatic precision, all five digits",
        ),
        GraspScenario(
            grasp_class(7),
            ContactWorld(
                (_obj("rod", Cylinder(11.0, 60.0), (3.0, 87.0, 61.0), _X_AXIS_RPY),)
            ),
            _ramp(_excursions(index=0.34, middle=0.34, ring=0.34, thumb_flex=0.45, thumb_add=0.3, thumb_opp=0.55)),
            notes="prismatic precision, thumb and three fingers",
        ),
        GraspScenario(
            grasp_class(8),
            ContactWorld(
                (_obj("rod", Cylinder(10.0, 45.0), (12.0, 87.0, 61.0), _X_AXIS_RPY),)
            ),
            _ramp(_excursions(index=0.35, middle=0.35, thumb_flex=0.45, thumb_add=0.3, thumb_opp=0.55)),
            notes="prismatic precision, thumb and two fingers",
        ),
        GraspScenario(
            grasp_class(9),
            ContactWorld((_obj("bead", Sphere(10.0), (24.0, 86.0, 62.0)),)),
            _ramp(_excursions(index=0.36, thumb_flex=0.45, thumb_add=0.3, thumb_opp=0.55)),
            notes="thumb-index pad pinch",
        ),
        GraspScenario(
            grasp_class(10),
            ContactWorld(
                (_obj("lid", Cylinder(45.0, 16.0), (0.0, 62.0, 11.0 + 8.0 + 0.2)),)
            ),
            _ramp(_excursions(**fingers(0.42), thumb_flex=0.45, thumb_add=0.35, thumb_opp=0.5)),
            notes="flat disk against the palm, fingers over the rim",
        ),
        GraspScenario(
            grasp_class(11),
            ContactWorld((_obj("ball", Sphere(20.0), (5.0, 60.0, _resting_z(20.0))),)),
            _ramp(_excursions(**fingers(0.55), thumb_flex=0.5, thumb_add=0.4, thumb_opp=0.5)),
            notes="sphere at the palm, full-hand wrap",
        ),
        GraspScenario(
            grasp_class(12),
            ContactWorld((_obj("disc", Cylinder(35.0, 10.0), (5.0, 75.0, 55.0)),)),
            _ramp(_excursions(index=0.36, middle=0.36, ring=0.36, thumb_flex=0.4, thumb_add=0.3, thumb_opp=0.5)),
            notes="disc rim held by fingertips",
        ),
        GraspScenario(
            grasp_class(13),
            ContactWorld((_obj("ball", Sphere(16.0), (10.0, 82.0, 58.0)),)),
            _ramp(_excursions(index=0.35, middle=0.35, ring=0.35, thumb_flex=0.42, thumb_add=0.3, thumb_opp=0.52)),
            notes="sphere held by fingertips",
        ),
        GraspScenario(
            grasp_class(14),
            ContactWorld((_obj("ball", Sphere(11.0), (18.0, 85.0, 60.0)),)),
            _ramp(_excursions(index=0.35, middle=0.35, thumb_flex=0.44, thumb_add=0.3, thumb_opp=0.54)),
            notes="tripod: thumb, index, middle",
        ),
        GraspScenario(
            grasp_class(15),
            ContactWorld(
                (_obj("book", Box(28.0, 35.0, 5.0), (0.0, 55.0, 11.0 + 5.0 + 0.05)),)
            ),
            (ActuationCommand.excursion(np.zeros(7)),),
            notes="book resting on the palm, no actuation",
        ),
        GraspScenario(
            grasp_class(16),
            ContactWorld(
                (_obj("card", Box(1.25, 20.0, 12.0), (36.3, 85.0, 50.0)),)
            ),
            _ramp(_excursions(**fingers(0.8), thumb_flex=0.5, thumb_add=0.2, thumb_opp=0.75)),
            notes="four fingers clenched, thumb presses a card on the index middle link",
        ),
    ]
    return scenarios


# ---------------------------------------------------------------------------
# Runner
# ---------------------------------------------------------------------------


def _fixed_axes(model: HandModel, overrides: Optional[Mapping[str, float]]):
    if not overrides:
        return None
    names = model.axis_names()
    fixed = {}
    for name, deg in overrides.items():
        if name not in names:
            raise KeyError(f"override names unknown joint axis {name!r}")
        fixed[names.index(name)] = math.radians(deg)
    return fixed


def run_scenario(model: HandModel, scenario: GraspScenario) -> GraspResult:
    """Execute the command script quasi-statically and judge the grasp."""
    fixed = _fixed_axes(model, scenario.overrides)
    posture = None
    result = None
    all_converged = True
    for cmd in scenario.command_script:
        result = equilibrium_excursion(
            model, cmd, scenario.world, initial=posture, fixed_axes=fixed
        )
        posture = result.posture
        all_converged &= result.converged
    assert result is not None
    contacts = tuple(
        detect_contacts(model, result.posture, scenario.world, scenario.contact_tolerance)
    )
    verdict, report = classify(contacts, scenario.grasp_class)
    report = dict(report)
    report["solver_converged"] = all_converged
    verdict = ACHIEVED if verdict == ACHIEVED and all_converged else FAILED
    return GraspResult(final=result, contacts=contacts, verdict=verdict, criteria_report=report)


def run_taxonomy(model: HandModel) -> list[GraspResult]:
    """Run the whole catalog in class-id order."""
    return [run_scenario(model, sc) for sc in taxonomy_catalog()]


# ---------------------------------------------------------------------------
# Dial operation
# ---------------------------------------------------------------------------

DIAL_RADIUS_MM = 12.0
DIAL_THICKNESS_MM = 6.0
#: Rim rotation is positive counterclockwise about this palm-frame axis
#: (right-hand rule), the distal direction: the dial faces the approaching
#: fingertips like a front-panel knob.
DIAL_AXIS = (0.0, 1.0, 0.0)
DIAL_CENTER = (36.0, 88.0, 55.0)
#: Pre-grasp excursions holding the dial between thumb and index, mm.
DIAL_PREGRASP_MM = np.array([7.0, 0.0, 0.0, 0.0, 3.2, 2.0, 6.0])


@dataclass(frozen=True)
class DialResult:
    rotation_deg: float
    slipped: bool
    steps: int
    trace: tuple[float, ...]  # cumulative rotation per substep, deg


def dial_world() -> ContactWorld:
    dial = Object(
        "dial",
        DiscDial(DIAL_RADIUS_MM, (0.0, 0.0, 1.0), DIAL_THICKNESS_MM),
        Transform(DIAL_CENTER, (-90.0, 0.0, 0.0)),  # local z -> palm +y
    )
    return ContactWorld((dial,))


def run_dial(
    model: HandModel,
    excursions: np.ndarray,
    substeps: int = 12,
) -> DialResult:
    """Turn the dial by pulling tendons from the held pre-grasp.

    The commanded excursions are added on top of the pre-grasp hold over
    `substeps` quasi-static solves (at least 10). Rotation accumulates from
    the tangential displacement of the digit contact points divided by the
    rim radius (no slip); losing a tracked contact stops the script and
    raises the slip flag.
    """
    if substeps < 10:
        raise ValueError("dial integration needs at least 10 substeps")
    excursions = np.asarray(excursions, dtype=float)
    if excursions.shape != (len(model.tendons),):
        raise ValueError(f"excursions must have shape ({len(model.tendons)},)")

    world = dial_world()
    axis = np.asarray(DIAL_AXIS, float)
    center = np.asarray(DIAL_CENTER, float)

    res = equilibrium_excursion(
        model, ActuationCommand.excursion(DIAL_PREGRASP_MM), world
    )
    contacts = {
        c.link: c
        for c in detect_contacts(model, res.posture, world, CONTACT_TOL_MM)
        if not _is_palm(c.link)
    }
    if "thumb.phalanx" not in contacts or "index.distal" not in contacts:
        raise DialSetupError(
            f"pre-grasp holds {sorted(contacts)} instead of the thumb and index"
        )

    tracked = ("thumb.phalanx", "index.distal")
    prev_points = {k: contacts[k].point for k in tracked}
    posture = res.posture
    rotation = 0.0
    slipped = False
    trace = []
    for i in range(1, substeps + 1):
        cmd = ActuationCommand.excursion(DIAL_PREGRASP_MM + excursions * (i / substeps))
        res = equilibrium_excursion(model, cmd, world, initial=posture)
        posture = res.posture
        now = {
            c.link: c
            for c in detect_contacts(model, posture, world, CONTACT_TOL_MM)
            if c.link in tracked
        }
        if any(k not in now for k in tracked):
            slipped = True
            break
        dphis = []
        for k in tracked:
            p_new = now[k].point
            disp = p_new - prev_points[k]
            mid = 0.5 * (p_new + prev_points[k]) - center
            radial = mid - axis * float(axis @ mid)
            r_norm = float(np.linalg.norm(radial))
            if r_norm < 1e-9:
                continue
            tangent = np.cross(axis, radial / r_norm)
            dphis.append(float(disp @ tangent) / DIAL_RADIUS_MM)
            prev_points[k] = p_new
        if dphis:
            rotation += float(np.mean(dphis))
        trace.append(math.degrees(rotation))
    return DialResult(
        rotation_deg=math.degrees(rotation),
        slipped=slipped,
        steps=len(trace),
        trace=tuple(trace),
    )
