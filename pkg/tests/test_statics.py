import math

import numpy as np
import pytest

from tendonhand.contact_world import Box, ContactWorld, Object, Sphere
from tendonhand.hand_model import (
    Finger,
    HandModel,
    Joint,
    Link,
    Posture,
    RoutingCrossing,
    Tendon,
    Transform,
)
from tendonhand.statics import (
    ActuationCommand,
    InfeasibleExcursionError,
    equilibrium_excursion,
    equilibrium_tension,
    grip_normal_forces,
    potential_energy,
)
from tendonhand.tendon_geometry import tendon_arm_matrix


def single_hinge_hand(k=70.0, arm=7.0, rest_deg=0.0, limits_deg=(0.0, 90.0), length=60.0):
    link = Link("proximal", length, 5.0)
    joint = Joint(
        "mp",
        "hinge",
        (rest_deg,),
        (k,),
        (0.0,),
        (limits_deg,),
        (10.0,),
    )
    finger = Finger("index", (link,), (joint,), Transform())
    tendon = Tendon("flexor", (RoutingCrossing("index", "mp", 0, arm, 0.0, 0.0, 1),))
    return HandModel("one-hinge", (finger,), (tendon,), Transform(), ())


# ---------------------------------------------------------------------------
# Actuation commands
# ---------------------------------------------------------------------------


def test_command_rejects_negative_tension():
    with pytest.raises(ValueError):
        ActuationCommand.tension([-1.0])


def test_command_rejects_unknown_mode():
    with pytest.raises(ValueError):
        ActuationCommand("teleport", np.zeros(7))


def test_command_allows_negative_excursion():
    cmd = ActuationCommand.excursion([-3.0])
    assert cmd.values[0] == -3.0


# ---------------------------------------------------------------------------
# Potential energy
# ---------------------------------------------------------------------------


def test_energy_zero_at_rest(default_hand):
    cmd = ActuationCommand.tension(np.zeros(7))
    assert potential_energy(default_hand, default_hand.rest_posture(), cmd) == 0.0


def test_energy_single_hinge_closed_form():
    hand = single_hinge_hand()
    cmd = ActuationCommand.tension([1.0])
    posture = Posture(np.array([0.1]))
    # 1/2 * 70 * 0.01 - 1 * 0.7
    assert potential_energy(hand, posture, cmd) == pytest.approx(-0.35, abs=1e-12)


def test_energy_rejects_excursion_mode(default_hand):
    with pytest.raises(ValueError):
        potential_energy(
            default_hand, default_hand.rest_posture(), ActuationCommand.excursion(np.zeros(7))
        )


def test_energy_gradient_matches_finite_differences(calibrated_hand, rng):
    lo, hi = calibrated_hand.lower_rad(), calibrated_hand.upper_rad()
    k = calibrated_hand.stiffness_array()
    rest = calibrated_hand.rest_rad()
    A = tendon_arm_matrix(calibrated_hand)
    h = 1e-6
    for _ in range(5):
        T = rng.uniform(0, 30, 7)
        cmd = ActuationCommand.tension(T)
        theta = lo + rng.uniform(0.05, 0.95, 15) * (hi - lo)
        analytic = k * (theta - rest) - A.T @ T
        fd = np.zeros(15)
        for j in range(15):
            up, dn = theta.copy(), theta.copy()
            up[j] += h
            dn[j] -= h
            fd[j] = (
                potential_energy(calibrated_hand, Posture(up), cmd)
                - potential_energy(calibrated_hand, Posture(dn), cmd)
            ) / (2 * h)
        scale = float(np.max(np.abs(analytic))) + 1.0
        assert np.max(np.abs(fd - analytic)) / scale < 1e-5


# ---------------------------------------------------------------------------
# Tension-mode equilibrium, free space
# ---------------------------------------------------------------------------


def test_zero_tension_rests(default_hand):
    res = equilibrium_tension(default_hand, ActuationCommand.tension(np.zeros(7)))
    assert res.converged
    assert np.allclose(res.posture.angles, default_hand.rest_rad(), atol=1e-15)


def test_single_hinge_deflection():
    hand = single_hinge_hand(k=70.0, arm=7.0)
    res = equilibrium_tension(hand, ActuationCommand.tension([1.0]))
    assert res.posture.angles[0] == pytest.approx(0.1, abs=1e-15)


def test_tension_clamps_at_limits():
    hand = single_hinge_hand(k=70.0, arm=7.0, limits_deg=(0.0, 30.0))
    res = equilibrium_tension(hand, ActuationCommand.tension([100.0]))
    assert res.posture.angles[0] == pytest.approx(math.radians(30.0), abs=1e-15)
    assert res.converged


def test_free_equilibrium_monotone_in_tension(calibrated_hand, rng):
    base = rng.uniform(0, 15, 7)
    for t in range(7):
        prev = None
        for extra in np.linspace(0, 60, 7):
            T = base.copy()
            T[t] += extra
            res = equilibrium_tension(calibrated_hand, ActuationCommand.tension(T))
            if prev is not None:
                assert np.all(res.posture.angles >= prev - 1e-12)
            prev = res.posture.angles


# ---------------------------------------------------------------------------
# Excursion-mode equilibrium
# ---------------------------------------------------------------------------


def test_zero_excursion_rests(default_hand):
    res = equilibrium_excursion(default_hand, ActuationCommand.excursion(np.zeros(7)))
    assert res.converged
    assert np.allclose(res.posture.angles, default_hand.rest_rad(), atol=1e-10)
    assert np.allclose(res.tendon_tensions, 0.0, atol=1e-9)


def test_single_hinge_excursion_closed_form():
    hand = single_hinge_hand(k=70.0, arm=7.0)
    res = equilibrium_excursion(hand, ActuationCommand.excursion([0.7]))
    assert res.posture.angles[0] == pytest.approx(0.1, abs=1e-10)
    # tension = k * dtheta / r = 70 * 0.1 / 7
    assert res.tendon_tensions[0] == pytest.approx(1.0, abs=1e-9)


def test_slack_side_excursion_keeps_rest():
    hand = single_hinge_hand()
    res = equilibrium_excursion(hand, ActuationCommand.excursion([-2.0]))
    assert res.posture.angles[0] == pytest.approx(0.0, abs=1e-12)
    assert res.tendon_tensions[0] == 0.0


def test_limit_excursion_reaches_limits(calibrated_hand):
    A = tendon_arm_matrix(calibrated_hand)
    rest = calibrated_hand.rest_rad()
    hi = calibrated_hand.upper_rad()
    idx = calibrated_hand.tendon_index("index_flexor")
    e = np.zeros(7)
    e[idx] = float(A[idx] @ (hi - rest))
    res = equilibrium_excursion(calibrated_hand, ActuationCommand.excursion(e))
    assert res.converged
    for j in ("mp", "pip", "dip"):
        ai = calibrated_hand.axis_index("index", j)
        assert res.posture.angles[ai] == pytest.approx(hi[ai], abs=1e-7)


def test_infeasible_excursion_names_tendon(calibrated_hand):
    e = np.zeros(7)
    e[calibrated_hand.tendon_index("ring_flexor")] = 500.0
    with pytest.raises(InfeasibleExcursionError, match="ring_flexor"):
        equilibrium_excursion(calibrated_hand, ActuationCommand.excursion(e))


def test_mode_round_trip_tension_first(calibrated_hand, rng):
    A = tendon_arm_matrix(calibrated_hand)
    rest = calibrated_hand.rest_rad()
    for _ in range(6):
        T = rng.uniform(0, 40, 7)
        res_t = equilibrium_tension(calibrated_hand, ActuationCommand.tension(T))
        e = A @ (res_t.posture.angles - rest)
        res_e = equilibrium_excursion(calibrated_hand, ActuationCommand.excursion(e))
        assert res_e.converged
        assert np.max(np.abs(res_e.posture.angles - res_t.posture.angles)) < 1e-6
        res_back = equilibrium_tension(
            calibrated_hand, ActuationCommand.tension(res_e.tendon_tensions)
        )
        assert np.max(np.abs(res_back.posture.angles - res_e.posture.angles)) < 1e-6


# ---------------------------------------------------------------------------
# Contact
# ---------------------------------------------------------------------------


def _press_world(face_z=25.5):
    # Big slab above the flexing single-hinge finger; bottom face at face_z.
    return ContactWorld(
        (Object("slab", Box(100.0, 100.0, 9.75), Transform((0.0, 0.0, face_z + 9.75))),)
    )


def test_single_finger_press_torque_balance():
    # One hinge pressing up against a slab: normal = (T r - k dtheta) / lever.
    k, r, L, T = 70.0, 7.0, 60.0, 5.0
    hand = single_hinge_hand(k=k, arm=r, length=L)
    world = _press_world()
    res = equilibrium_tension(hand, ActuationCommand.tension([T]), world)
    assert res.converged
    theta = float(res.posture.angles[0])
    # contact exactly at the face: L sin(theta) + radius = face_z
    assert L * math.sin(theta) + 5.0 == pytest.approx(25.5, abs=1e-8)
    assert len(res.contacts) == 1
    lever = L * math.cos(theta)
    expected = (T * r - k * theta) / lever
    assert res.contact_forces[0] == pytest.approx(expected, rel=1e-8)


def test_press_complementarity_and_feasibility():
    hand = single_hinge_hand()
    world = _press_world()
    for T in (0.5, 2.0, 5.0, 20.0):
        res = equilibrium_tension(hand, ActuationCommand.tension([T]), world)
        assert res.converged
        assert res.residual <= 1e-8
        for c, f in zip(res.contacts, res.contact_forces):
            assert f >= 0
            assert c.gap >= -1e-6
            assert f * max(c.gap, 0.0) <= 1e-6


def test_zero_tension_resting_contact_zero_force(default_hand):
    world = ContactWorld((Object("ball", Sphere(20.0), Transform((0.0, 52.0, 31.0))),))
    res = equilibrium_tension(default_hand, ActuationCommand.tension(np.zeros(7)), world)
    assert res.converged
    assert np.allclose(res.posture.angles, default_hand.rest_rad(), atol=1e-10)
    touching = [f for c, f in zip(res.contacts, res.contact_forces) if c.object == "ball"]
    assert touching
    assert np.allclose(touching, 0.0, atol=1e-9)
    report = grip_normal_forces(res)
    assert report.pinch_force == pytest.approx(0.0, abs=1e-9)


WRAP_SPHERE = Object("ball", Sphere(20.0), Transform((27.0, 108.0, 55.0)))


def _index_axes(model):
    return [model.axis_index("index", j) for j in ("mp", "pip", "dip")]


def _wrap_oracle(model, tension, n=41):
    """Brute-force energy minimization on a grid over the index joint angles.

    Independent of the solver: planar trigonometric kinematics of the index
    chain against the sphere, spring + tendon energy evaluated directly.
    """
    idx = _index_axes(model)
    k = model.stiffness_array()[idx]
    rest = model.rest_rad()[idx]
    lo = model.lower_rad()[idx]
    hi = model.upper_rad()[idx]
    arms = tendon_arm_matrix(model)[model.tendon_index("index_flexor")][idx]
    lengths = [l.length for l in model.finger("index").links]
    radii = [l.radius for l in model.finger("index").links]
    base = np.array(model.finger("index").base_frame.origin_mm)  # x = sphere x
    center = np.array([108.0, 55.0])  # (y, z) in the finger plane
    r_sphere = 20.0

    grids = [np.linspace(lo[i], hi[i], n) for i in range(3)]
    t1, t2, t3 = np.meshgrid(*grids, indexing="ij")
    c1 = np.cumsum(np.stack([t1, t2, t3]), axis=0)

    p0y = np.full_like(t1, base[1])
    p0z = np.zeros_like(t1)
    feasible = np.ones_like(t1, dtype=bool)
    py, pz = p0y, p0z
    for li in range(3):
        qy = py + lengths[li] * np.cos(c1[li])
        qz = pz + lengths[li] * np.sin(c1[li])
        dy, dz = qy - py, qz - pz
        wy, wz = center[0] - py, center[1] - pz
        tproj = np.clip((wy * dy + wz * dz) / lengths[li] ** 2, 0.0, 1.0)
        dist = np.hypot(wy - tproj * dy, wz - tproj * dz)
        feasible &= dist - r_sphere - radii[li] >= -1e-9
        py, pz = qy, qz

    d1 = t1 - rest[0]
    d2 = t2 - rest[1]
    d3 = t3 - rest[2]
    energy = 0.5 * (k[0] * d1**2 + k[1] * d2**2 + k[2] * d3**2) - tension * (
        arms[0] * d1 + arms[1] * d2 + arms[2] * d3
    )
    energy = np.where(feasible, energy, np.inf)
    flat = np.argmin(energy)
    i, j, l = np.unravel_index(flat, energy.shape)
    return np.array([grids[0][i], grids[1][j], grids[2][l]]), float(energy[i, j, l])


def test_underactuated_wrap_matches_grid_oracle(calibrated_hand):
    world = ContactWorld((WRAP_SPHERE,))
    T = np.zeros(7)
    T[calibrated_hand.tendon_index("index_flexor")] = 40.0
    res = equilibrium_tension(calibrated_hand, ActuationCommand.tension(T), world)
    assert res.converged
    assert res.residual <= 1e-8

    idx = _index_axes(calibrated_hand)
    theta_grid, e_grid = _wrap_oracle(calibrated_hand, 40.0)
    # The index chain carries all the energy differences; other axes sit at
    # their free-space optimum in both cases.
    k = calibrated_hand.stiffness_array()[idx]
    rest = calibrated_hand.rest_rad()[idx]
    arms = tendon_arm_matrix(calibrated_hand)[calibrated_hand.tendon_index("index_flexor")][idx]
    th = res.posture.angles[idx]
    e_solver = float(0.5 * k @ (th - rest) ** 2 - 40.0 * arms @ (th - rest))
    assert e_solver <= e_grid + 1e-6
    spacing = np.max(
        (calibrated_hand.upper_rad()[idx] - calibrated_hand.lower_rad()[idx]) / 40
    )
    assert np.max(np.abs(th - theta_grid)) <= 2 * spacing


def test_underactuated_wrap_tension_sweep(calibrated_hand):
    world = ContactWorld((WRAP_SPHERE,))
    idx = _index_axes(calibrated_hand)
    flexor = calibrated_hand.tendon_index("index_flexor")
    postures = []
    onsets = []
    warm = None
    for T in np.linspace(5.0, 50.0, 10):
        vec = np.zeros(7)
        vec[flexor] = T
        res = equilibrium_tension(
            calibrated_hand, ActuationCommand.tension(vec), world, initial=warm
        )
        assert res.converged
        warm = res.posture
        postures.append(res.posture.angles[idx])
        touching = any(
            c.link.startswith("index.") and f > 1e-6
            for c, f in zip(res.contacts, res.contact_forces)
        )
        onsets.append(touching)
        for c, f in zip(res.contacts, res.contact_forces):
            assert c.gap >= -1e-4
            assert f * max(c.gap, 0.0) <= 1e-6
    postures = np.array(postures)
    assert any(onsets), "index finger never pressed the sphere"
    first = onsets.index(True)
    # The proximal joint stalls once the finger bears on the sphere while the
    # distal joints keep flexing around it.
    mp_creep = postures[-1, 0] - postures[first, 0]
    dip_gain = postures[-1, 2] - postures[first, 2]
    assert abs(mp_creep) < math.radians(3.0)
    assert dip_gain > math.radians(10.0)


def test_excursion_wrap_round_trip(calibrated_hand):
    world = ContactWorld((WRAP_SPHERE,))
    flexor = calibrated_hand.tendon_index("index_flexor")
    e = np.zeros(7)
    e[flexor] = 3.0
    res_e = equilibrium_excursion(calibrated_hand, ActuationCommand.excursion(e), world)
    assert res_e.converged
    assert res_e.tendon_tensions[flexor] > 1.0
    res_t = equilibrium_tension(
        calibrated_hand,
        ActuationCommand.tension(res_e.tendon_tensions),
        world,
        initial=res_e.posture,
    )
    assert res_t.converged
    assert np.max(np.abs(res_t.posture.angles - res_e.posture.angles)) < 1e-6


def test_excursion_blocked_by_contact_reports_failure(calibrated_hand):
    # 14 mm is reachable against the joint limits but not with the sphere in
    # the way; the solver must report non-convergence rather than raise.
    world = ContactWorld((WRAP_SPHERE,))
    e = np.zeros(7)
    e[calibrated_hand.tendon_index("index_flexor")] = 14.0
    res = equilibrium_excursion(calibrated_hand, ActuationCommand.excursion(e), world)
    assert not res.converged


# ---------------------------------------------------------------------------
# Grip forces
# ---------------------------------------------------------------------------


def test_grip_forces_requires_contacts(default_hand):
    res = equilibrium_tension(default_hand, ActuationCommand.tension(np.zeros(7)))
    with pytest.raises(ValueError):
        grip_normal_forces(res)


def test_grip_forces_symmetric_pinch_synthetic(default_hand):
    from tendonhand.contact_world import Contact
    from tendonhand.statics import EquilibriumResult

    contacts = (
        Contact("index.distal", "ball", np.zeros(3), np.array([1.0, 0.0, 0.0]), 0.0),
        Contact("thumb.phalanx", "ball", np.zeros(3), np.array([-1.0, 0.0, 0.0]), 0.0),
    )
    res = EquilibriumResult(
        posture=default_hand.rest_posture(),
        tendon_tensions=np.zeros(7),
        contacts=contacts,
        contact_forces=np.array([2.5, 2.5]),
        converged=True,
        iterations=0,
        residual=0.0,
        energy=0.0,
    )
    report = grip_normal_forces(res)
    assert report.per_contact[0] == report.per_contact[1]
    assert report.pinch_force == pytest.approx(2.5)
