import math

import numpy as np
import pytest

from tendonhand.hand_model import Posture, RoutingCrossing
from tendonhand.tendon_geometry import (
    excursion,
    excursion_gradient,
    moment_arm,
    moment_arm_vector,
    tendon_arm_matrix,
)


def crossing(r0=5.6, a=3.0, theta=30.0, sign=1):
    return RoutingCrossing("index", "dip", 0, r0, a, theta, sign)


def test_moment_arm_guide_formula():
    # 5.6 + 3 tan 30 deg
    assert moment_arm(crossing()) == pytest.approx(5.6 + 3.0 * math.tan(math.radians(30.0)))
    assert moment_arm(crossing()) == pytest.approx(7.3320508, abs=1e-6)


def test_moment_arm_zero_angle():
    assert moment_arm(crossing(theta=0.0)) == 5.6


def test_moment_arm_45deg():
    assert moment_arm(crossing(theta=45.0)) == pytest.approx(8.6)


def test_moment_arm_extension_side():
    assert moment_arm(crossing(sign=-1)) == pytest.approx(-7.3320508, abs=1e-6)


def test_moment_arm_rejects_90deg():
    with pytest.raises(ValueError):
        moment_arm(crossing(theta=90.0))


def test_moment_arm_monotone_in_theta():
    thetas = np.linspace(0.0, 89.0, 200)
    arms = [moment_arm(crossing(theta=t)) for t in thetas]
    assert np.all(np.diff(arms) > 0)


def test_default_dip_arm_brackets_reference(default_hand):
    arms = moment_arm_vector(default_hand.tendon("index_flexor"), default_hand)
    dip = arms[default_hand.axis_index("index", "dip")]
    assert 6.9 <= dip <= 7.4


def test_arm_vector_support(default_hand):
    arms = moment_arm_vector(default_hand.tendon("index_flexor"), default_hand)
    nz = set(np.nonzero(arms)[0])
    expected = {default_hand.axis_index("index", j) for j in ("mp", "pip", "dip")}
    assert nz == expected


def test_thumb_adductor_support(default_hand):
    arms = moment_arm_vector(default_hand.tendon("thumb_adductor"), default_hand)
    nz = set(np.nonzero(arms)[0])
    assert nz == {default_hand.axis_index("thumb", "cm", 0)}


def test_arm_vector_dangling_reference(default_hand):
    import dataclasses

    t = default_hand.tendons[0]
    bad = dataclasses.replace(
        t, crossings=(RoutingCrossing("index", "missing", 0, 5.0),)
    )
    with pytest.raises(KeyError):
        moment_arm_vector(bad, default_hand)


def test_excursion_zero_at_rest(default_hand):
    rest = default_hand.rest_posture()
    for t in default_hand.tendons:
        assert excursion(t, rest, default_hand) == 0.0


def test_excursion_single_axis(default_hand):
    # 7 mm arm equivalent: use the actual arms, move one axis by 0.1 rad.
    t = default_hand.tendon("thumb_flexor")
    arms = moment_arm_vector(t, default_hand)
    ai = default_hand.axis_index("thumb", "mp")
    angles = default_hand.rest_rad().copy()
    angles[ai] += 0.1
    assert excursion(t, Posture(angles), default_hand) == pytest.approx(0.1 * arms[ai])


def test_excursion_matches_quadrature(default_hand):
    # Independent oracle: integrate arm * dtheta along a straight path in
    # posture space from rest to the joint limits of the index finger.
    t = default_hand.tendon("index_flexor")
    arms = moment_arm_vector(t, default_hand)
    rest = default_hand.rest_rad()
    target = rest.copy()
    for j in ("mp", "pip", "dip"):
        ai = default_hand.axis_index("index", j)
        target[ai] = default_hand.upper_rad()[ai]

    n = 20001
    s = np.linspace(0.0, 1.0, n)
    path = rest[None, :] + s[:, None] * (target - rest)[None, :]
    dtheta = np.diff(path, axis=0)
    integrated = float(np.sum(dtheta @ arms))
    assert excursion(t, Posture(target), default_hand) == pytest.approx(integrated, rel=1e-12)


def test_excursion_dimension_mismatch(default_hand):
    with pytest.raises(ValueError):
        excursion(default_hand.tendons[0], Posture(np.zeros(3)), default_hand)


def test_gradient_equals_arm_vector(default_hand):
    for t in default_hand.tendons:
        assert np.array_equal(
            excursion_gradient(t, default_hand), moment_arm_vector(t, default_hand)
        )


def test_gradient_matches_finite_differences(default_hand, rng):
    lo, hi = default_hand.lower_rad(), default_hand.upper_rad()
    t = default_hand.tendon("index_flexor")
    grad = excursion_gradient(t, default_hand)
    h = 1e-6
    for _ in range(5):
        theta = lo + rng.uniform(0.05, 0.95, size=15) * (hi - lo)
        fd = np.zeros(15)
        for j in range(15):
            up, dn = theta.copy(), theta.copy()
            up[j] += h
            dn[j] -= h
            fd[j] = (
                excursion(t, Posture(up), default_hand)
                - excursion(t, Posture(dn), default_hand)
            ) / (2 * h)
        scale = max(1.0, float(np.max(np.abs(grad))))
        assert np.max(np.abs(fd - grad)) / scale < 1e-5


def test_excursion_linear_in_posture(default_hand, rng):
    t = default_hand.tendon("middle_flexor")
    rest = default_hand.rest_rad()
    lo, hi = default_hand.lower_rad(), default_hand.upper_rad()
    p1 = lo + rng.uniform(0, 1, 15) * (hi - lo)
    p2 = lo + rng.uniform(0, 1, 15) * (hi - lo)
    combined = Posture(p1 + p2 - rest)
    e1 = excursion(t, Posture(p1), default_hand)
    e2 = excursion(t, Posture(p2), default_hand)
    assert excursion(t, combined, default_hand) == pytest.approx(e1 + e2, rel=1e-12, abs=1e-12)


def test_arm_matrix_shape(default_hand):
    A = tendon_arm_matrix(default_hand)
    assert A.shape == (7, 15)
    # Every axis is crossed by exactly one tendon in the default hand.
    assert np.all(np.count_nonzero(A, axis=0) == 1)
