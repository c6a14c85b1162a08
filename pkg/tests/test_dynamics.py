import dataclasses
import math

import numpy as np
import pytest

from tendonhand.dynamics import (
    DynamicState,
    SettleTimeoutError,
    impulse_response,
    standard_impulses,
    step,
)
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
from tendonhand.statics import ActuationCommand


def oscillator_hand(k=70.0, inertia_kg_mm2=70.0, damping=0.0, limits_deg=(-720.0, 720.0)):
    """Single-axis test rig; omega = sqrt(1000 k / I) rad/s."""
    link = Link("rod", 50.0, 5.0)
    joint = Joint("mp", "hinge", (0.0,), (k,), (damping,), (limits_deg,), (inertia_kg_mm2,))
    finger = Finger("index", (link,), (joint,), Transform())
    tendon = Tendon("flexor", (RoutingCrossing("index", "mp", 0, 7.0),))
    return HandModel("oscillator", (finger,), (tendon,), Transform(), ())


def run(model, v0, t_end, dt=1e-4, command=None):
    state = DynamicState(model.rest_posture(), np.array([v0]), 0.0)
    ts, xs, vs = [0.0], [state.posture.angles[0]], [v0]
    for _ in range(int(round(t_end / dt))):
        state = step(model, state, dt, command)
        ts.append(state.time)
        xs.append(state.posture.angles[0])
        vs.append(state.velocities[0])
    return np.array(ts), np.array(xs), np.array(vs)


def test_step_rejects_bad_dt(calibrated_hand):
    state = DynamicState(calibrated_hand.rest_posture(), np.zeros(15), 0.0)
    with pytest.raises(ValueError):
        step(calibrated_hand, state, 0.0)
    with pytest.raises(ValueError):
        step(calibrated_hand, state, 2e-3)


def test_step_rejects_non_finite(calibrated_hand):
    v = np.zeros(15)
    v[0] = np.nan
    state = DynamicState(calibrated_hand.rest_posture(), v, 0.0)
    with pytest.raises(ValueError):
        step(calibrated_hand, state, 1e-4)


def test_rest_is_fixed_point(calibrated_hand):
    state = DynamicState(calibrated_hand.rest_posture(), np.zeros(15), 0.0)
    out = step(calibrated_hand, state, 1e-4)
    assert np.array_equal(out.posture.angles, state.posture.angles)
    assert np.array_equal(out.velocities, state.velocities)


def test_undamped_energy_conservation():
    # omega = sqrt(1000 * 70 / 70) = 31.6 rad/s
    model = oscillator_hand()
    ieff = 70.0 * 1e-3
    v0 = 2.0
    ts, xs, vs = run(model, v0, 1.0)
    energy = 0.5 * ieff * vs**2 + 0.5 * 70.0 * xs**2
    e0 = 0.5 * ieff * v0**2
    assert np.max(np.abs(energy - e0)) / e0 < 1e-3


def test_undamped_matches_analytic_oscillator():
    model = oscillator_hand()
    omega = math.sqrt(1000.0 * 70.0 / 70.0)
    v0 = 2.0
    ts, xs, _ = run(model, v0, 1.0)
    analytic = (v0 / omega) * np.sin(omega * ts)
    assert np.max(np.abs(xs - analytic)) < 1e-4 * (v0 / omega) * 10


def test_critical_damping_no_overshoot():
    k, inertia = 70.0, 70.0
    c = 2.0 * math.sqrt(k * inertia * 1e-3)
    model = oscillator_hand(damping=c)
    _, xs, _ = run(model, 5.0, 1.5)
    assert np.all(xs >= -1e-9)  # monotone return, never past rest


def test_overdamped_settles_slower():
    k, inertia = 70.0, 70.0
    c = 2.0 * math.sqrt(k * inertia * 1e-3)
    crit = oscillator_hand(damping=c)
    over = oscillator_hand(damping=3.0 * c)
    s_crit = impulse_response(crit, np.array([20.0])).settle_time
    s_over = impulse_response(over, np.array([20.0])).settle_time
    assert s_crit > 0
    assert s_over > s_crit


def test_trajectory_respects_limits(calibrated_hand):
    impulse = 20.0 * np.ones(15)
    resp = impulse_response(calibrated_hand, impulse)
    lo, hi = calibrated_hand.lower_rad(), calibrated_hand.upper_rad()
    assert np.all(resp.angles >= lo - 1e-12)
    assert np.all(resp.angles <= hi + 1e-12)


def test_settle_time_follows_analytic_prediction():
    # Critically damped return x(t) = v t exp(-omega t); settling into the
    # band is its last crossing of the band level. Doubling the impulse
    # shifts that crossing by the analytic amount.
    k, inertia = 70.0, 70.0
    omega = math.sqrt(1000.0 * k / inertia)
    c = 2.0 * math.sqrt(k * inertia * 1e-3)
    model = oscillator_hand(damping=c)
    band = math.radians(2.0)

    def analytic_settle(v0):
        f = lambda t: v0 * t * math.exp(-omega * t) - band
        lo_t, hi_t = 1.0 / omega, 100.0 / omega
        for _ in range(200):
            mid = 0.5 * (lo_t + hi_t)
            if f(mid) > 0:
                lo_t = mid
            else:
                hi_t = mid
        return 0.5 * (lo_t + hi_t)

    v1, v2 = 8.0, 16.0
    s1 = impulse_response(model, np.array([v1])).settle_time
    s2 = impulse_response(model, np.array([v2])).settle_time
    predicted = analytic_settle(v2) - analytic_settle(v1)
    measured = s2 - s1
    assert measured == pytest.approx(predicted, rel=0.10, abs=2e-3)


def test_zero_impulse_settles_at_zero(calibrated_hand):
    resp = impulse_response(calibrated_hand, np.zeros(15))
    assert resp.settle_time == 0.0


def test_undamped_never_settles():
    model = oscillator_hand(damping=0.0)
    with pytest.raises(SettleTimeoutError):
        impulse_response(model, np.array([5.0]), timeout_s=1.0)


def test_standard_impulse_directions(calibrated_hand):
    imp = standard_impulses(calibrated_hand)
    assert set(imp) == {"palm", "dorsal", "lateral"}
    assert np.all(imp["palm"] == 20.0)
    assert np.all(imp["dorsal"] == -20.0)
    lateral = imp["lateral"]
    nz = set(np.nonzero(lateral)[0])
    assert nz == {
        calibrated_hand.axis_index("thumb", "cm", 0),
        calibrated_hand.axis_index("thumb", "cm", 1),
    }


def test_tension_state_returns_to_loaded_equilibrium(calibrated_hand):
    from tendonhand.statics import equilibrium_tension

    T = 10.0 * np.ones(7)
    cmd = ActuationCommand.tension(T)
    resp = impulse_response(calibrated_hand, standard_impulses(calibrated_hand)["palm"], command=cmd)
    target = equilibrium_tension(calibrated_hand, cmd).posture.angles
    assert np.allclose(resp.target, target, atol=1e-12)
    assert np.max(np.abs(resp.angles[-1] - target)) < math.radians(2.0)
    assert resp.settle_time <= 1.0
