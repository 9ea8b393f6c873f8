import math

import numpy as np
import pytest

from wipdyn import (FullState, ReducedState, SimulationError, TorqueProfile,
                    compare_trajectories, full_to_reduced, h_const, rk4_step,
                    simulate, tau_from_u, u_from_tau)
from wipdyn.sim import n_samples


def test_u_from_tau_symmetric_and_antisymmetric(p):
    # equal torques force rolling only; opposite torques force yaw only
    assert u_from_tau(1.0, 1.0, p) == (2.0, 0.0)
    u1, u2 = u_from_tau(-1.0, 1.0, p)
    assert u1 == 0.0
    assert u2 == pytest.approx(p.d / p.r, rel=1e-15)
    assert u_from_tau(0.0, 0.0, p) == (0.0, 0.0)


def test_tau_u_roundtrip(p, rng):
    for _ in range(10):
        t1, t2 = rng.uniform(-2, 2, 2)
        u1, u2 = u_from_tau(t1, t2, p)
        assert tau_from_u(u1, u2, p) == pytest.approx((t1, t2), rel=1e-14)


def test_u_conversion_preserves_power(p, rng):
    # u1 phi_dot + u2 theta_dot = tau1 phi1_dot + tau2 phi2_dot on the
    # constraint surface: the conversion is the pairing with the generators
    for _ in range(10):
        t1, t2 = rng.uniform(-2, 2, 2)
        f1d, f2d = rng.uniform(-2, 2, 2)
        u1, u2 = u_from_tau(t1, t2, p)
        phid = 0.5 * (f1d + f2d)
        thd = p.r / p.d * (f2d - f1d)
        assert u1 * phid + u2 * thd == pytest.approx(t1 * f1d + t2 * f2d, rel=1e-13)


def test_torque_profile_validation():
    with pytest.raises(ValueError):
        TorqueProfile(((0.0, 0.1, 0.1), (0.0, 0.2, 0.2)))
    with pytest.raises(ValueError):
        TorqueProfile(((1.0, 0.1, 0.1), (0.5, 0.2, 0.2)))
    with pytest.raises(ValueError):
        TorqueProfile(((0.0, float("inf"), 0.0),))


def test_torque_profile_left_closed_lookup():
    prof = TorqueProfile(((1.0, 0.5, -0.5), (2.0, 0.0, 0.0)))
    assert prof.tau_at(0.999) == (0.0, 0.0)
    assert prof.tau_at(1.0) == (0.5, -0.5)
    assert prof.tau_at(1.999) == (0.5, -0.5)
    assert prof.tau_at(2.0) == (0.0, 0.0)


def test_rk4_step_zero_rhs_identity():
    y = np.array([1.0, -2.0, 3.0])
    out = rk4_step(lambda t, s: np.zeros(3), y, 0.0, 0.1)
    assert np.array_equal(out, y)


def test_rk4_step_exponential_taylor():
    # one step of y' = y from 1 with dt = 0.1:
    # 1 + h + h^2/2 + h^3/6 + h^4/24 = 1.1051708333333332
    out = rk4_step(lambda t, s: s, np.array([1.0]), 0.0, 0.1)
    assert out[0] == pytest.approx(1.1051708333333332, abs=1e-15)


def test_rk4_fourth_order_on_linear_system(rng):
    A = np.array([[0.0, 1.0], [-4.0, -0.3]])
    y0 = np.array([1.0, 0.0])
    # exact solution through the eigendecomposition of A
    w, V = np.linalg.eig(A)
    exact = (V @ np.diag(np.exp(w)) @ np.linalg.inv(V) @ y0).real

    def run(dt):
        y = y0.copy()
        steps = round(1.0 / dt)
        for k in range(steps):
            y = rk4_step(lambda t, s: A @ s, y, k * dt, dt)
        return np.max(np.abs(y - exact))

    errors = [run(dt) for dt in (1e-2, 5e-3, 2.5e-3)]
    for e1, e2 in zip(errors, errors[1:]):
        assert 12.0 < e1 / e2 < 20.0


def test_rk4_rejects_bad_inputs():
    with pytest.raises(ValueError):
        rk4_step(lambda t, s: s, np.array([1.0]), 0.0, 0.0)
    with pytest.raises(ValueError, match="non-finite"):
        rk4_step(lambda t, s: s * 1e308, np.array([1e308]), 0.0, 1.0)


def test_n_samples_grid():
    assert n_samples(0.0, 1e-3) == 1
    assert n_samples(0.3, 0.1) == 4
    assert n_samples(5.0, 1e-3) == 5001


def test_simulate_zero_duration_single_sample(p):
    s = FullState.constrained(0, 0, 0, 0.1, 0, 0, 0, 0.2, 0.3, p)
    traj = simulate("full", s, TorqueProfile.zero(), 0.0, 1e-3, p)
    assert len(traj) == 1
    assert traj.t[0] == 0.0


def test_simulate_equilibrium_is_exactly_stationary(p):
    s = FullState.constrained(0, 0, 0, 0.0, 0, 0, 0, 0, 0, p)
    traj = simulate("full", s, TorqueProfile.zero(), 1.0, 1e-2, p)
    assert np.max(np.abs(traj.states - traj.states[0])) == 0.0


def test_simulate_steady_roll_distance(p):
    red0 = ReducedState(0, 0, 0, 0, 0.0, 0.0, h_const(p), 0.0)
    traj = simulate("reduced", red0, TorqueProfile.zero(), 5.0, 1e-3, p)
    assert traj.states[-1, 0] == pytest.approx(p.r * 5.0, abs=1e-6)
    assert abs(traj.states[-1, 1]) <= 1e-12


def test_simulate_deterministic(p):
    s = FullState.constrained(0, 0, 0.1, 0.2, 0, 0, 0.1, 0.5, 0.4, p)
    prof = TorqueProfile(((0.0, 0.05, -0.03),))
    a = simulate("full", s, prof, 1.0, 1e-3, p)
    b = simulate("full", s, prof, 1.0, 1e-3, p)
    assert np.array_equal(a.states, b.states)
    assert np.array_equal(a.energy, b.energy)


def test_simulate_validates_inputs(p):
    s = FullState.constrained(0, 0, 0, 0.1, 0, 0, 0, 0, 0, p)
    with pytest.raises(ValueError, match="unknown model"):
        simulate("fancy", s, TorqueProfile.zero(), 1.0, 1e-3, p)
    with pytest.raises(ValueError, match="dt"):
        simulate("full", s, TorqueProfile.zero(), 1.0, -1e-3, p)
    with pytest.raises(TypeError):
        simulate("reduced", s, TorqueProfile.zero(), 1.0, 1e-3, p)
    violating = FullState(0, 0, 0, 0.1, 0, 0, 1.0, 0, 0, 0, 0, 0)
    with pytest.raises(ValueError, match="constraints"):
        simulate("full", violating, TorqueProfile.zero(), 1.0, 1e-3, p)


def test_simulate_failure_carries_timestamp(p):
    s = FullState.constrained(0, 0, 0, 0.1, 0, 0, 0, 0, 0, p)
    prof = TorqueProfile(((0.0, 1e305, 1e305),))
    with pytest.raises(SimulationError) as err:
        simulate("full", s, prof, 1.0, 1e-2, p)
    assert err.value.t >= 0.0


def test_full_vs_reduced_error_shrinks_fourth_order(p):
    from wipdyn import reduced_to_full
    red0 = ReducedState(0, 0, 0, 0, 0.12, 0.0, 0.25 * h_const(p), 0.0)
    full0 = reduced_to_full(red0, p)
    prof = TorqueProfile.zero()

    def gap(dt):
        tf = simulate("full", full0, prof, 1.0, dt, p)
        tr = simulate("reduced", red0, prof, 1.0, dt, p)
        stats = compare_trajectories(tf, tr, p)
        return max(st.max_abs for st in stats.values())

    gaps = [gap(dt) for dt in (4e-3, 2e-3, 1e-3)]
    for g1, g2 in zip(gaps, gaps[1:]):
        assert g1 / g2 > 8.0  # consistent with O(dt^4)
