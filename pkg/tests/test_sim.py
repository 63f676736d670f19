import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from zeno_lab.analytic import UncorrelatedPoint, analytic_reduced_state
from zeno_lab.errors import SimulationError
from zeno_lab.linalg import partial_trace, propagator
from zeno_lab.model import ModelParams, build_schedule, build_total_hamiltonian
from zeno_lab.sim import (
    Evolver,
    evolve,
    final_p1,
    initial_full_state,
    rank2_fast_path,
    sample_grid,
    simulate,
)


def brute_force_p1(params, t):
    """Step-by-step density-matrix evolution with fresh propagators and linalg partial trace."""
    rho = initial_full_state(params)
    n_done = min(int(t // params.delta_t), params.n_memory)
    for k in range(1, n_done + 1):
        u = propagator(build_total_hamiltonian(params, k).h_total, params.delta_t)
        rho = u @ rho @ u.conj().T
    s = t - n_done * params.delta_t
    if s > 0:
        u = propagator(build_total_hamiltonian(params, n_done + 1).h_total, s)
        rho = u @ rho @ u.conj().T
    return partial_trace(rho, [2] * params.n_qubits, 0)[1, 1].real


def test_initial_state_pure_excited():
    rho = initial_full_state(ModelParams(nu=1.0, n_memory=3))
    expected = np.zeros((16, 16))
    expected[8, 8] = 1.0  # |1000>
    np.testing.assert_array_equal(rho, expected)


def test_initial_state_spectrum():
    rho = initial_full_state(ModelParams(nu=0.3, n_memory=3))
    w = np.sort(np.linalg.eigvalsh(rho))[::-1]
    np.testing.assert_allclose(w[:2], [0.7, 0.3])
    np.testing.assert_allclose(w[2:], 0, atol=1e-15)
    assert np.trace(rho) == pytest.approx(1.0)
    assert np.linalg.matrix_rank(rho) <= 2


def test_sample_grid_includes_boundaries():
    sched = build_schedule(ModelParams(delta_t=0.5), 3)
    t, seg, s = sample_grid(sched, 0.1)
    for b in (0.0, 0.5, 1.0, 1.5):
        assert np.any(np.abs(t - b) < 1e-15)
    assert t[-1] == 1.5 and s[-1] == 0.5 and seg[-1] == 2
    assert np.all(np.diff(t) >= 0)
    # interior boundaries carry both one-sided samples
    assert np.sum(t == 0.5) == 2


def test_sample_grid_rejects_bad_step():
    with pytest.raises(SimulationError):
        sample_grid(build_schedule(ModelParams()), 0.0)


@pytest.mark.parametrize("nu", [0.2, 0.75, 1.0])
@pytest.mark.parametrize("dt", [0.3, 0.5, 1.3])
def test_uncorrelated_matches_closed_form(nu, dt):
    p = ModelParams(nu=nu, r=0.0, delta_t=dt)
    sched = build_schedule(p)
    traj = evolve(sched, initial_full_state(p), dt / 50, p)
    expected = [
        analytic_reduced_state(UncorrelatedPoint(nu, int(j), float(s), dt)).p1
        for j, s in zip(traj.segment_index, traj.local_time)
    ]
    assert np.max(np.abs(traj.p1 - expected)) <= 1e-10


def test_uncorrelated_random_points(rng):
    for _ in range(100):
        nu, dt = rng.uniform(0, 1), rng.uniform(0.05, 2.0)
        p = ModelParams(nu=nu, r=0.0, delta_t=dt)
        t = rng.uniform(0, 3 * dt)
        n_done = min(int(t // dt), 2)
        expected = analytic_reduced_state(UncorrelatedPoint(nu, n_done, t - n_done * dt, dt)).p1
        assert abs(brute_force_p1(p, t) - expected) <= 1e-10


def test_single_memory_full_flip():
    p = ModelParams(nu=1.0, n_memory=1, delta_t=math.pi / 2)
    traj = simulate(p)
    assert traj.p1[-1] == pytest.approx(0.0, abs=1e-15)
    assert traj.p1[0] == 1.0


def test_evolve_matches_brute_force(params3):
    traj = evolve(build_schedule(params3), initial_full_state(params3), 0.05, params3)
    for t, p in zip(traj.times[::5], traj.p1[::5]):
        assert p == pytest.approx(brute_force_p1(params3, t), abs=1e-10)


def test_full_purity_conserved(params3):
    p = ModelParams(nu=0.6, r=1.62, delta_t=0.6)
    traj = evolve(build_schedule(p), initial_full_state(p), 0.01, p)
    purity0 = 0.6 ** 2 + 0.4 ** 2
    assert np.max(np.abs(traj.full_purity - purity0)) <= 1e-10


def test_reduced_states_are_density_matrices(params3):
    traj = simulate(params3)
    assert np.max(np.abs(np.trace(traj.reduced_states, axis1=1, axis2=2) - 1)) <= 1e-12
    np.testing.assert_allclose(traj.p1, traj.reduced_states[:, 1, 1].real, atol=1e-12)
    assert np.all(np.linalg.eigvalsh(traj.reduced_states) >= -1e-10)


def test_correlated_erasure_at_reported_optimum():
    # tau_min at the optimum ratio comes from the sweep; the trajectory must end erased
    from zeno_lab.sweep import tau_min_for_r

    res = tau_min_for_r(1.62)
    p = ModelParams(nu=1.0, r=1.62, delta_t=res.tau_min / 3)
    traj = evolve(build_schedule(p), initial_full_state(p), p.delta_t / 100, p)
    assert traj.times[-1] == pytest.approx(res.tau_min)
    assert traj.p1[-1] <= 1e-6


def test_vacuum_is_stationary():
    for r in (0.0, 1.62, 9.0):
        p = ModelParams(r=r)
        vac = np.zeros(p.dim)
        vac[0] = 1
        for k in (1, 2, 3):
            assert not np.any(build_total_hamiltonian(p, k).h_total @ vac)


def test_fast_path_pure_state_equals_evolve():
    p = ModelParams(nu=1.0, r=0.8, delta_t=0.7)
    sched = build_schedule(p)
    a = rank2_fast_path(p, sched, 0.02)
    b = evolve(sched, initial_full_state(p), 0.02, p)
    assert np.max(np.abs(a.reduced_states - b.reduced_states)) <= 1e-12


def test_fast_path_matches_evolve_random(rng):
    worst = 0.0
    for _ in range(50):
        p = ModelParams(nu=rng.uniform(0, 1), r=rng.uniform(0, 3), delta_t=rng.uniform(0.05, 2.0))
        sched = build_schedule(p)
        a = rank2_fast_path(p, sched, p.delta_t / 20)
        b = evolve(sched, initial_full_state(p), p.delta_t / 20, p)
        worst = max(worst, np.max(np.abs(a.reduced_states - b.reduced_states)), np.max(np.abs(a.p1 - b.p1)))
    assert worst <= 1e-10


@settings(max_examples=25, deadline=None)
@given(st.floats(0, 1), st.floats(0, 4), st.floats(0.05, 2.0))
def test_excitation_and_coherence_invariants(nu, r, dt):
    p = ModelParams(nu=nu, r=r, delta_t=dt)
    traj = simulate(p, dt / 20)
    assert np.max(np.abs(traj.excitation - nu)) <= 1e-10
    assert np.max(np.abs(traj.reduced_states[:, 0, 1])) <= 1e-10


def test_refining_sample_grid_keeps_shared_values(params3):
    coarse = simulate(params3, params3.delta_t / 20)
    fine = simulate(params3, params3.delta_t / 40)
    for j, s, p in zip(coarse.segment_index, coarse.local_time, coarse.p1):
        match = (fine.segment_index == j) & (fine.local_time == s)
        assert match.any()
        assert np.max(np.abs(fine.p1[match] - p)) <= 1e-12


def test_evolve_rejects_wrong_dimension(params3):
    with pytest.raises(SimulationError):
        evolve(build_schedule(params3), np.eye(8) / 8, 0.1)


def test_final_p1_matches_trajectory_end(params3):
    traj = simulate(params3)
    assert final_p1(params3, params3.delta_t)[0] == pytest.approx(traj.p1[-1], abs=1e-13)
    assert final_p1(params3, 0.0)[0] == params3.nu


def test_evolver_reduced_matches_trajectory(params3):
    traj = simulate(params3, 0.05)
    ev = Evolver(traj.schedule, traj.initial_state)
    for j in range(3):
        idx = traj.segment_index == j
        np.testing.assert_allclose(ev.reduced(j, traj.local_time[idx]), traj.reduced_states[idx], atol=1e-12)
