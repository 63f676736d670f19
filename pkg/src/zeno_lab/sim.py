"""Exact piecewise-constant evolution of the qubit + memory register.

Within a segment the state is propagated with the spectral exponential of that
segment's Hamiltonian, so sampled values do not depend on the sampling step.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import SimulationError
from .linalg import check_density_matrix, kron_all, spectral_propagator
from .model import ModelParams, Schedule, build_schedule, excitation_number

DEFAULT_SAMPLES_PER_INTERVAL = 200


def initial_full_state(params: ModelParams) -> np.ndarray:
    """``((1-nu)|0><0| + nu|1><1|)`` on Q tensored with a blank memory."""
    q = np.diag([1.0 - params.nu, params.nu]).astype(complex)
    blank = np.zeros((2, 2), dtype=complex)
    blank[0, 0] = 1.0
    return kron_all([q] + [blank] * params.n_memory)


def _reduce_q(rho: np.ndarray) -> np.ndarray:
    """Trace out the memory from a stack of full density matrices, shape (..., d, d)."""
    d = rho.shape[-1]
    m = d // 2
    t = rho.reshape(rho.shape[:-2] + (2, m, 2, m))
    return np.einsum("...ajbj->...ab", t)


def _reduce_q_pure(psi: np.ndarray) -> np.ndarray:
    m = psi.shape[-1] // 2
    t = psi.reshape(psi.shape[:-1] + (2, m))
    return np.einsum("...ai,...bi->...ab", t, t.conj())


def sample_grid(schedule: Schedule, sample_dt: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Global times, segment index (0-based) and local time of every sample.

    Each segment is sampled on its closed interval ``0, h, 2h, ..., duration``,
    so an interior boundary appears twice: once closing the old segment and
    once opening the new one. Quantities that jump when the Hamiltonian
    switches (the speed limit) keep both one-sided values; the time grid is
    non-decreasing rather than strictly ascending.
    """
    if not sample_dt > 0:
        raise SimulationError(f"sample_dt must be > 0, got {sample_dt}")
    starts = schedule.boundaries
    times, segs, local = [], [], []
    for j, d in enumerate(schedule.durations):
        n = int(np.ceil(d / sample_dt))
        s = np.arange(n) * sample_dt
        s = np.append(s[s < d * (1 - 1e-12)], d)
        times.append(starts[j] + s)
        segs.append(np.full(s.size, j))
        local.append(s)
    times = np.concatenate(times)
    # the closing sample of segment j must carry exactly the next segment's start time
    return np.maximum.accumulate(times), np.concatenate(segs).astype(int), np.concatenate(local)


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    reduced_states: np.ndarray  # (T, 2, 2)
    p1: np.ndarray
    params: ModelParams
    schedule: Schedule = field(repr=False)
    segment_index: np.ndarray = field(repr=False)
    local_time: np.ndarray = field(repr=False)
    initial_state: np.ndarray = field(repr=False)
    excitation: np.ndarray = field(repr=False)
    full_purity: np.ndarray = field(repr=False)

    def __post_init__(self):
        n = len(self.times)
        if not (len(self.reduced_states) == len(self.p1) == n):
            raise SimulationError("trajectory arrays have inconsistent lengths")

    @property
    def purity_q(self) -> np.ndarray:
        rho = self.reduced_states
        return np.einsum("tab,tba->t", rho, rho).real


class Evolver:
    """Density-matrix evolution with cached segment-start states.

    ``reduced(seg, s)`` re-simulates from the start of segment ``seg``; this is
    what the Fisher-information code uses for exact finite differences.
    """

    def __init__(self, schedule: Schedule, rho0: np.ndarray):
        self.schedule = schedule
        rho0 = check_density_matrix(rho0)
        d = schedule.segments[0][1].h_total.shape[0]
        if rho0.shape != (d, d):
            raise SimulationError(f"initial state has dim {rho0.shape[0]}, schedule acts on dim {d}")
        self.rho0 = rho0
        starts = [rho0]
        for dur, seg in schedule.segments:
            u = spectral_propagator(*seg.spectrum, dur)
            starts.append(u @ starts[-1] @ u.conj().T)
        self.segment_starts = starts

    def full(self, seg: int, s) -> np.ndarray:
        w, v = self.schedule.segments[seg][1].spectrum
        s = np.atleast_1d(np.asarray(s, dtype=float))
        # U(s) = V diag(exp(-i w s)) V^dagger, batched over s
        phase = np.exp(-1j * np.outer(s, w))
        u = np.einsum("ij,sj,kj->sik", v, phase, v.conj())
        u[s == 0] = np.eye(w.size)
        return u @ self.segment_starts[seg] @ u.conj().transpose(0, 2, 1)

    def reduced(self, seg: int, s) -> np.ndarray:
        return _reduce_q(self.full(seg, s))


def _assemble(times, segs, local, rho_q, params, schedule, rho0, excitation, purity) -> Trajectory:
    rho_q = 0.5 * (rho_q + rho_q.conj().transpose(0, 2, 1))
    return Trajectory(
        times=times,
        reduced_states=rho_q,
        p1=rho_q[:, 1, 1].real.copy(),
        params=params,
        schedule=schedule,
        segment_index=segs,
        local_time=local,
        initial_state=rho0,
        excitation=excitation,
        full_purity=purity,
    )


def evolve(schedule: Schedule, rho0: np.ndarray, sample_dt: float, params: ModelParams | None = None) -> Trajectory:
    """Propagate a full density matrix through ``schedule``, sampling the qubit's reduced state."""
    ev = Evolver(schedule, rho0)
    times, segs, local = sample_grid(schedule, sample_dt)
    d = ev.rho0.shape[0]
    n_op = np.diag(excitation_number(int(np.log2(d)))).real
    rho_q = np.empty((times.size, 2, 2), dtype=complex)
    exc = np.empty(times.size)
    pur = np.empty(times.size)
    for j in range(len(schedule)):
        idx = np.flatnonzero(segs == j)
        full = ev.full(j, local[idx])
        rho_q[idx] = _reduce_q(full)
        exc[idx] = np.einsum("sii,i->s", full, n_op).real
        pur[idx] = np.einsum("sij,sji->s", full, full).real
    return _assemble(times, segs, local, rho_q, params, schedule, ev.rho0, exc, pur)


def _basis_vector(dim: int, index: int) -> np.ndarray:
    e = np.zeros(dim, dtype=complex)
    e[index] = 1.0
    return e


def rank2_fast_path(params: ModelParams, schedule: Schedule, sample_dt: float) -> Trajectory:
    """Same output as :func:`evolve` for the standard initial state, via two state vectors.

    The initial state is the mixture ``nu |1,0..0> + (1-nu) |0,0..0>``, so the
    two components are propagated as kets and their reduced states mixed.
    """
    dim = params.dim
    excited = _basis_vector(dim, dim // 2)  # Q is the leftmost factor
    vacuum = _basis_vector(dim, 0)
    weights = (params.nu, 1.0 - params.nu)
    times, segs, local = sample_grid(schedule, sample_dt)
    n_op = np.diag(excitation_number(params.n_qubits)).real

    rho_q = np.zeros((times.size, 2, 2), dtype=complex)
    exc = np.zeros(times.size)
    overlap = np.zeros(times.size, dtype=complex)
    kets = []
    for weight, psi0 in zip(weights, (excited, vacuum)):
        psi_t = np.empty((times.size, dim), dtype=complex)
        psi = psi0
        for j, (dur, seg) in enumerate(schedule.segments):
            w, v = seg.spectrum
            idx = np.flatnonzero(segs == j)
            c = v.conj().T @ psi
            psi_t[idx] = (np.exp(-1j * np.outer(local[idx], w)) * c) @ v.T
            psi_t[idx[local[idx] == 0]] = psi
            psi = v @ (np.exp(-1j * w * dur) * c)
        rho_q += weight * _reduce_q_pure(psi_t)
        exc += weight * (np.abs(psi_t) ** 2) @ n_op
        kets.append(psi_t)
    overlap = np.einsum("ti,ti->t", kets[0].conj(), kets[1])
    nu = params.nu
    pur = nu ** 2 + (1 - nu) ** 2 + 2 * nu * (1 - nu) * np.abs(overlap) ** 2
    return _assemble(times, segs, local, rho_q, params, schedule, initial_full_state(params), exc, pur)


def simulate(params: ModelParams, sample_dt: float | None = None, n_intervals: int | None = None) -> Trajectory:
    """Standard run: Eq.-style initial state, one interval per memory qubit."""
    schedule = build_schedule(params, n_intervals)
    if sample_dt is None:
        sample_dt = params.delta_t / DEFAULT_SAMPLES_PER_INTERVAL
    return rank2_fast_path(params, schedule, sample_dt)


def final_p1(params: ModelParams, delta_ts, n_intervals: int | None = None) -> np.ndarray:
    """Excited population of Q at the end of the schedule, for many interval lengths at once.

    Only the excited ket can leave Q excited (the vacuum is stationary), so
    ``p1 = nu * |<1|_Q psi>|^2`` with ``psi`` the evolved ``|1,0..0>``.
    """
    n = params.n_memory if n_intervals is None else n_intervals
    schedule = build_schedule(params, n)
    delta_ts = np.atleast_1d(np.asarray(delta_ts, dtype=float))
    dim = params.dim
    psi = np.zeros((delta_ts.size, dim), dtype=complex)
    psi[:, dim // 2] = 1.0
    for _, seg in schedule.segments:
        w, v = seg.spectrum
        c = psi @ v.conj()
        psi = np.where((delta_ts == 0)[:, None], psi, (c * np.exp(-1j * np.outer(delta_ts, w))) @ v.T)
    return params.nu * np.sum(np.abs(psi[:, dim // 2:]) ** 2, axis=1)
