"""Quantum Fisher information and speed limits along reduced-state trajectories.

The time derivative of the qubit's reduced state is taken by finite
differences of *re-simulated* states at ``t +- h`` inside the same segment
(one-sided second-order stencils next to a segment boundary). The Fisher
information uses the spectral form

    F = 2 * sum_{lam_i + lam_j > floor} |<i|drho|j>|^2 / (lam_i + lam_j)

and terms at or below ``eig_floor`` are dropped and flagged. Dropping the
kernel terms is what makes the speed limit discontinuous where the rank of the
state changes.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import QfiError
from .sim import Evolver, Trajectory

logger = logging.getLogger(__name__)

RICHARDSON_RTOL = 1e-5
# one-sided stencils at h = 1e-6 carry ~1e-9 roundoff; below this scale differences are noise
RICHARDSON_FLOOR = 1e-3


@dataclass(frozen=True)
class QfiPolicy:
    eig_floor: float = 1e-10
    fd_step: float = 1e-6

    def __post_init__(self):
        if not self.eig_floor > 0:
            raise QfiError(f"eig_floor must be > 0, got {self.eig_floor}")
        if not self.fd_step > 0:
            raise QfiError(f"fd_step must be > 0, got {self.fd_step}")


@dataclass(frozen=True, eq=False)
class QslCurve:
    times: np.ndarray
    qfi: np.ndarray
    vqsl: np.ndarray
    rank_truncated: np.ndarray


def qfi_with_flag(rho: np.ndarray, drho_dt: np.ndarray, policy: QfiPolicy = QfiPolicy()) -> tuple[float, bool]:
    """Fisher information and whether any eigenvalue-pair term was dropped."""
    rho = np.asarray(rho, dtype=complex)
    drho = np.asarray(drho_dt, dtype=complex)
    if np.max(np.abs(drho - drho.conj().T)) > 1e-8:
        raise QfiError("state derivative is not Hermitian")
    if abs(np.trace(drho)) > 1e-8:
        raise QfiError(f"state derivative is not traceless (trace {abs(np.trace(drho)):.3e})")
    lam, vec = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    lam = np.clip(lam, 0.0, None)
    d = vec.conj().T @ drho @ vec
    sums = lam[:, None] + lam[None, :]
    keep = sums > policy.eig_floor
    f = 2.0 * float(np.sum(np.abs(d[keep]) ** 2 / sums[keep]))
    if f < -1e-10:
        raise QfiError(f"negative Fisher information {f:.3e}")
    return max(f, 0.0), bool(not keep.all())


def qfi_from_state_pair(rho: np.ndarray, drho_dt: np.ndarray, policy: QfiPolicy = QfiPolicy()) -> float:
    return qfi_with_flag(rho, drho_dt, policy)[0]


def vqsl_from_qfi(qfi):
    """Maximal evolution rate, half the square root of the Fisher information."""
    return 0.5 * np.sqrt(qfi)


def _derivative(ev: Evolver, seg: int, s: np.ndarray, h: float, duration: float) -> np.ndarray:
    """d rho_Q / dt at local times ``s`` of segment ``seg`` with step ``h``."""
    out = np.empty((s.size, 2, 2), dtype=complex)
    fwd = s < 2 * h
    bwd = (s > duration - 2 * h) & ~fwd
    mid = ~(fwd | bwd)
    if mid.any():
        sm = s[mid]
        out[mid] = (ev.reduced(seg, sm + h) - ev.reduced(seg, sm - h)) / (2 * h)
    for mask, sign in ((fwd, 1.0), (bwd, -1.0)):
        if mask.any():
            sm = s[mask]
            r0 = ev.reduced(seg, sm)
            r1 = ev.reduced(seg, sm + sign * h)
            r2 = ev.reduced(seg, sm + sign * 2 * h)
            out[mask] = sign * (-3 * r0 + 4 * r1 - r2) / (2 * h)
    return 0.5 * (out + out.conj().transpose(0, 2, 1))


def state_derivatives(traj: Trajectory, policy: QfiPolicy = QfiPolicy(), richardson: bool = True) -> np.ndarray:
    """Finite-difference ``d rho_Q/dt`` at every sample of ``traj``."""
    h = policy.fd_step
    ev = Evolver(traj.schedule, traj.initial_state)
    durations = traj.schedule.durations
    if np.any(durations <= 4 * h):
        raise QfiError(f"fd_step={h} too large for segment durations {durations.min():.3g}")
    drho = np.empty((traj.times.size, 2, 2), dtype=complex)
    n_bad = 0
    for j, dur in enumerate(durations):
        idx = np.flatnonzero(traj.segment_index == j)
        s = traj.local_time[idx]
        d1 = _derivative(ev, j, s, h, dur)
        drho[idx] = d1
        if richardson:
            d2 = _derivative(ev, j, s, 2 * h, dur)
            diff = np.max(np.abs(d1 - d2), axis=(1, 2))
            scale = np.maximum(np.max(np.abs(d1), axis=(1, 2)), RICHARDSON_FLOOR)
            n_bad += int(np.sum(diff > RICHARDSON_RTOL * scale))
    if n_bad:
        warnings.warn(
            f"{n_bad} samples disagree between fd_step and 2*fd_step by more than {RICHARDSON_RTOL:g} relative",
            RuntimeWarning,
            stacklevel=2,
        )
    return drho


def vqsl_curve(traj: Trajectory, policy: QfiPolicy = QfiPolicy()) -> QslCurve:
    drho = state_derivatives(traj, policy)
    qfi = np.empty(traj.times.size)
    flags = np.zeros(traj.times.size, dtype=bool)
    for i, (rho, d) in enumerate(zip(traj.reduced_states, drho)):
        qfi[i], flags[i] = qfi_with_flag(rho, d, policy)
    return QslCurve(traj.times.copy(), qfi, vqsl_from_qfi(qfi), flags)


def tau_qsl_numeric(curve: QslCurve, tau: float | None = None) -> float:
    """``tau / integral_0^tau v dt`` by the trapezoid rule; ``math.inf`` if the integral vanishes."""
    t, v = curve.times, curve.vqsl
    if tau is None:
        tau = float(t[-1])
    if not 0 < tau <= t[-1] * (1 + 1e-12):
        raise QfiError(f"tau={tau} outside the curve's time range (0, {t[-1]}]")
    inside = t < tau
    ts = np.append(t[inside], tau)
    vs = np.append(v[inside], np.interp(tau, t, v))
    integral = float(np.trapezoid(vs, ts))
    if integral <= 0.0:
        return math.inf
    return tau / integral
