"""Closed forms for the uncorrelated memory (no memory-memory coupling).

With ``r = 0`` every interval is an independent two-qubit swap, so the
excited population after ``n`` completed intervals and local time ``s`` is
``nu * cos(dt)**(2n) * cos(s)**2``. These expressions are exact and serve as
the reference for the numerical pipeline. All functions accept ``omega`` and
rescale ``t -> omega * t``; the default ``omega = 1`` measures time in units of
the inverse coupling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AnalyticError

ARCSIN_SLACK = 1e-12
_S_SLACK = 1e-12


class Discontinuity:
    """Returned in place of a speed where the closed form is 0/0.

    The qubit starts pure (``nu = 1``) and the state's rank changes at
    ``t = 0``; the speed limit has no well-defined limit there.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "DISCONTINUITY"


DISCONTINUITY = Discontinuity()


@dataclass(frozen=True)
class DiagonalQubitState:
    p1: float

    def __post_init__(self):
        if not -ARCSIN_SLACK <= self.p1 <= 1 + ARCSIN_SLACK:
            raise AnalyticError(f"p1 must lie in [0,1], got {self.p1}")

    @property
    def matrix(self) -> np.ndarray:
        return np.diag([1.0 - self.p1, self.p1]).astype(complex)


@dataclass(frozen=True)
class UncorrelatedPoint:
    nu: float
    n_completed: int
    s: float
    delta_t: float

    def __post_init__(self):
        if not 0 <= self.nu <= 1:
            raise AnalyticError(f"nu must lie in [0,1], got {self.nu}")
        if self.n_completed < 0:
            raise AnalyticError(f"n_completed must be >= 0, got {self.n_completed}")
        if self.delta_t <= 0:
            raise AnalyticError(f"delta_t must be > 0, got {self.delta_t}")
        if not -_S_SLACK <= self.s <= self.delta_t + _S_SLACK:
            raise AnalyticError(f"local time s={self.s} outside [0, delta_t={self.delta_t}]")

    @classmethod
    def from_time(cls, nu: float, t: float, delta_t: float) -> "UncorrelatedPoint":
        """Locate global time ``t``; interval boundaries belong to the interval they open."""
        n = int(math.floor(t / delta_t + 1e-12))
        s = max(t - n * delta_t, 0.0)
        return cls(nu, n, s, delta_t)


def purity_parameter(nu: float, delta_t: float, n: int, omega: float = 1.0) -> float:
    """Excited population carried into interval ``n + 1``: ``nu cos(omega dt)^(2n)``."""
    return nu * math.cos(omega * delta_t) ** (2 * n)


def analytic_reduced_state(point: UncorrelatedPoint, omega: float = 1.0) -> DiagonalQubitState:
    nu_n = purity_parameter(point.nu, point.delta_t, point.n_completed, omega)
    return DiagonalQubitState(nu_n * math.cos(omega * point.s) ** 2)


def is_singular(point: UncorrelatedPoint) -> bool:
    return point.nu == 1.0 and point.n_completed == 0 and point.s == 0.0


def analytic_vqsl(point: UncorrelatedPoint, omega: float = 1.0) -> float | Discontinuity:
    if is_singular(point):
        return DISCONTINUITY
    nu_n = purity_parameter(point.nu, point.delta_t, point.n_completed, omega)
    ws = omega * point.s
    denom = 1.0 - nu_n * math.cos(ws) ** 2
    if denom <= 0.0:
        # pure state returning to |1>: same 0/0 as the initial point
        return DISCONTINUITY
    return omega * math.sqrt(nu_n) * abs(math.sin(ws)) / math.sqrt(denom)


def analytic_vqsl_grid(nu: float, delta_t: float, times, omega: float = 1.0) -> np.ndarray:
    """Vectorised speed limit on a grid of global times; NaN at the singular point."""
    times = np.asarray(times, dtype=float)
    n = np.floor(times / delta_t + 1e-12)
    s = np.maximum(times - n * delta_t, 0.0)
    nu_n = nu * np.cos(omega * delta_t) ** (2 * n)
    num = np.sqrt(nu_n) * np.abs(np.sin(omega * s))
    den = 1.0 - nu_n * np.cos(omega * s) ** 2
    with np.errstate(invalid="ignore", divide="ignore"):
        v = omega * num / np.sqrt(den)
    v[(num == 0) & (den > 0)] = 0.0
    return v


def _arcsin(x: float) -> float:
    if abs(x) > 1 + ARCSIN_SLACK:
        raise AnalyticError(f"arcsin argument {x} outside [-1,1]")
    return math.asin(min(1.0, max(-1.0, x)))


def tau_qsl_denominator(nu: float, tau: float, n: int, omega: float = 1.0) -> float:
    """Integral of the speed limit over ``[0, tau]`` with ``n`` equal intervals."""
    sq = math.sqrt(nu)
    return _arcsin(sq) - _arcsin(sq * math.cos(omega * tau / n) ** n)


def interval_integral_sum(nu: float, delta_t: float, n: int, omega: float = 1.0) -> float:
    """Sum of per-interval speed integrals; telescopes to the closed-form denominator."""
    total = 0.0
    c = math.cos(omega * delta_t)
    for k in range(n):
        sq_k = math.sqrt(purity_parameter(nu, delta_t, k, omega))
        total += _arcsin(sq_k) - _arcsin(sq_k * c)
    return total


def analytic_tau_qsl(nu: float, tau: float, n: int, omega: float = 1.0) -> float:
    """Speed-limit time for total time ``tau`` split into ``n`` intervals.

    Returns ``math.inf`` when the integrated speed vanishes (e.g. ``nu = 0``).
    """
    if n < 1:
        raise AnalyticError(f"n must be >= 1, got {n}")
    if not tau > 0:
        raise AnalyticError(f"tau must be > 0, got {tau}")
    if not 0 <= nu <= 1:
        raise AnalyticError(f"nu must lie in [0,1], got {nu}")
    denom = tau_qsl_denominator(nu, tau, n, omega)
    if denom <= 0.0:
        return math.inf
    return tau / denom


def vqsl_trapezoid(nu: float, delta_t: float, n: int, points_per_interval: int, omega: float = 1.0) -> float:
    """Trapezoid integral of the closed-form speed over ``n`` intervals.

    Each interval is integrated on its own grid because the speed jumps at
    interval boundaries. The 0/0 point is replaced by its right-hand limit
    ``omega``.
    """
    s = np.linspace(0.0, delta_t, points_per_interval + 1)
    total = 0.0
    for k in range(n):
        nu_k = purity_parameter(nu, delta_t, k, omega)
        num = np.sqrt(nu_k) * np.abs(np.sin(omega * s))
        den = 1.0 - nu_k * np.cos(omega * s) ** 2
        with np.errstate(invalid="ignore", divide="ignore"):
            v = omega * num / np.sqrt(den)
        v[(num == 0) & (den > 0)] = 0.0
        v[np.isnan(v)] = omega
        total += float(np.trapezoid(v, s))
    return total
