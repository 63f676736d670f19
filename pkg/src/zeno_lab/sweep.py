"""Minimal erasure time as a function of the coupling ratio ``r``.

For fixed ``r`` the final excited population ``p1(N * dt)`` is scanned on a
uniform ``dt`` grid; every discrete local minimum is refined by golden-section
search and the first one that reaches ``erasure_tol`` defines ``tau_min``. The
ordinal of that minimum is reported as the branch index.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import SweepError
from .sim import final_p1
from .model import ModelParams

INV_PHI = (math.sqrt(5) - 1) / 2
INV_PHI2 = (3 - math.sqrt(5)) / 2

DEFAULT_PARAMS = ModelParams(nu=1.0, n_memory=3, omega=1.0, r=0.0, delta_t=1.0)


@dataclass(frozen=True)
class ErasureSearchConfig:
    erasure_tol: float = 1e-9
    dt_scan_max: float = 2 * math.pi
    dt_scan_points: int = 4000
    refine_tol: float = 1e-9

    def __post_init__(self):
        for name in ("erasure_tol", "dt_scan_max", "refine_tol"):
            if not getattr(self, name) > 0:
                raise SweepError(f"{name} must be > 0, got {getattr(self, name)}")
        if self.dt_scan_points < 100:
            raise SweepError(f"dt_scan_points must be >= 100, got {self.dt_scan_points}")


@dataclass(frozen=True)
class LocalMinimum:
    delta_t: float
    p1: float


@dataclass(frozen=True)
class TauMinResult:
    r: float
    tau_min: float  # nan when no minimum reaches erasure_tol
    residual: float
    branch: int  # 1-based ordinal of the accepted minimum, 0 if none
    delta_t: float

    @property
    def erased(self) -> bool:
        return self.branch > 0


@dataclass(frozen=True)
class CriticalPoint:
    r_crit: float
    r_below: float
    r_above: float
    tau_below: float
    tau_above: float

    @property
    def jump(self) -> float:
        return self.tau_above - self.tau_below


@dataclass
class SweepResult:
    rows: list[TauMinResult]
    landmarks: dict[str, float] = field(default_factory=dict)


def golden_section(f: Callable[[float], float], a: float, b: float, tol: float) -> tuple[float, float]:
    """Minimise a unimodal ``f`` on ``[a, b]``; returns the best abscissa and value seen."""
    a, b = min(a, b), max(a, b)
    c = a + INV_PHI2 * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = a + INV_PHI2 * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    return (c, fc) if fc < fd else (d, fd)


def worker_count() -> int:
    env = os.environ.get("ZENO_LAB_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise SweepError(f"ZENO_LAB_THREADS must be an integer, got {env!r}") from None
        return max(1, n)
    return os.cpu_count() or 1


def parallel_map(fn: Callable, items: Iterable, workers: int | None = None) -> list:
    """``map`` with results in input order; serial when one worker is requested."""
    items = list(items)
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items))


def scan_grid(cfg: ErasureSearchConfig) -> np.ndarray:
    n = cfg.dt_scan_points
    return cfg.dt_scan_max * np.arange(1, n + 1) / n


def local_minima(params: ModelParams, cfg: ErasureSearchConfig = ErasureSearchConfig()) -> list[LocalMinimum]:
    """All refined local minima of the final excited population over the ``dt`` scan."""
    dts = scan_grid(cfg)
    p = final_p1(params, dts)
    idx = np.flatnonzero((p[1:-1] < p[:-2]) & (p[1:-1] <= p[2:])) + 1
    out = []
    for i in idx:
        x, fx = golden_section(lambda dt: float(final_p1(params, dt)[0]), dts[i - 1], dts[i + 1], cfg.refine_tol)
        out.append(LocalMinimum(float(x), float(fx)))
    return out


def tau_min_for_r(
    r: float, cfg: ErasureSearchConfig = ErasureSearchConfig(), params: ModelParams = DEFAULT_PARAMS
) -> TauMinResult:
    """Shortest total time ``N * dt`` after which the computational qubit is erased."""
    params = replace(params, r=float(r))
    n = params.n_memory
    best = None
    dts = scan_grid(cfg)
    p = final_p1(params, dts)
    idx = np.flatnonzero((p[1:-1] < p[:-2]) & (p[1:-1] <= p[2:])) + 1
    for branch, i in enumerate(idx, start=1):
        x, fx = golden_section(lambda dt: float(final_p1(params, dt)[0]), dts[i - 1], dts[i + 1], cfg.refine_tol)
        if fx <= cfg.erasure_tol:
            return TauMinResult(params.r, float(n * x), float(fx), branch, float(x))
        if best is None or fx < best.p1:
            best = LocalMinimum(x, fx)
    if best is None:
        j = int(np.argmin(p))
        best = LocalMinimum(float(dts[j]), float(p[j]))
    return TauMinResult(params.r, math.nan, float(best.p1), 0, float(best.delta_t))


def sweep_r(
    r_values: Sequence[float],
    cfg: ErasureSearchConfig = ErasureSearchConfig(),
    params: ModelParams = DEFAULT_PARAMS,
    workers: int | None = None,
) -> SweepResult:
    rows = parallel_map(lambda r: tau_min_for_r(r, cfg, params), sorted(r_values), workers)
    return SweepResult(rows)


def r_grid(r_min: float, r_max: float, r_step: float) -> np.ndarray:
    """Inclusive grid built from integer multiples of the step, so reruns share values exactly."""
    n = int(round((r_max - r_min) / r_step))
    return np.round(r_min + r_step * np.arange(n + 1), 12)


def _tau_or_raise(r, cfg, params) -> float:
    res = tau_min_for_r(r, cfg, params)
    if not res.erased:
        raise SweepError(f"no erasure at r={r:.6g} (best residual {res.residual:.3e})")
    return float(res.tau_min)


def find_r_opt(
    r_range: tuple[float, float] = (1.0, 2.0),
    cfg: ErasureSearchConfig = ErasureSearchConfig(),
    params: ModelParams = DEFAULT_PARAMS,
    tol: float = 1e-4,
    n_check: int = 11,
    workers: int | None = None,
) -> tuple[float, float]:
    """Ratio with the fastest erasure; the bracket must hold a single minimum of ``tau_min(r)``."""
    lo, hi = r_range
    rs = np.linspace(lo, hi, n_check)
    taus = np.array(parallel_map(lambda r: tau_min_for_r(r, cfg, params).tau_min, rs, workers))
    if not np.all(np.isfinite(taus)):
        raise SweepError(f"tau_min undefined inside bracket: {dict(zip(rs.tolist(), taus.tolist()))}")
    k = int(np.argmin(taus))
    steps = np.diff(taus)
    if np.any(steps[:k] > 0) or np.any(steps[k:] < 0):
        listing = ", ".join(f"{r:.4g}:{t:.6f}" for r, t in zip(rs, taus))
        raise SweepError(f"tau_min(r) is not unimodal on [{lo}, {hi}]: {listing}")
    a = rs[max(k - 1, 0)]
    b = rs[min(k + 1, n_check - 1)]
    r_opt, tau_opt = golden_section(lambda r: _tau_or_raise(r, cfg, params), a, b, tol)
    return float(r_opt), float(tau_opt)


def find_r_crit(
    r_bracket: tuple[float, float] = (1.9, 2.2),
    cfg: ErasureSearchConfig = ErasureSearchConfig(),
    params: ModelParams = DEFAULT_PARAMS,
    jump_threshold: float = 0.5,
    tol: float = 1e-4,
) -> CriticalPoint:
    """Bisect on the ratio where ``tau_min`` jumps to a later branch."""
    lo, hi = r_bracket
    t_lo, t_hi = _tau_or_raise(lo, cfg, params), _tau_or_raise(hi, cfg, params)
    if not t_hi - t_lo > jump_threshold:
        raise SweepError(
            f"bracket endpoints are on the same branch: tau_min({lo})={t_lo:.6f}, tau_min({hi})={t_hi:.6f}"
        )
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        t_mid = _tau_or_raise(mid, cfg, params)
        if abs(t_mid - t_lo) < abs(t_hi - t_mid):
            lo, t_lo = mid, t_mid
        else:
            hi, t_hi = mid, t_mid
    return CriticalPoint(0.5 * (lo + hi), lo, hi, float(t_lo), float(t_hi))


ASYMPTOTE_RATIOS = (20.0, 50.0, 100.0)


def asymptote_tau_min(
    r_large: float = 50.0, cfg: ErasureSearchConfig = ErasureSearchConfig(), params: ModelParams = DEFAULT_PARAMS
) -> float:
    if r_large < 20:
        raise SweepError(f"r_large must be >= 20, got {r_large}")
    return _tau_or_raise(r_large, cfg, params)


def asymptote_sequence(
    ratios: Sequence[float] = ASYMPTOTE_RATIOS,
    cfg: ErasureSearchConfig = ErasureSearchConfig(),
    params: ModelParams = DEFAULT_PARAMS,
    workers: int | None = None,
) -> dict[float, float]:
    """``tau_min`` at several large ratios, for judging convergence by eye."""
    taus = parallel_map(lambda r: asymptote_tau_min(r, cfg, params), ratios, workers)
    return dict(zip(ratios, taus))


@dataclass(frozen=True, eq=False)
class FidelityGrid:
    r: np.ndarray
    tau: np.ndarray
    p1: np.ndarray  # shape (len(r), len(tau))

    def rows(self):
        for i, r in enumerate(self.r):
            for j, t in enumerate(self.tau):
                yield float(r), float(t), float(self.p1[i, j])


def fidelity_grid(
    r_values: Sequence[float],
    tau_values: Sequence[float],
    params: ModelParams = DEFAULT_PARAMS,
    workers: int | None = None,
) -> FidelityGrid:
    """Final excited population for every ``(r, tau)`` with ``dt = tau / N``."""
    r_values = np.asarray(r_values, dtype=float)
    tau_values = np.asarray(tau_values, dtype=float)
    if r_values.size < 50 or tau_values.size < 50:
        raise SweepError(f"grid resolution must be at least 50x50, got {r_values.size}x{tau_values.size}")
    n = params.n_memory
    rows = parallel_map(lambda r: final_p1(replace(params, r=float(r)), tau_values / n), r_values, workers)
    return FidelityGrid(r_values, tau_values, np.vstack(rows))
