"""``zeno-lab <command> [--config FILE] [--set key=value ...] [--out DIR]``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analytic import (
    DISCONTINUITY,
    UncorrelatedPoint,
    analytic_reduced_state,
    analytic_tau_qsl,
    analytic_vqsl,
    vqsl_trapezoid,
)
from .config import RunConfig, config_to_dict, parse_config
from .errors import ConfigError, ZenoLabError
from .io import merge_json, write_csv, write_json
from .model import build_schedule
from .qfi import tau_qsl_numeric, vqsl_curve
from .sim import sample_grid, simulate
from .sweep import worker_count, asymptote_sequence, fidelity_grid, find_r_crit, find_r_opt, r_grid, sweep_r

logger = logging.getLogger("zeno_lab")

COMMANDS = ("analytic", "simulate", "qfi", "tau-qsl", "sweep-r", "find-ropt", "find-rcrit", "grid")


def _analytic(cfg: RunConfig, out: Path) -> list[Path]:
    m = cfg.model
    _, segs, local = sample_grid(build_schedule(m), cfg.resolved_sample_dt)
    rows = []
    for j, s in zip(segs, local):
        pt = UncorrelatedPoint(m.nu, int(j), float(s), m.delta_t)
        v = analytic_vqsl(pt, m.omega)
        rows.append((j * m.delta_t + s, analytic_reduced_state(pt, m.omega).p1, float("nan") if v is DISCONTINUITY else v))
    return [write_csv(out / "analytic.csv", ("t", "p1", "vqsl"), rows)]


def _simulate(cfg: RunConfig, out: Path) -> list[Path]:
    traj = simulate(cfg.model, cfg.resolved_sample_dt)
    rows = zip(traj.times, traj.p1, traj.purity_q)
    return [write_csv(out / "trajectory.csv", ("t", "p1", "purity_Q"), rows)]


def _qfi(cfg: RunConfig, out: Path) -> list[Path]:
    traj = simulate(cfg.model, cfg.resolved_sample_dt)
    curve = vqsl_curve(traj, cfg.qfi_policy)
    rows = zip(curve.times, curve.qfi, curve.vqsl, curve.rank_truncated)
    paths = [write_csv(out / "qfi.csv", ("t", "qfi", "vqsl", "rank_truncated"), rows)]
    summary = {"tau": float(curve.times[-1]), "tau_qsl_numeric": tau_qsl_numeric(curve)}
    if cfg.model.r == 0:
        m = cfg.model
        summary["tau_qsl_analytic"] = analytic_tau_qsl(m.nu, m.n_memory * m.delta_t, m.n_memory, m.omega)
    paths.append(write_json(out / "qfi_summary.json", summary))
    return paths


def _tau_qsl(cfg: RunConfig, out: Path) -> list[Path]:
    m, ex = cfg.model, cfg.experiment
    rows = []
    for n in ex.n_list:
        closed = analytic_tau_qsl(m.nu, ex.tau, n, m.omega)
        integral = vqsl_trapezoid(m.nu, ex.tau / n, n, ex.quadrature_points, m.omega)
        quad = ex.tau / integral if integral > 0 else float("inf")
        rows.append((n, ex.tau / n, closed, quad))
    return [write_csv(out / "tau_qsl.csv", ("n", "delta_t", "tau_qsl", "tau_qsl_quadrature"), rows)]


def _sweep_r(cfg: RunConfig, out: Path) -> list[Path]:
    ex = cfg.experiment
    result = sweep_r(r_grid(ex.r_min, ex.r_max, ex.r_step), cfg.search, cfg.model)
    rows = ((row.r, row.tau_min, row.residual, row.branch) for row in result.rows)
    paths = [write_csv(out / "sweep.csv", ("r", "tau_min", "residual", "branch"), rows)]
    seq = asymptote_sequence(ex.asymptote_ratios, cfg.search, cfg.model)
    paths.append(merge_json(out / "landmarks.json", {f"tau_min_r{r:g}": t for r, t in seq.items()}))
    return paths


def _find_ropt(cfg: RunConfig, out: Path) -> list[Path]:
    r_opt, tau_opt = find_r_opt(cfg.experiment.ropt_bracket, cfg.search, cfg.model)
    return [merge_json(out / "landmarks.json", {"r_opt": r_opt, "tau_min_opt": tau_opt})]


def _find_rcrit(cfg: RunConfig, out: Path) -> list[Path]:
    ex = cfg.experiment
    cp = find_r_crit(ex.rcrit_bracket, cfg.search, cfg.model, ex.jump_threshold)
    data = {
        "r_crit": cp.r_crit,
        "tau_min_below_crit": cp.tau_below,
        "tau_min_above_crit": cp.tau_above,
        "tau_min_jump": cp.jump,
    }
    return [merge_json(out / "landmarks.json", data)]


def _grid(cfg: RunConfig, out: Path) -> list[Path]:
    ex = cfg.experiment
    rs = np.linspace(*ex.grid_r, ex.grid_shape[0])
    taus = np.linspace(*ex.grid_tau, ex.grid_shape[1])
    grid = fidelity_grid(rs, taus, cfg.model)
    return [write_csv(out / "grid.csv", ("r", "tau", "p1"), grid.rows())]


HANDLERS = {
    "analytic": _analytic,
    "simulate": _simulate,
    "qfi": _qfi,
    "tau-qsl": _tau_qsl,
    "sweep-r": _sweep_r,
    "find-ropt": _find_ropt,
    "find-rcrit": _find_rcrit,
    "grid": _grid,
}


def run_command(cmd: str, cfg: RunConfig) -> list[Path]:
    """Run one command, write its outputs and a manifest; return the written paths."""
    if cmd not in HANDLERS:
        raise ConfigError(f"unknown command {cmd!r}; expected one of {', '.join(COMMANDS)}")
    out = Path(cfg.output_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write-test"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise ConfigError(f"output_dir {str(out)!r} is not writable: {exc}") from None
    logger.info("running %s into %s", cmd, out)
    paths = HANDLERS[cmd](cfg, out)
    manifest = {
        "artifact": "zeno-lab",
        "version": __version__,
        "command": cmd,
        "config": config_to_dict(cfg),
        "resolved": {"sample_dt": cfg.resolved_sample_dt, "threads": worker_count()},
        "outputs": sorted(p.name for p in paths),
    }
    paths.append(write_json(out / f"manifest-{cmd}.json", manifest))
    return paths


def _error_json(module: str, kind: str, message: str) -> str:
    return json.dumps({"error": {"module": module, "type": kind, "message": message}})


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        sys.stderr.write(_error_json("cli-io", "UsageError", message) + "\n")
        sys.exit(2)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="zeno-lab", description=__doc__)
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", metavar="FILE", help="JSON config file")
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                   help="override one config value, e.g. --set nu=0.9 or --set model.r=1.62")
    p.add_argument("--out", metavar="DIR", help="output directory (default: out)")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = parse_config(args.config, args.overrides, args.out)
        paths = run_command(args.command, cfg)
    except ZenoLabError as exc:
        sys.stderr.write(_error_json(exc.module, type(exc).__name__, str(exc)) + "\n")
        return 1
    except Exception as exc:  # surfaced as JSON so callers never parse a traceback
        sys.stderr.write(_error_json("zeno-lab", type(exc).__name__, str(exc)) + "\n")
        return 3
    for path in paths:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
