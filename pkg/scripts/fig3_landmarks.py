#!/usr/bin/env python3
"""tau_min(r) curve for N = 3 plus the optimum, critical ratio and large-r values."""
import argparse
import json
import math
import time
from pathlib import Path

from zeno_lab.io import write_csv, write_json
from zeno_lab.sweep import asymptote_sequence, find_r_crit, find_r_opt, r_grid, sweep_r


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("out/fig3"))
    ap.add_argument("--r-max", type=float, default=3.0)
    ap.add_argument("--r-step", type=float, default=0.01)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    t0 = time.perf_counter()
    rows = sweep_r(r_grid(0.0, args.r_max, args.r_step)).rows
    write_csv(args.out / "sweep.csv", ("r", "tau_min", "residual", "branch"),
              ((x.r, x.tau_min, x.residual, x.branch) for x in rows))
    r_opt, tau_opt = find_r_opt()
    cp = find_r_crit()
    seq = asymptote_sequence()
    landmarks = {
        "r_opt": r_opt,
        "tau_min_opt": tau_opt,
        "r_crit": cp.r_crit,
        **{f"tau_min_r{r:g}": t for r, t in seq.items()},
        "tau_min_single_memory": math.pi / 2,
    }
    write_json(args.out / "landmarks.json", landmarks)
    print(json.dumps(landmarks, indent=2))
    print(f"{time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
