#!/usr/bin/env python3
"""Speed limit over the first interval as a function of (t, nu), closed form and numeric.

Writes a long-format CSV with columns t, nu, vqsl_analytic, vqsl_numeric.
"""
import argparse
from pathlib import Path

import numpy as np

from zeno_lab.analytic import DISCONTINUITY, UncorrelatedPoint, analytic_vqsl
from zeno_lab.io import write_csv
from zeno_lab.model import ModelParams
from zeno_lab.qfi import vqsl_curve
from zeno_lab.sim import simulate


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("out/fig2_vqsl.csv"))
    ap.add_argument("--delta-t", type=float, default=1.0)
    ap.add_argument("--n-nu", type=int, default=41)
    args = ap.parse_args()
    args.out.parent.mkdir(parents=True, exist_ok=True)

    rows = []
    for nu in np.linspace(0.9, 1.0, args.n_nu):
        traj = simulate(ModelParams(nu=float(nu), n_memory=1, delta_t=args.delta_t))
        curve = vqsl_curve(traj)
        for t, s, v in zip(traj.times, traj.local_time, curve.vqsl):
            a = analytic_vqsl(UncorrelatedPoint(float(nu), 0, float(s), args.delta_t))
            rows.append((t, nu, float("nan") if a is DISCONTINUITY else a, v))
    write_csv(args.out, ("t", "nu", "vqsl_analytic", "vqsl_numeric"), rows)
    print(args.out)


if __name__ == "__main__":
    main()
