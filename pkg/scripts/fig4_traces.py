#!/usr/bin/env python3
"""Population and speed-limit traces for four (r, tau) choices at N = 3, nu = 1.

Cases: small ratio, optimal ratio, super-critical ratio at tau_min, and the
super-critical ratio stopped at the first (non-erasing) local minimum.
"""
import argparse
from pathlib import Path

from zeno_lab.io import write_csv
from zeno_lab.model import ModelParams
from zeno_lab.qfi import vqsl_curve
from zeno_lab.sim import simulate
from zeno_lab.sweep import find_r_opt, local_minima, tau_min_for_r


def trace(r, delta_t):
    traj = simulate(ModelParams(nu=1.0, r=r, delta_t=delta_t))
    curve = vqsl_curve(traj)
    return zip(traj.times, traj.p1, curve.vqsl)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("out/fig4"))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    r_opt, _ = find_r_opt()
    cases = {
        "a_small_r": (0.2, tau_min_for_r(0.2).delta_t),
        "b_optimal_r": (r_opt, tau_min_for_r(r_opt).delta_t),
        "c_supercritical_tau_min": (2.7, tau_min_for_r(2.7).delta_t),
        "d_supercritical_first_min": (2.7, local_minima(ModelParams(r=2.7))[0].delta_t),
    }
    for name, (r, dt) in cases.items():
        path = write_csv(args.out / f"{name}.csv", ("t", "p1", "vqsl"), trace(r, dt))
        print(f"{path}: r={r:.4f} tau={3 * dt:.6f}")


if __name__ == "__main__":
    main()
