"""Martingale check: the ensemble mean stays at x0.

The diffusion has no drift, so E[x(t)] = x0 for all t even though every
path is eventually absorbed -- the few survivors sit far from the origin
and hold the average up.  The Monte Carlo mean over N paths is normal
around x0 with variance sigma2*x0*(t-t0)/N, which gives the printed
confidence intervals; rows where the interval misses x0 are flagged.

Run:  python demos/martingale_confidence.py  [--paths N] [--sigma2 V]
"""

import argparse

from feller import ProcessParams, SimConfig, run_mean_position_experiment

CHECKPOINTS = [100.0, 1000.0, 5000.0, 10000.0, 20000.0]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--paths", type=int, default=10000)
    ap.add_argument("--sigma2", type=float, default=1.0)
    ap.add_argument("--alpha", type=float, default=0.05)
    ap.add_argument("--seed", type=int, default=11)
    args = ap.parse_args()

    cfgs = [
        SimConfig(ProcessParams(args.sigma2, x0), tn=20000.0, dt=1.0,
                  n_paths=args.paths, seed=args.seed + i)
        for i, x0 in enumerate([10.0, 100.0, 1000.0, 10000.0])
    ]
    report = run_mean_position_experiment(cfgs, CHECKPOINTS, alpha=args.alpha)

    level = 100 * (1 - args.alpha)
    print(f"mean position with {level:.0f}% confidence intervals "
          f"(sigma2={args.sigma2}, {args.paths} paths)")
    print(f"{'x0':>8} {'t':>7} {'mean':>12} {'lower':>12} {'upper':>12}   covers x0?")
    for r in report.rows:
        mark = "yes" if r.covers else " NO"
        print(f"{r.x0:>8g} {r.t:>7g} {r.mean:>12.2f} {r.ci_lower:>12.2f} "
              f"{r.ci_upper:>12.2f}   {mark}")
    print(f"coverage: {report.coverage():.0%} of {len(report.rows)} cells "
          f"(nominal {level:.0f}%)")


if __name__ == "__main__":
    main()
