"""Absorbed-fraction tables: simulation against the closed form.

The probability that a walker started at x0 has hit the origin by time t
is exp(-2*x0/(sigma2*(t-t0))).  This script reproduces the two standard
benchmark grids -- absorbed percentage over time for several noise
levels, and for several start points -- and prints simulated next to
theoretical values with the binomial standard error.

Run:  python demos/survival_tables.py  [--paths N]
(the default 10000 paths takes ~45 s; --paths 2000 is a quick look)
"""

import argparse

from feller import ProcessParams, SimConfig, run_survival_experiment

CHECKPOINTS = [100.0, 1000.0, 5000.0, 10000.0, 20000.0]


def show(report, label):
    print(f"\nabsorbed percentage by t, varying {label}")
    header = f"{label:>10} " + "".join(f"{int(t):>16}" for t in CHECKPOINTS)
    print(header)
    print(f"{'':>10} " + "   theo /  sim  " * len(CHECKPOINTS))
    by_param = {}
    for row in report.rows:
        by_param.setdefault(row.param, []).append(row)
    for param, rows in by_param.items():
        cells = "".join(
            f"  {100 * r.theoretical:6.2f}/{100 * r.simulated:6.2f}  " for r in rows
        )
        print(f"{param:>10g} {cells}")
    print(f"largest deviation: {report.max_deviation_se():.2f} standard errors")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--paths", type=int, default=10000)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    sigma_cfgs = [
        SimConfig(ProcessParams(s2, 1000.0), tn=20000.0, dt=1.0,
                  n_paths=args.paths, seed=args.seed + i)
        for i, s2 in enumerate([0.1, 1.0, 10.0, 100.0])
    ]
    show(run_survival_experiment(sigma_cfgs, CHECKPOINTS, vary="sigma2"), "sigma2")

    x0_cfgs = [
        SimConfig(ProcessParams(1.0, x0), tn=20000.0, dt=1.0,
                  n_paths=args.paths, seed=args.seed + 10 + i)
        for i, x0 in enumerate([10.0, 100.0, 1000.0, 10000.0])
    ]
    show(run_survival_experiment(x0_cfgs, CHECKPOINTS, vary="x0"), "x0")


if __name__ == "__main__":
    main()
