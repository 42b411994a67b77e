"""End-to-end check of the sampler against the closed-form transition law.

One exact draw covers any horizon, so 10^5 single transitions over t
give an empirical picture of the law at t: the zero fraction against the
analytic atom exp(-2*x0/(sigma2*t)), a histogram of the nonzero mass
against the continuous density, and the empirical characteristic
function against exp(i*k*x0 / (1 - i*k*sigma2*t/2)) on a wavenumber
grid.  All three should sit inside their sampling-noise bands.

Run:  python demos/density_validation.py  [--samples N]
"""

import argparse
import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from feller import ProcessParams, run_density_validation

OUT = pathlib.Path(__file__).parent / "output"


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--samples", type=int, default=100000)
    ap.add_argument("--sigma2", type=float, default=1.0)
    ap.add_argument("--x0", type=float, default=1000.0)
    ap.add_argument("--t", type=float, default=1000.0)
    ap.add_argument("--seed", type=int, default=99)
    args = ap.parse_args()

    proc = ProcessParams(sigma2=args.sigma2, x0=args.x0)
    report = run_density_validation(proc, args.t, args.samples, seed=args.seed)

    print(f"{args.samples} one-step draws over t={args.t:g} "
          f"(sigma2={args.sigma2}, x0={args.x0:g})")
    for c in report.checks:
        status = "pass" if c.passed else "FAIL"
        print(f"  {c.name:<26} value {c.simulated:.6g}  expected {c.expected:.6g}  "
              f"error {c.error:.3g} <= {c.tolerance:.3g}  [{status}]")

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4.2))
    centers = 0.5 * (report.hist_edges[:-1] + report.hist_edges[1:])
    ax1.stairs(report.hist_density, report.hist_edges, fill=True, alpha=0.45,
               label="simulated (nonzero part)")
    ax1.plot(centers, report.hist_theory, "b-", lw=1.2, label="closed form")
    ax1.set_xlabel("x")
    ax1.set_ylabel("density")
    ax1.set_title("continuous part of the transition law")
    ax1.legend()

    ax2.plot(report.ecf_k, report.ecf_error, "k.-", lw=0.8,
             label="|empirical - analytic|")
    ax2.axhline(3.0 / np.sqrt(args.samples), color="red", lw=1.0,
                label="3/sqrt(n) band")
    ax2.set_xlabel("k")
    ax2.set_ylabel("characteristic function error")
    ax2.set_title("empirical characteristic function")
    ax2.legend()

    OUT.mkdir(exist_ok=True)
    target = OUT / "density_validation.png"
    fig.savefig(target, dpi=130, bbox_inches="tight")
    print(f"wrote {target}")


if __name__ == "__main__":
    main()
