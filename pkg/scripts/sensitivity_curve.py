"""Peak p_solution as a function of k around the tuned optimum (normal table).

    python scripts/sensitivity_curve.py --n 2^16 --points 41 --out sensitivity.csv
"""

import argparse

import numpy as np

from phaseamp.cli import parse_size
from phaseamp.experiments import DeskSetup, tuned_run
from phaseamp.schedule import default_iterations, run_fixed_k


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--n", default="2^16")
    ap.add_argument("--sampling", choices=("random", "quantile"), default="quantile")
    ap.add_argument("--span", type=float, default=0.3, help="relative half-width around k_opt")
    ap.add_argument("--points", type=int, default=41)
    ap.add_argument("--out", default="sensitivity.csv")
    args = ap.parse_args()

    table = DeskSetup(n_states=parse_size(args.n)).table("normal", args.sampling)
    best = tuned_run(table)
    iters = default_iterations(table.n_states)
    with open(args.out, "w") as fh:
        fh.write("k_over_k_opt,peak_p_solution,peak_iteration\n")
        for f in np.linspace(1 - args.span, 1 + args.span, args.points):
            j, p = run_fixed_k(table, f * best.k, iters).peak()
            fh.write(f"{f:.6f},{p:.10g},{j}\n")
            print(f"{f:.3f}  {p:.4f}  {j}")


if __name__ == "__main__":
    main()
