"""Skew-normal and exponential tables at N=2^25 on the compressed representation.

    python scripts/full_scale.py

Needs about 1 GB of memory and roughly an hour per distribution on one core.
"""

import argparse

from phaseamp.cli import parse_size
from phaseamp.experiments import DeskSetup, tuned_run


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--n", default="2^25")
    ap.add_argument("--grid-points", type=int, default=3)
    args = ap.parse_args()

    desk = DeskSetup(n_states=parse_size(args.n))
    for kind in ("skew_normal", "exponential"):
        run = tuned_run(desk.table(kind), grid_points=args.grid_points, compressed=True)
        j, p = run.peak
        print(f"{kind:12s} k={run.k_scale:.5f} pi/f_max  peak p={p:.4f} at j={j}", flush=True)


if __name__ == "__main__":
    main()
