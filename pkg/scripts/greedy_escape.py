"""Greedy per-step k against the best fixed k on the quadratic family.

    python scripts/greedy_escape.py --n 1000 --iters 1000
"""

import argparse

from phaseamp.experiments import greedy_vs_fixed


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--iters", type=int, default=1000)
    ap.add_argument("--grid-points", type=int, default=200)
    args = ap.parse_args()

    cmp = greedy_vs_fixed(args.n, args.iters, args.grid_points)
    j, p = cmp.greedy.peak()
    print(f"greedy:  peak p={p:.4f} at j={j}, tuning queries {cmp.greedy.tuning_queries}")
    print(f"fixed k: peak p={cmp.fixed_peak:.4f} at k={cmp.fixed.k_best:.6g}")
    print(f"ratio {cmp.greedy_peak / cmp.fixed_peak:.2f}")


if __name__ == "__main__":
    main()
