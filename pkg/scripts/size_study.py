"""P_solution / P_initial for the quadratic family over growing sizes.

    python scripts/size_study.py --sizes 2^14,2^16,2^18,2^20 --horizon 384
"""

import argparse

from phaseamp.cli import parse_size
from phaseamp.experiments import quadratic_k_scale, quadratic_size_study


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--sizes", default="2^14,2^16,2^18,2^20")
    ap.add_argument("--horizon", type=int, default=384)
    ap.add_argument("--k-scale", type=float, help="k in units of pi/f_max (default: scan at the smallest size)")
    ap.add_argument("--out", default="size_study.csv")
    args = ap.parse_args()

    sizes = [parse_size(s) for s in args.sizes.split(",")]
    c = args.k_scale or quadratic_k_scale(sizes[0], args.horizon)
    curves = quadratic_size_study(sizes, c, args.horizon)
    with open(args.out, "w") as fh:
        fh.write("iter," + ",".join(f"ratio_{n}" for n, _ in curves) + "\n")
        for j in range(args.horizon + 1):
            fh.write(f"{j}," + ",".join(f"{curve[j]:.10g}" for _, curve in curves) + "\n")
    print(f"k = {c:.4f} pi/f_max")
    for n, curve in curves:
        print(f"N={n:>8d}  peak ratio {curve.max():.3f} at j={int(curve.argmax())}")


if __name__ == "__main__":
    main()
