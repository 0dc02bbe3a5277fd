"""Long fixed-k run showing oscillation and amplitude modulation of p_solution.

    python scripts/beating.py --kind normal --n 2^16 --periods 20
"""

import argparse
import math

from phaseamp import locate_k, run_fixed_k
from phaseamp.analysis import beating
from phaseamp.cli import parse_size
from phaseamp.experiments import DeskSetup
from phaseamp.schedule import write_trace


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--kind", choices=("normal", "skew_normal", "exponential"), default="normal")
    ap.add_argument("--n", default="2^16")
    ap.add_argument("--periods", type=int, default=20, help="run length in units of sqrt(N)")
    ap.add_argument("--out", default="beating.csv")
    args = ap.parse_args()

    table = DeskSetup(n_states=parse_size(args.n)).table(args.kind)
    unit = math.pi / table.f_max
    loc = locate_k(table, 0.2 * unit, 3.0 * unit)
    trace = run_fixed_k(table, loc.k, args.periods * math.isqrt(table.n_states))
    write_trace(args.out, trace, f"{args.kind} n={table.n_states} beating run")
    b = beating(trace.p_solution)
    print(f"{b['count']} local maxima; modulated={b['modulated']}")
    for i, h in zip(b["maxima"], b["heights"]):
        print(f"  j={i:6d}  p={h:.5f}")


if __name__ == "__main__":
    main()
