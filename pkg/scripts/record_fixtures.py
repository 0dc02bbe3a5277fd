"""Regenerate tests/fixtures/acceptance_fixtures.json from the N=2^20 desk runs.

    python scripts/record_fixtures.py

Records the k-sensitivity peak ratios of the normal table and the E_Q
optimum of each distribution; the acceptance suite compares against them.
"""

import json
import time
from pathlib import Path

from phaseamp import __version__, expected_queries
from phaseamp.experiments import DeskSetup, sensitivity, tuned_run

OUT = Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "acceptance_fixtures.json"


def main():
    desk = DeskSetup()
    record = {"generated_by": f"phaseamp {__version__}", "n_states": desk.n_states, "seed": desk.seed,
              "k_sensitivity": {}, "e_q": {}}
    runs = {
        "normal": tuned_run(desk.table("normal", "quantile")),
        "skew_normal": tuned_run(desk.table("skew_normal")),
        "exponential": tuned_run(desk.table("exponential")),
    }
    for kind, run in runs.items():
        qa = expected_queries(run.trace)
        j, p = run.peak
        record["e_q"][kind] = {"k": run.k, "peak_iteration": j, "peak_p_solution": p, "t_star": qa.t_star,
                               "e_q_star": qa.e_q_star, "advantage": run.trace.n_states / qa.e_q_star}
        print(kind, record["e_q"][kind], flush=True)

    normal = runs["normal"]
    t0 = time.perf_counter()
    peaks = sensitivity(normal.table, normal.k)
    peak = normal.peak[1]
    record["k_sensitivity"] = {"table": "normal quantile sigma=10", "k_opt": normal.k, "peak_at_k_opt": peak,
                               **{f"ratio_{f}": p / peak for f, p in peaks.items()}}
    print("sensitivity", record["k_sensitivity"], f"{time.perf_counter() - t0:.0f} s", flush=True)
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(record, indent=2, sort_keys=True) + "\n")
    print("wrote", OUT)


if __name__ == "__main__":
    main()
