"""Query accounting over run traces.

One (oracle, diffusion) pair counts as one query. A sampling trial that
runs t iterations and then measures succeeds with probability p_solution(t),
so the expected total cost of repeating trials until success is
t / p_solution(t). The classical baseline checks inputs one at a time:
E_C = N, with per-draw success 1/N.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DomainError, UndefinedExpectationError
from .schedule import RunTrace


@dataclass(frozen=True)
class QueryAnalysis:
    e_q_curve: list[tuple[int, float]]
    t_star: int
    p_at_t_star: float
    e_c: float
    p_c: float

    @property
    def e_q_star(self) -> float:
        return dict(self.e_q_curve)[self.t_star]


@dataclass(frozen=True)
class SuccessModel:
    p_single: float
    trials: int


def expected_queries(trace: RunTrace) -> QueryAnalysis:
    p = trace.p_solution
    t = np.arange(p.size)
    ok = (t >= 1) & (p > 0)
    if not np.any(ok):
        raise UndefinedExpectationError("no iteration has p_solution > 0; E_Q is undefined")
    with np.errstate(divide="ignore"):
        e_q = np.where(ok, t / np.where(p > 0, p, 1.0), np.inf)
    curve = [(int(i), float(e_q[i])) for i in range(1, p.size)]
    t_star = int(np.argmin(e_q[1:])) + 1  # argmin returns the earliest minimum
    n = trace.n_states
    return QueryAnalysis(curve, t_star, float(p[t_star]), float(n), 1.0 / n)


def success_probability(model: SuccessModel) -> float:
    if not 0.0 <= model.p_single <= 1.0:
        raise DomainError(f"p_single must lie in [0, 1], got {model.p_single}")
    if model.trials < 1:
        raise DomainError("trials must be >= 1")
    return 1.0 - (1.0 - model.p_single) ** model.trials


def trials_for(p_single: float, target: float = 0.99) -> int | None:
    """Smallest trial count with success probability >= ``target``; None if unreachable."""
    if p_single <= 0.0:
        return None
    if p_single >= 1.0:
        return 1
    trials = max(1, math.ceil(math.log1p(-target) / math.log1p(-p_single)))
    # guard the ceil against rounding just below the target
    while success_probability(SuccessModel(p_single, trials)) < target:
        trials += 1
    return trials


def advantage_report(trace: RunTrace, target: float = 0.99) -> dict:
    qa = expected_queries(trace)
    e_q_star = qa.e_q_star
    j_peak, p_peak = trace.peak()
    return {
        "n_states": trace.n_states,
        "t_star": qa.t_star,
        "p_at_t_star": qa.p_at_t_star,
        "e_q_star": e_q_star,
        "e_c": qa.e_c,
        "p_c": qa.p_c,
        "speedup": qa.e_c / e_q_star,
        "success_target": target,
        "trials_for_target": trials_for(qa.p_at_t_star, target),
        "peak_iteration": j_peak,
        "peak_p_solution": p_peak,
        "tuning_queries": trace.tuning_queries,
        "e_q_curve": [[t, e, float(trace.records[t].p_solution)] for t, e in qa.e_q_curve],
    }


def write_report(path, report: dict, header: str | None = None) -> None:
    """Write the key/value report as JSON (curve omitted) next to a ``t,e_q,p_solution`` table."""
    path = Path(path)
    summary = {k: v for k, v in report.items() if k != "e_q_curve"}
    if header:
        summary["header"] = header
    path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    table_path = path.with_suffix(".csv")
    with table_path.open("w") as fh:
        if header:
            for line in header.splitlines():
                fh.write(f"# {line}\n")
        fh.write("t,e_q,p_solution\n")
        for t, e, p in report["e_q_curve"]:
            fh.write(f"{t},{e:.17g},{p:.17g}\n")


def local_maxima(p) -> np.ndarray:
    """Indices i with p[i-1] < p[i] >= p[i+1] (interior points only)."""
    p = np.asarray(p, dtype=np.float64)
    if p.size < 3:
        return np.array([], dtype=np.int64)
    mid = p[1:-1]
    return np.flatnonzero((mid > p[:-2]) & (mid >= p[2:])) + 1


def beating(p) -> dict:
    """Summarize oscillation of a p_solution series.

    ``modulated`` is set when a local maximum lies strictly between the
    global maximum and the lowest later maximum, both in position and in
    height: the peak heights decay gradually rather than all being equal.
    """
    idx = local_maxima(p)
    heights = np.asarray(p, dtype=np.float64)[idx]
    diffs = np.diff(heights)
    non_monotone = bool(np.any(diffs > 0) and np.any(diffs < 0))
    modulated = False
    if idx.size:
        g = int(np.argmax(heights))
        later = heights[g + 1:]
        if later.size >= 2:
            m = g + 1 + int(np.argmin(later))
            between = heights[g + 1:m]
            modulated = bool(np.any((between > heights[m]) & (between < heights[g])))
    return {"maxima": idx, "heights": heights, "count": int(idx.size),
            "non_monotone": non_monotone, "modulated": modulated}
