"""Oracle schedules and the amplification loop.

``run_schedule`` is the core loop: prepare the uniform superposition, then for
every schedule entry apply the phase oracle and the diffusion, recording one
``IterationRecord`` per pair. Fixed-k runs, k scans, greedy per-step k choice,
alternating +/-k and the size study are thin drivers around it.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, NamedTuple, Sequence

import numpy as np

from . import _kernels
from .errors import DomainError
from .objective import InjectiveSpec, ObjectiveTable, make_injective
from .state import QuantumState, uniform_state


@dataclass(frozen=True)
class OracleSchedule:
    entries: tuple[float, ...]

    def __post_init__(self):
        entries = tuple(float(k) for k in self.entries)
        if not entries:
            raise DomainError("a schedule needs at least one entry")
        if not all(math.isfinite(k) for k in entries):
            raise DomainError("schedule entries must be finite")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def constant(cls, k: float, iterations: int) -> "OracleSchedule":
        if iterations < 1:
            raise DomainError("iterations must be >= 1")
        return cls((float(k),) * int(iterations))

    @classmethod
    def alternating(cls, k: float, iterations: int) -> "OracleSchedule":
        k = float(k)
        return cls(tuple(k if j % 2 == 0 else -k for j in range(int(iterations))))

    def __len__(self) -> int:
        return len(self.entries)

    def to_json(self):
        ks = set(self.entries)
        if len(ks) == 1:
            return {"constant": self.entries[0], "length": len(self)}
        return list(self.entries)


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    k_used: float
    p_solution: float
    p_worst: float
    mean: complex
    norm_error: float
    amplifying: bool


@dataclass
class RunTrace:
    records: list[IterationRecord]
    table_descriptor: dict
    schedule: OracleSchedule
    n_states: int
    solution_count: int = 1
    tuning_queries: int = 0
    final_state: QuantumState | None = field(default=None, repr=False, compare=False)

    def _column(self, name) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records])

    @property
    def p_solution(self) -> np.ndarray:
        return self._column("p_solution")

    @property
    def p_worst(self) -> np.ndarray:
        return self._column("p_worst")

    @property
    def means(self) -> np.ndarray:
        return self._column("mean").astype(np.complex128)

    @property
    def imag_mean(self) -> np.ndarray:
        """|Im(mean)| per record; the quantity tracked by the alternating scheme."""
        return np.abs(self.means.imag)

    @property
    def norm_errors(self) -> np.ndarray:
        return self._column("norm_error")

    def peak(self) -> tuple[int, float]:
        """Iteration and value of the global maximum of p_solution (earliest on ties)."""
        p = self.p_solution
        j = int(np.argmax(p))
        return j, float(p[j])


class _Evolution:
    """Mutable amplitude buffer driven by the compiled kernels.

    Each diffusion is left pending and folded into the next oracle pass, so
    one step costs a single sweep over the amplitudes. The squared norm of
    the state after a diffusion is only known once that sweep (or ``finish``)
    runs, so each record's norm_error is filled in one step late.
    """

    def __init__(self, table: ObjectiveTable, compressed: bool):
        self.table = table
        self.state = uniform_state(table, compressed)
        self.n = table.n_states
        if compressed:
            self.vals = self.state.values
            last = self.vals.size - 1
            self.sol = np.array([last])
            self.worst = np.array([0])
        else:
            self.vals = table.values
            self.sol = table.solution_set
            self.worst = table.worst_set
        self.best = int(self.sol[-1])
        self.compressed = compressed
        self.mult = self.state.weights()
        self.twice = 0j
        self.pending = False
        self.records: list[IterationRecord] = []
        self._phases: dict[float, np.ndarray] = {}

    def phase(self, k: float) -> np.ndarray:
        ph = self._phases.get(k)
        if ph is None:
            if len(self._phases) >= 4:
                self._phases.pop(next(iter(self._phases)))
            ph = np.exp(1j * k * self.vals)
            self._phases[k] = ph
        return ph

    def prob(self, idx: np.ndarray) -> float:
        a = self.state.amplitudes[idx]
        if self.pending:
            a = self.twice - a
        return float(np.sum(self.mult[idx] * (a.real * a.real + a.imag * a.imag)))

    def _set_norm(self, nsq: float) -> None:
        self.records[-1] = replace(self.records[-1], norm_error=abs(float(nsq) - 1.0))

    def initial(self) -> None:
        amp = self.state.amplitudes
        mean = complex(_kernels.weighted_block_sum(amp, self.mult)) / self.n
        nsq = float(_kernels.weighted_norm_sq(amp, self.mult))
        # uniform state: the diffusion leaves it fixed, so it is never amplifying
        amplifying = abs(2.0 * mean - amp[self.best]) > abs(amp[self.best])
        self.records.append(IterationRecord(0, 0.0, self.prob(self.sol), self.prob(self.worst), mean,
                                            abs(nsq - 1.0), bool(amplifying)))

    def step(self, j: int, k: float, phase: np.ndarray | None = None) -> None:
        if phase is None:
            phase = self.phase(k)
        amp = self.state.amplitudes
        if self.compressed:
            total, nsq = _kernels.fused_step(amp, phase, self.mult, self.twice, self.pending)
        else:
            total, nsq = _kernels.fused_step_dense(amp, phase, self.twice, self.pending)
        if self.pending:
            self._set_norm(nsq)
        mean = complex(total) / self.n
        best_post = amp[self.best]
        amplifying = abs(2.0 * mean - best_post) > abs(best_post)
        self.twice = 2.0 * mean
        self.pending = True
        self.records.append(IterationRecord(j, float(k), self.prob(self.sol), self.prob(self.worst), mean,
                                            -1.0, bool(amplifying)))

    def finish(self) -> QuantumState:
        """Apply the pending diffusion so ``state`` holds the true amplitudes."""
        if self.pending:
            self._set_norm(_kernels.reflect(self.state.amplitudes, self.mult, self.twice))
            self.pending = False
        return self.state


def _validate_k(k: float) -> float:
    k = float(k)
    if not math.isfinite(k):
        raise DomainError(f"k must be finite, got {k}")
    return k


def default_iterations(n_states: int) -> int:
    return math.ceil(3.0 * math.sqrt(n_states))


def run_schedule(table: ObjectiveTable, schedule: OracleSchedule, compressed: bool = False) -> RunTrace:
    ev = _Evolution(table, compressed)
    ev.initial()
    for j, k in enumerate(schedule.entries, start=1):
        ev.step(j, k)
    final = ev.finish()
    return RunTrace(ev.records, dict(table.descriptor), schedule, table.n_states,
                    int(table.solution_set.size), final_state=final)


def run_fixed_k(table: ObjectiveTable, k: float, iterations: int | None = None, compressed: bool = False) -> RunTrace:
    if iterations is None:
        iterations = default_iterations(table.n_states)
    return run_schedule(table, OracleSchedule.constant(_validate_k(k), iterations), compressed)


class ScanResult(NamedTuple):
    k_best: float
    trace_best: RunTrace
    curve: list[tuple[float, float]]


def scan_k(table: ObjectiveTable, k_min: float, k_max: float, grid_points: int, max_iterations: int,
           compressed: bool = False) -> ScanResult:
    """Grid search over a fixed k; the peak of a run is its global max of p_solution."""
    k_min, k_max = _validate_k(k_min), _validate_k(k_max)
    if not k_min < k_max:
        raise DomainError(f"need k_min < k_max, got [{k_min}, {k_max}]")
    if grid_points < 2:
        raise DomainError("grid_points must be >= 2")
    best_k, best_trace, best_p = None, None, -1.0
    curve = []
    for k in np.linspace(k_min, k_max, int(grid_points)):
        trace = run_fixed_k(table, float(k), max_iterations, compressed)
        _, p = trace.peak()
        curve.append((float(k), p))
        if p > best_p:
            best_k, best_trace, best_p = float(k), trace, p
    return ScanResult(best_k, best_trace, curve)


# --- k locator -----------------------------------------------------------
#
# Near the optimum the peak of p_solution is a resonance whose width in k
# shrinks like 1/sqrt(N), far too narrow for a blind grid at large N. The
# locator works on a reduced table: the extreme ``tail`` values on both ends
# are kept exactly and the middle is binned into ``bins`` centroid entries
# with their counts as multiplicities. The reduced table is then searched
# finely and the full-size scan only has to cover a narrow window.


class LocateResult(NamedTuple):
    k: float
    predicted_peak: float
    peak_iteration: int


def reduced_table(table: ObjectiveTable, bins: int = 1024, tail: int = 64) -> tuple[np.ndarray, np.ndarray]:
    vals, counts = table.unique()
    if vals.size <= bins + 2 * tail:
        return vals, counts.astype(np.float64)
    lo_v, lo_c = vals[:tail], counts[:tail]
    hi_v, hi_c = vals[-tail:], counts[-tail:]
    mid_v, mid_c = vals[tail:-tail], counts[tail:-tail]
    edges = np.linspace(mid_v[0], mid_v[-1], bins + 1)
    idx = np.clip(np.searchsorted(edges, mid_v, side="right") - 1, 0, bins - 1)
    cnt = np.bincount(idx, weights=mid_c, minlength=bins)
    tot = np.bincount(idx, weights=mid_v * mid_c, minlength=bins)
    keep = cnt > 0
    centroids = tot[keep] / cnt[keep]
    out_v = np.concatenate([lo_v, centroids, hi_v])
    out_c = np.concatenate([lo_c, cnt[keep], hi_c]).astype(np.float64)
    order = np.argsort(out_v, kind="stable")
    return out_v[order], out_c[order]


def locate_k(table: ObjectiveTable, k_min: float, k_max: float, max_iterations: int | None = None,
             coarse_points: int = 64, candidates: int = 3, bins: int = 1024, tail: int = 64) -> LocateResult:
    """Estimate the fixed k maximizing peak p_solution in [k_min, k_max] on a reduced table."""
    k_min, k_max = _validate_k(k_min), _validate_k(k_max)
    if not k_min < k_max:
        raise DomainError(f"need k_min < k_max, got [{k_min}, {k_max}]")
    n = table.n_states
    J = int(max_iterations or default_iterations(n))
    vals, mult = reduced_table(table, bins, tail)
    sol = vals.size - 1
    f_sol = float(vals[-1])

    edges = np.linspace(k_min, k_max, coarse_points + 1)
    width = edges[1] - edges[0]
    scored = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        centre = 0.5 * (lo + hi)
        p_c, _ = _kernels.surrogate_peak(vals, mult, centre, J, n, sol)
        scored.append((p_c, centre))
        # the solution driven by this cell's mean sequence marks where inside
        # the cell its phase locks onto the mean rotation
        means = _kernels.mean_trajectory(vals, mult, centre, J, n)
        ks = np.linspace(lo, hi, 200)
        resp = _kernels.driven_response(means, f_sol, ks, n)
        scored.append((float(resp.max()), float(ks[int(np.argmax(resp))])))

    picks = []
    for _, k in sorted(scored, key=lambda t: -t[0]):
        if all(abs(k - q) > width for q in picks):
            picks.append(k)
        if len(picks) == candidates:
            break

    best = (-1.0, k_min, 0)
    for k0 in picks:
        span = width
        for points in (201, 41, 41):
            ks = np.linspace(max(k_min, k0 - span), min(k_max, k0 + span), points)
            res = [_kernels.surrogate_peak(vals, mult, float(k), J, n, sol) for k in ks]
            i = int(np.argmax([r[0] for r in res]))
            k0 = float(ks[i])
            if res[i][0] > best[0]:
                best = (float(res[i][0]), k0, int(res[i][1]))
            span = 2.0 * (ks[1] - ks[0])
    return LocateResult(best[1], best[0], best[2])


def tune_k(table: ObjectiveTable, k_min: float, k_max: float, max_iterations: int | None = None,
           grid_points: int = 5, rel_window: float | None = None, compressed: bool = False) -> tuple[ScanResult, LocateResult]:
    """Locate the optimum on the reduced table, then ``scan_k`` the full table around it.

    The scan window defaults to +/- 1/(pi sqrt N) relative to the located k,
    about one resonance width, and its iteration budget to 1.25x the located
    peak iteration (capped at ``max_iterations``).
    """
    n = table.n_states
    J = int(max_iterations or default_iterations(n))
    loc = locate_k(table, k_min, k_max, J)
    w = rel_window if rel_window is not None else 1.0 / (math.pi * math.sqrt(n))
    budget = min(J, math.ceil(1.25 * loc.peak_iteration) + 16)
    k = loc.k
    scan = scan_k(table, k * (1 - w), k * (1 + w), grid_points, budget, compressed)
    return scan, loc


# candidate phase rows are materialized in chunks of at most this many entries
GREEDY_CHUNK_ELEMENTS = 1 << 22


def default_greedy_grid(table: ObjectiveTable, points: int = 64) -> np.ndarray:
    f_max = table.f_max
    if f_max <= 0:
        return np.array([0.0])
    mags = np.geomspace(math.pi / (10.0 * f_max), 2.0 * math.pi / f_max, points)
    return np.concatenate([[0.0], mags])


def greedy_dynamic_k(table: ObjectiveTable, iterations: int, k_grid: Sequence[float] | None = None,
                     compressed: bool = False) -> RunTrace:
    """At each step apply the candidate k giving the highest next-step p_solution.

    Ties go to the smallest k. Every candidate evaluation is counted in
    ``tuning_queries``; the trace's schedule holds the k actually applied.
    """
    if iterations < 1:
        raise DomainError("iterations must be >= 1")
    grid = default_greedy_grid(table) if k_grid is None else np.asarray(list(k_grid), dtype=np.float64)
    if grid.size == 0:
        raise DomainError("k_grid must be nonempty")
    if not np.all(np.isfinite(grid)):
        raise DomainError("k_grid entries must be finite")
    grid = np.unique(grid)  # ascending, so argmax ties resolve to the smallest k
    ev = _Evolution(table, compressed)
    sol = ev.sol.astype(np.int64)
    rows_per_chunk = max(1, GREEDY_CHUNK_ELEMENTS // max(1, ev.vals.size))
    pre = np.exp(1j * np.outer(grid, ev.vals)) if grid.size <= rows_per_chunk else None

    ev.initial()
    chosen = []
    for j in range(1, int(iterations) + 1):
        amp = ev.finish().amplitudes
        if pre is not None:
            scores = _kernels.greedy_scores(amp, pre, ev.mult, ev.n, sol)
        else:
            scores = np.concatenate([
                _kernels.greedy_scores(amp, np.exp(1j * np.outer(grid[s:s + rows_per_chunk], ev.vals)), ev.mult, ev.n, sol)
                for s in range(0, grid.size, rows_per_chunk)
            ])
        i = int(np.argmax(scores))
        k = float(grid[i])
        phase = np.ascontiguousarray(pre[i]) if pre is not None else ev.phase(k)
        ev.step(j, k, phase)
        chosen.append(k)
    final = ev.finish()
    return RunTrace(ev.records, dict(table.descriptor), OracleSchedule(tuple(chosen)), table.n_states,
                    int(table.solution_set.size), tuning_queries=int(iterations) * int(grid.size),
                    final_state=final)


def alternating_k(table: ObjectiveTable, k: float, iterations: int, compressed: bool = False) -> RunTrace:
    """Schedule +k, -k, +k, ...; the trace's ``imag_mean`` tracks |Im(mean)| per record."""
    if iterations < 2:
        raise DomainError("alternating schedule needs at least 2 iterations")
    return run_schedule(table, OracleSchedule.alternating(_validate_k(k), iterations), compressed)


def size_scaling_study(spec: InjectiveSpec, sizes: Sequence[int], k_rule: Callable[[int], float],
                       max_iterations_rule: Callable[[int], int]) -> list[tuple[int, np.ndarray]]:
    """Amplified-to-initial probability ratio per iteration for each size."""
    sizes = [int(n) for n in sizes]
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise DomainError("sizes must be strictly ascending")
    out = []
    for n in sizes:
        table = make_injective(InjectiveSpec(spec.kind, n, spec.scale_divisor))
        trace = run_fixed_k(table, k_rule(n), max_iterations_rule(n))
        p_initial = table.solution_set.size / n
        out.append((n, trace.p_solution / p_initial))
    return out


# --- trace files -----------------------------------------------------------

TRACE_HEADER = "iter,k,p_solution,p_worst,mean_re,mean_im,norm_err,amplifying"


def write_trace(path, trace: RunTrace, header: str | None = None) -> None:
    meta = {"n_states": trace.n_states, "solution_count": trace.solution_count,
            "tuning_queries": trace.tuning_queries, "table": trace.table_descriptor}
    with Path(path).open("w") as fh:
        if header:
            for line in header.splitlines():
                fh.write(f"# {line}\n")
        fh.write(f"# trace: {json.dumps(meta, sort_keys=True)}\n")
        fh.write(TRACE_HEADER + "\n")
        for r in trace.records:
            fh.write(f"{r.iteration},{r.k_used:.17g},{r.p_solution:.17g},{r.p_worst:.17g},"
                     f"{r.mean.real:.17g},{r.mean.imag:.17g},{r.norm_error:.17g},{int(r.amplifying)}\n")


def read_trace(path) -> RunTrace:
    meta = None
    records = []
    for line in Path(path).read_text().splitlines():
        if line.startswith("# trace: "):
            meta = json.loads(line[len("# trace: "):])
            continue
        if not line or line.startswith("#") or line == TRACE_HEADER:
            continue
        c = line.split(",")
        records.append(IterationRecord(int(c[0]), float(c[1]), float(c[2]), float(c[3]),
                                       complex(float(c[4]), float(c[5])), float(c[6]), bool(int(c[7]))))
    if meta is None:
        raise ValueError(f"{path}: missing '# trace:' metadata line")
    if len(records) < 2:
        raise ValueError(f"{path}: a trace needs at least one iteration")
    schedule = OracleSchedule(tuple(r.k_used for r in records[1:]))
    return RunTrace(records, meta.get("table", {}), schedule, int(meta["n_states"]),
                    int(meta.get("solution_count", 1)), int(meta.get("tuning_queries", 0)))


def run_descriptor(trace: RunTrace, config: dict | None = None) -> dict:
    j, p = trace.peak()
    return {
        "config": config or {},
        "table": trace.table_descriptor,
        "n_states": trace.n_states,
        "schedule": trace.schedule.to_json(),
        "iterations": len(trace.schedule),
        "peak": {"iteration": j, "p_solution": p, "k": trace.records[j].k_used},
        "final_p_solution": float(trace.records[-1].p_solution),
        "max_norm_error": float(trace.norm_errors.max()),
        "tuning_queries": trace.tuning_queries,
    }


def write_descriptor(path, descriptor: dict) -> None:
    Path(path).write_text(json.dumps(descriptor, indent=2, sort_keys=True) + "\n")

