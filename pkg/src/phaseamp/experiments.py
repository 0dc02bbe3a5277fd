"""Reusable experiment drivers shared by the scripts and the acceptance suite."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .objective import DistributionSpec, InjectiveSpec, ObjectiveTable, make_injective, sample_distribution
from .schedule import (
    LocateResult,
    RunTrace,
    ScanResult,
    default_iterations,
    greedy_dynamic_k,
    run_fixed_k,
    scan_k,
    size_scaling_study,
    tune_k,
)

DESK_SIZE = 2**20
DESK_SEED = 7


@dataclass(frozen=True)
class DeskSetup:
    """The standard distribution tables: sigma 10, skew shape 5, rate 1."""

    n_states: int = DESK_SIZE
    seed: int = DESK_SEED
    sigma: float = 10.0
    alpha: float = 5.0
    lam: float = 1.0

    def spec(self, kind: str, method: str = "random") -> DistributionSpec:
        return DistributionSpec(kind, sigma=self.sigma, alpha=self.alpha, lam=self.lam, seed=self.seed, method=method)

    def table(self, kind: str, method: str = "random") -> ObjectiveTable:
        return sample_distribution(self.spec(kind, method), self.n_states)


@dataclass
class TunedRun:
    table: ObjectiveTable
    k: float
    trace: RunTrace
    scan: ScanResult
    located: LocateResult

    @property
    def peak(self) -> tuple[int, float]:
        return self.trace.peak()

    @property
    def k_scale(self) -> float:
        """k expressed in units of pi / f_max."""
        return self.k * self.table.f_max / math.pi


def tuned_run(table: ObjectiveTable, grid_points: int = 5, lo: float = 0.2, hi: float = 3.0,
              compressed: bool = False) -> TunedRun:
    """Best fixed k in [lo, hi] * pi / f_max, found by locating then scanning a narrow window."""
    unit = math.pi / table.f_max
    scan, loc = tune_k(table, lo * unit, hi * unit, default_iterations(table.n_states), grid_points,
                       compressed=compressed)
    return TunedRun(table, scan.k_best, scan.trace_best, scan, loc)


def sensitivity(table: ObjectiveTable, k_opt: float, factors=(0.8, 1.2), iterations: int | None = None) -> dict:
    """Peak p_solution at each ``factor * k_opt`` over the full default budget."""
    iterations = iterations or default_iterations(table.n_states)
    return {f: run_fixed_k(table, f * k_opt, iterations).peak()[1] for f in factors}


def quadratic_k_scale(n: int = 2**14, horizon: int = 384, lo: float = 1.2, hi: float = 2.6, points: int = 57) -> float:
    """Scan-optimal k for the quadratic family at size ``n``, in units of pi / f_max."""
    table = make_injective(InjectiveSpec("quadratic", n))
    unit = math.pi / table.f_max
    res = scan_k(table, lo * unit, hi * unit, points, horizon)
    return res.k_best / unit


def quadratic_size_study(sizes, k_scale: float, horizon: int = 384) -> list[tuple[int, np.ndarray]]:
    """P_solution / P_initial curves with k = k_scale * pi / f_max(N) over a shared horizon."""
    def k_rule(n):
        return k_scale * math.pi / make_injective(InjectiveSpec("quadratic", n)).f_max

    return size_scaling_study(InjectiveSpec("quadratic", sizes[0]), sizes, k_rule, lambda n: horizon)


@dataclass
class GreedyComparison:
    greedy: RunTrace
    fixed: ScanResult

    @property
    def greedy_peak(self) -> float:
        return self.greedy.peak()[1]

    @property
    def fixed_peak(self) -> float:
        return self.fixed.trace_best.peak()[1]


def greedy_vs_fixed(n: int = 1000, iterations: int = 1000, grid_points: int = 200) -> GreedyComparison:
    table = make_injective(InjectiveSpec("quadratic", n))
    unit = math.pi / table.f_max
    greedy = greedy_dynamic_k(table, iterations)
    fixed = scan_k(table, 0.05 * unit, 3.0 * unit, grid_points, iterations)
    return GreedyComparison(greedy, fixed)
