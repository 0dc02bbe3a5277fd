"""Objective-value tables: sampling, injective families, constraint handling, file I/O.

A table is always held in canonical form: values sorted ascending and shifted
so the minimum is exactly zero. Basis index ``x`` therefore carries the x-th
smallest objective value and the optimum sits at index ``N - 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal

import numpy as np

from .errors import DomainError, TableParseError

DistributionKind = Literal["normal", "skew_normal", "exponential"]
InjectiveKind = Literal["linear", "quadratic", "cubic", "exp10"]

# x**3 stops being exactly representable well before this; beyond it the
# cubic family is refused outright.
MAX_CUBIC_STATES = 2**26


@dataclass(frozen=True)
class ObjectiveTable:
    values: np.ndarray
    descriptor: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 1 or v.size < 2:
            raise DomainError("an objective table needs at least 2 values")
        if not np.all(np.isfinite(v)):
            raise DomainError("objective values must be finite")
        if v[0] != 0.0 or np.any(np.diff(v) < 0):
            raise DomainError("table values must be sorted ascending with minimum 0; use ObjectiveTable.from_values")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_values(cls, values, descriptor: dict | None = None) -> "ObjectiveTable":
        """Canonicalize arbitrary finite values (sort, shift minimum to 0)."""
        v = np.sort(np.asarray(values, dtype=np.float64))
        if v.size < 2:
            raise DomainError("an objective table needs at least 2 values")
        if not np.all(np.isfinite(v)):
            raise DomainError("objective values must be finite")
        return cls(shift_nonnegative(v), dict(descriptor or {}))

    @property
    def n_states(self) -> int:
        return int(self.values.size)

    @property
    def f_max(self) -> float:
        return float(self.values[-1])

    @property
    def solution_set(self) -> np.ndarray:
        return np.flatnonzero(self.values == self.values[-1])

    @property
    def worst_set(self) -> np.ndarray:
        return np.flatnonzero(self.values == self.values[0])

    def unique(self) -> tuple[np.ndarray, np.ndarray]:
        """Distinct values (ascending) and their multiplicities."""
        vals, counts = np.unique(self.values, return_counts=True)
        return vals, counts


@dataclass(frozen=True)
class DistributionSpec:
    """Parameters of a sampled objective distribution.

    ``method="random"`` draws independent samples. ``method="quantile"``
    places the N values at the inverse CDF of the midpoints (i + 1/2)/N,
    which gives an exactly symmetric table for the normal law.
    """

    kind: DistributionKind
    mu: float = 0.0
    sigma: float = 1.0
    alpha: float = 0.0
    lam: float = 1.0
    seed: int = 0
    method: Literal["random", "quantile"] = "random"

    def __post_init__(self):
        if self.kind not in ("normal", "skew_normal", "exponential"):
            raise DomainError(f"unknown distribution kind {self.kind!r}")
        if self.method not in ("random", "quantile"):
            raise DomainError(f"unknown sampling method {self.method!r}")
        if self.kind in ("normal", "skew_normal"):
            if not (math.isfinite(self.sigma) and self.sigma > 0):
                raise DomainError(f"sigma must be > 0, got {self.sigma}")
            if not math.isfinite(self.mu):
                raise DomainError("mu must be finite")
        if self.kind == "skew_normal" and not math.isfinite(self.alpha):
            raise DomainError("alpha must be finite")
        if self.kind == "exponential" and not (math.isfinite(self.lam) and self.lam > 0):
            raise DomainError(f"lambda must be > 0, got {self.lam}")
        if not (0 <= int(self.seed) < 2**64):
            raise DomainError("seed must be an unsigned 64-bit integer")

    def describe(self) -> dict:
        d = {"source": "distribution", "kind": self.kind, "method": self.method, "seed": int(self.seed),
             "generator": "numpy.random.Philox"}
        if self.kind in ("normal", "skew_normal"):
            d.update(mu=self.mu, sigma=self.sigma)
        if self.kind == "skew_normal":
            d["alpha"] = self.alpha
        if self.kind == "exponential":
            d["lambda"] = self.lam
        return d


@dataclass(frozen=True)
class InjectiveSpec:
    kind: InjectiveKind
    n_states: int
    scale_divisor: int | None = None

    def __post_init__(self):
        if self.kind not in ("linear", "quadratic", "cubic", "exp10"):
            raise DomainError(f"unknown injective kind {self.kind!r}")
        if self.n_states < 2:
            raise DomainError("n_states must be >= 2")
        if self.scale_divisor is not None and self.scale_divisor < 1:
            raise DomainError("scale_divisor must be a positive integer")
        if self.kind == "cubic" and self.n_states > MAX_CUBIC_STATES:
            raise DomainError(f"cubic family overflows double precision for N > 2^26 (got {self.n_states})")

    def describe(self) -> dict:
        d = {"source": "injective", "kind": self.kind, "n_states": self.n_states}
        if self.scale_divisor is not None:
            d["scale_divisor"] = self.scale_divisor
        return d


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(int(seed)))


def _skew_normal_draws(rng: np.random.Generator, alpha: float, n: int) -> np.ndarray:
    delta = alpha / math.sqrt(1.0 + alpha * alpha)
    u0 = rng.standard_normal(n)
    u1 = rng.standard_normal(n)
    return delta * np.abs(u0) + math.sqrt(1.0 - delta * delta) * u1


def raw_samples(spec: DistributionSpec, n: int) -> np.ndarray:
    """Unsorted, unshifted draws (or quantiles) for ``spec``."""
    if n < 2:
        raise DomainError("need n >= 2 samples")
    if spec.method == "quantile":
        from scipy import stats

        u = (np.arange(n, dtype=np.float64) + 0.5) / n
        if spec.kind == "normal":
            return stats.norm.ppf(u, loc=spec.mu, scale=spec.sigma)
        if spec.kind == "skew_normal":
            return stats.skewnorm.ppf(u, spec.alpha, loc=spec.mu, scale=spec.sigma)
        return stats.expon.ppf(u, scale=1.0 / spec.lam)

    rng = make_rng(spec.seed)
    if spec.kind == "normal":
        return rng.normal(spec.mu, spec.sigma, n)
    if spec.kind == "skew_normal":
        return spec.mu + spec.sigma * _skew_normal_draws(rng, spec.alpha, n)
    return rng.exponential(1.0 / spec.lam, n)


def sample_distribution(spec: DistributionSpec, n: int) -> ObjectiveTable:
    samples = raw_samples(spec, n)
    return ObjectiveTable.from_values(samples, {**spec.describe(), "n_states": int(n)})


def injective_values(spec: InjectiveSpec) -> np.ndarray:
    n = spec.n_states
    m = spec.scale_divisor or 1
    x = np.arange(n, dtype=np.float64) / m
    if spec.kind == "linear":
        return x
    if spec.kind == "quadratic":
        return x * x
    if spec.kind == "cubic":
        return x * x * x
    # 2^(10x/N) with N the unscaled state count, so the value range is kept under x -> x/m
    return np.exp2(10.0 * x / (n / m)) - 1.0


def make_injective(spec: InjectiveSpec) -> ObjectiveTable:
    return ObjectiveTable.from_values(injective_values(spec), spec.describe())


def absorb_constraint(values, feasible, C: float) -> np.ndarray:
    """Fold a feasibility predicate into the objective: infeasible entries drop by ``C``."""
    f = np.asarray(values, dtype=np.float64)
    g = np.asarray(feasible, dtype=bool)
    if f.shape != g.shape:
        raise DomainError(f"values and feasibility have different shapes {f.shape} vs {g.shape}")
    if f.size == 0:
        return f.copy()
    spread = float(f.max() - f.min())
    if not C > spread:
        raise DomainError(f"C={C} does not separate feasible from infeasible values; need C > {spread}")
    return np.where(g, f, f - C)


def shift_nonnegative(values) -> np.ndarray:
    v = np.asarray(values, dtype=np.float64)
    if v.size == 0:
        raise DomainError("cannot shift an empty array")
    lo = v.min()
    if lo < 0:
        return v + abs(lo)
    return v - lo


def load_table(path) -> ObjectiveTable:
    """Read one decimal value per line; ``#`` lines and blank lines are skipped."""
    path = Path(path)
    values = []
    with path.open() as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            try:
                v = float(text)
            except ValueError:
                raise TableParseError(f"cannot parse {text!r} as a number", lineno) from None
            if not math.isfinite(v):
                raise TableParseError(f"non-finite value {text!r}", lineno)
            values.append(v)
    if len(values) < 2:
        raise TableParseError(f"{path} holds {len(values)} value(s); at least 2 are required")
    return ObjectiveTable.from_values(values, {"source": "file", "path": str(path), "n_states": len(values)})


def write_table(path, values, header: str | None = None) -> None:
    path = Path(path)
    with path.open("w") as fh:
        if header:
            for line in header.splitlines():
                fh.write(f"# {line}\n")
        for v in np.asarray(values, dtype=np.float64):
            fh.write(f"{v:.17g}\n")
