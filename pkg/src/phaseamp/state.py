"""State vectors, the subdivided phase oracle and the diffusion reflection.

Two representations are supported. A dense state stores one complex
amplitude per basis index. A compressed state stores one amplitude per
distinct objective value together with its multiplicity; this is exact
because the oracle and the diffusion treat equal-valued states identically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _kernels
from .errors import DimensionError, DomainError
from .objective import ObjectiveTable


@dataclass
class QuantumState:
    n_states: int
    amplitudes: np.ndarray
    values: np.ndarray | None = None
    multiplicities: np.ndarray | None = None

    def __post_init__(self):
        self.amplitudes = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        if self.n_states < 1 or self.amplitudes.size == 0:
            raise DimensionError("empty state")
        if self.values is None:
            if self.multiplicities is not None:
                raise DimensionError("multiplicities given without values")
            if self.amplitudes.size != self.n_states:
                raise DimensionError(f"dense state holds {self.amplitudes.size} amplitudes, expected {self.n_states}")
            return
        self.values = np.ascontiguousarray(self.values, dtype=np.float64)
        mult = np.ascontiguousarray(self.multiplicities, dtype=np.int64)
        if not (self.values.shape == mult.shape == self.amplitudes.shape):
            raise DimensionError("compressed entries have mismatched lengths")
        if np.any(mult < 1):
            raise DimensionError("multiplicities must be positive")
        if int(mult.sum()) != self.n_states:
            raise DimensionError(f"multiplicities sum to {int(mult.sum())}, expected {self.n_states}")
        if np.any(np.diff(self.values) <= 0):
            raise DimensionError("compressed values must be strictly increasing")
        self.multiplicities = mult

    @property
    def compressed(self) -> bool:
        return self.values is not None

    def weights(self) -> np.ndarray:
        """Per-entry multiplicity as float64 (ones for dense)."""
        if self.compressed:
            return self.multiplicities.astype(np.float64)
        return np.ones(self.amplitudes.size)

    def norm_sq(self) -> float:
        return float(_kernels.weighted_norm_sq(self.amplitudes, self.weights()))

    def probabilities(self) -> np.ndarray:
        """Per-basis-index probabilities |alpha_x|^2 (expanded if compressed)."""
        return np.abs(expand(self).amplitudes) ** 2 if self.compressed else np.abs(self.amplitudes) ** 2

    def copy(self) -> "QuantumState":
        return QuantumState(
            self.n_states,
            self.amplitudes.copy(),
            None if self.values is None else self.values.copy(),
            None if self.multiplicities is None else self.multiplicities.copy(),
        )


def uniform_state(table: ObjectiveTable, compressed: bool = False) -> QuantumState:
    n = table.n_states
    a0 = 1.0 / math.sqrt(n)
    if not compressed:
        return QuantumState(n, np.full(n, a0, dtype=np.complex128))
    vals, counts = table.unique()
    return QuantumState(n, np.full(vals.size, a0, dtype=np.complex128), vals, counts)


def _check_k(k: float) -> float:
    k = float(k)
    if not math.isfinite(k):
        raise DomainError(f"oracle parameter k must be finite, got {k}")
    return k


def _entry_values(state: QuantumState, table: ObjectiveTable) -> np.ndarray:
    if state.n_states != table.n_states:
        raise DimensionError(f"state has {state.n_states} basis states, table has {table.n_states}")
    if not state.compressed:
        return table.values
    if state.values.size != table.unique()[0].size:
        raise DimensionError("compressed state does not match the table's distinct values")
    return state.values


def phase_vector(values: np.ndarray, k: float) -> np.ndarray:
    return np.exp(1j * _check_k(k) * values)


def apply_phase_oracle(state: QuantumState, table: ObjectiveTable, k: float) -> QuantumState:
    """Multiply each amplitude by exp(i k f(x))."""
    vals = _entry_values(state, table)
    if not np.all(np.isfinite(vals)):
        raise DomainError("objective values must be finite")
    out = state.copy()
    out.amplitudes *= phase_vector(vals, k)
    return out


def mean_amplitude(state: QuantumState) -> complex:
    if state.amplitudes.size == 0:
        raise DimensionError("empty state")
    return complex(_kernels.weighted_block_sum(state.amplitudes, state.weights())) / state.n_states


def apply_diffusion(state: QuantumState) -> QuantumState:
    """Inversion about the mean: alpha -> 2 * mean - alpha."""
    m = mean_amplitude(state)
    out = state.copy()
    out.amplitudes = 2.0 * m - out.amplitudes
    return out


def is_amplifying(state: QuantumState, solution_index: int) -> bool:
    """True iff the next diffusion strictly increases |alpha_best|."""
    if not 0 <= solution_index < state.n_states:
        raise DimensionError(f"solution index {solution_index} outside [0, {state.n_states})")
    if state.compressed:
        entry = int(np.searchsorted(np.cumsum(state.multiplicities), solution_index, side="right"))
        best = state.amplitudes[entry]
    else:
        best = state.amplitudes[solution_index]
    m = mean_amplitude(state)
    return abs(2.0 * m - best) > abs(best)


def expand(state: QuantumState) -> QuantumState:
    if not state.compressed:
        raise DimensionError("state is already dense")
    if int(state.multiplicities.sum()) != state.n_states:
        raise DimensionError("multiplicities overflow the state size")
    return QuantumState(state.n_states, np.repeat(state.amplitudes, state.multiplicities))


def compress(state: QuantumState, table: ObjectiveTable) -> QuantumState:
    """Group a dense state by objective value; equal-valued amplitudes must coincide."""
    if state.compressed:
        return state.copy()
    if state.n_states != table.n_states:
        raise DimensionError(f"state has {state.n_states} basis states, table has {table.n_states}")
    vals, counts = table.unique()
    starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
    amps = state.amplitudes[starts]
    if np.any(np.repeat(amps, counts) != state.amplitudes):
        raise DomainError("amplitudes differ within a group of equal objective values")
    return QuantumState(state.n_states, amps.copy(), vals, counts)


def write_snapshot(path, state: QuantumState, table: ObjectiveTable, header: str | None = None) -> None:
    """Write a complex-plane snapshot: one row per basis index, or per distinct value if compressed."""
    path = Path(path)
    with path.open("w") as fh:
        if header:
            for line in header.splitlines():
                fh.write(f"# {line}\n")
        if state.compressed:
            fh.write("x,f,amp_re,amp_im,multiplicity\n")
            first = np.concatenate([[0], np.cumsum(state.multiplicities)[:-1]])
            for x, f, a, m in zip(first, state.values, state.amplitudes, state.multiplicities):
                fh.write(f"{x},{f:.17g},{a.real:.17g},{a.imag:.17g},{m}\n")
        else:
            fh.write("x,f,amp_re,amp_im\n")
            for x, (f, a) in enumerate(zip(table.values, state.amplitudes)):
                fh.write(f"{x},{f:.17g},{a.real:.17g},{a.imag:.17g}\n")


def read_snapshot(path) -> dict:
    """Parse a snapshot file back into arrays (comment lines skipped)."""
    rows = [ln for ln in Path(path).read_text().splitlines() if ln and not ln.startswith("#")]
    header = rows[0].split(",")
    data = np.array([[float(c) for c in r.split(",")] for r in rows[1:]])
    cols = {name: data[:, i] for i, name in enumerate(header)}
    cols["amplitude"] = cols["amp_re"] + 1j * cols["amp_im"]
    return cols
