"""Compiled inner loops.

All reductions go through fixed 4096-element blocks: each block is summed
sequentially, then block partials are combined by a pairwise tree. The
partition does not depend on the thread count, so results are bit-stable
under any ``numba.set_num_threads`` setting.
"""

import numpy as np
from numba import config, njit, prange

# skip the TBB probe (it warns on older TBB builds); layers are equivalent here
config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

BLOCK = 4096


@njit(cache=True)
def pairwise(parts):
    # parts must be nonempty
    n = parts.shape[0]
    buf = parts.copy()
    while n > 1:
        half = n // 2
        for i in range(half):
            buf[i] = buf[2 * i] + buf[2 * i + 1]
        if n % 2:
            buf[half] = buf[n - 1]
            n = half + 1
        else:
            n = half
    return buf[0]


@njit(parallel=True, cache=True)
def block_sum(a):
    n = a.shape[0]
    nb = (n + BLOCK - 1) // BLOCK
    parts = np.zeros(nb, dtype=np.complex128)
    for b in prange(nb):
        s = 0j
        for i in range(b * BLOCK, min(n, (b + 1) * BLOCK)):
            s += a[i]
        parts[b] = s
    return pairwise(parts)


@njit(parallel=True, cache=True)
def weighted_block_sum(a, w):
    n = a.shape[0]
    nb = (n + BLOCK - 1) // BLOCK
    parts = np.zeros(nb, dtype=np.complex128)
    for b in prange(nb):
        s = 0j
        for i in range(b * BLOCK, min(n, (b + 1) * BLOCK)):
            s += w[i] * a[i]
        parts[b] = s
    return pairwise(parts)


@njit(parallel=True, cache=True)
def weighted_norm_sq(a, w):
    n = a.shape[0]
    nb = (n + BLOCK - 1) // BLOCK
    parts = np.zeros(nb, dtype=np.float64)
    for b in prange(nb):
        s = 0.0
        for i in range(b * BLOCK, min(n, (b + 1) * BLOCK)):
            v = a[i]
            s += w[i] * (v.real * v.real + v.imag * v.imag)
        parts[b] = s
    return pairwise(parts)


@njit(parallel=True, cache=True)
def fused_step(amp, phase, mult, twice, pending):
    """Finish a pending diffusion (alpha -> twice - alpha), then apply the oracle, in one pass.

    Returns the weighted sum of the post-oracle amplitudes and the weighted
    squared norm of the state between the two operations.
    """
    n = amp.shape[0]
    nb = (n + BLOCK - 1) // BLOCK
    parts = np.zeros(nb, dtype=np.complex128)
    nparts = np.zeros(nb, dtype=np.float64)
    for b in prange(nb):
        s = 0j
        q = 0.0
        for i in range(b * BLOCK, min(n, (b + 1) * BLOCK)):
            v = twice - amp[i] if pending else amp[i]
            q += mult[i] * (v.real * v.real + v.imag * v.imag)
            v = v * phase[i]
            amp[i] = v
            s += mult[i] * v
        parts[b] = s
        nparts[b] = q
    return pairwise(parts), pairwise(nparts)


@njit(parallel=True, cache=True)
def fused_step_dense(amp, phase, twice, pending):
    """``fused_step`` specialised to unit multiplicities."""
    n = amp.shape[0]
    nb = (n + BLOCK - 1) // BLOCK
    parts = np.zeros(nb, dtype=np.complex128)
    nparts = np.zeros(nb, dtype=np.float64)
    for b in prange(nb):
        s = 0j
        q = 0.0
        for i in range(b * BLOCK, min(n, (b + 1) * BLOCK)):
            v = twice - amp[i] if pending else amp[i]
            q += v.real * v.real + v.imag * v.imag
            v = v * phase[i]
            amp[i] = v
            s += v
        parts[b] = s
        nparts[b] = q
    return pairwise(parts), pairwise(nparts)


@njit(parallel=True, cache=True)
def reflect(amp, mult, twice):
    """alpha -> twice - alpha in place; returns the weighted squared norm afterwards."""
    n = amp.shape[0]
    nb = (n + BLOCK - 1) // BLOCK
    nparts = np.zeros(nb, dtype=np.float64)
    for b in prange(nb):
        q = 0.0
        for i in range(b * BLOCK, min(n, (b + 1) * BLOCK)):
            v = twice - amp[i]
            amp[i] = v
            q += mult[i] * (v.real * v.real + v.imag * v.imag)
        nparts[b] = q
    return pairwise(nparts)


@njit(cache=True)
def greedy_scores(amp, phases, mult, n_states, sol):
    """Solution probability after one (oracle, diffusion) pair for each row of ``phases``."""
    g = phases.shape[0]
    n = amp.shape[0]
    out = np.empty(g)
    for r in range(g):
        s = 0j
        for i in range(n):
            s += mult[i] * (phases[r, i] * amp[i])
        twice = 2.0 * s / n_states
        p = 0.0
        for q in range(sol.shape[0]):
            j = sol[q]
            v = twice - phases[r, j] * amp[j]
            p += mult[j] * (v.real * v.real + v.imag * v.imag)
        out[r] = p
    return out


# Surrogate loops used by the k locator. Small arrays, serial.


@njit(cache=True)
def surrogate_peak(vals, mult, k, iterations, n_states, sol):
    m = vals.shape[0]
    amp = np.full(m, 1.0 / np.sqrt(n_states) + 0j)
    z = np.exp(1j * k * vals)
    best = mult[sol] * abs(amp[sol]) ** 2
    best_j = 0
    for j in range(iterations):
        s = 0j
        for i in range(m):
            amp[i] *= z[i]
            s += mult[i] * amp[i]
        twice = 2.0 * s / n_states
        for i in range(m):
            amp[i] = twice - amp[i]
        v = amp[sol]
        p = mult[sol] * (v.real * v.real + v.imag * v.imag)
        if p > best:
            best = p
            best_j = j + 1
    return best, best_j


@njit(cache=True)
def mean_trajectory(vals, mult, k, iterations, n_states):
    m = vals.shape[0]
    amp = np.full(m, 1.0 / np.sqrt(n_states) + 0j)
    z = np.exp(1j * k * vals)
    means = np.empty(iterations, dtype=np.complex128)
    for j in range(iterations):
        s = 0j
        for i in range(m):
            amp[i] *= z[i]
            s += mult[i] * amp[i]
        mean = s / n_states
        means[j] = mean
        for i in range(m):
            amp[i] = 2.0 * mean - amp[i]
    return means


@njit(cache=True)
def driven_response(means, value, ks, n_states):
    """Peak |a|^2 of a single amplitude driven by a fixed mean sequence, per k."""
    out = np.empty(ks.shape[0])
    for q in range(ks.shape[0]):
        z = np.exp(1j * ks[q] * value)
        a = 1.0 / np.sqrt(n_states) + 0j
        best = 0.0
        for j in range(means.shape[0]):
            a = 2.0 * means[j] - z * a
            p = a.real * a.real + a.imag * a.imag
            if p > best:
                best = p
        out[q] = best
    return out
