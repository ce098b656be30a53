"""Hot training kernels: the cyclic-boosting sweep loop.

Two interchangeable implementations of the same arithmetic:

* ``boost_cycle_numba`` — numba ``@njit`` scalar loops (default when
  numba imports cleanly),
* ``boost_cycle_numpy`` — pure-numpy fallback.

Selection happens once at import from the ``CLUSTERLENS_BACKEND``
environment variable ("numba" or "numpy"); unset picks numba when
available. Both paths recompute residuals at every feature visit (true
cyclic boosting) and accumulate per-bin sums in row order, so they
agree to float64 rounding (~1e-15); ``benchmarks/bench_boost.py``
compares their speed.

Kernel inputs use a flat bin layout: feature j owns the contiguous slice
``offsets[j] : offsets[j] + n_bins[j]`` of the contribution vector, and
``bin_mat[j, i]`` is row i's bin for feature j.
"""

from __future__ import annotations

import os

import numpy as np

ENV_VAR = "CLUSTERLENS_BACKEND"

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False


def boost_cycle_numpy(
    bin_mat, y, n_bins, offsets, active, eta, min_child_weight, sweeps, intercept
):
    """Run the full cyclic-boosting loop; pure numpy.

    Returns (contributions, final_scores): the flat per-bin update totals
    and the per-row scores after the last sweep.
    """
    d, m = bin_mat.shape
    total_bins = int(offsets[-1] + n_bins[-1]) if d else 0
    contrib = np.zeros(total_bins)
    scores = np.full(m, intercept)
    counts = [
        np.bincount(bin_mat[j], minlength=n_bins[j]).astype(np.float64) for j in range(d)
    ]
    movable = [
        (counts[j] >= min_child_weight) & (counts[j] > 0) for j in range(d)
    ]
    safe_counts = [np.maximum(counts[j], 1.0) for j in range(d)]
    for _ in range(sweeps):
        for j in range(d):
            if not active[j]:
                continue
            p = np.empty(m)
            pos = scores >= 0
            p[pos] = 1.0 / (1.0 + np.exp(-scores[pos]))
            es = np.exp(scores[~pos])
            p[~pos] = es / (1.0 + es)
            sums = np.bincount(bin_mat[j], weights=y - p, minlength=n_bins[j])
            delta = np.where(movable[j], eta * sums / safe_counts[j], 0.0)
            scores += delta[bin_mat[j]]
            off = offsets[j]
            contrib[off : off + n_bins[j]] += delta
    return contrib, scores


def _boost_cycle_loops(
    bin_mat, y, n_bins, offsets, active, eta, min_child_weight, sweeps, intercept
):
    # Scalar-loop twin of boost_cycle_numpy; compiled by numba below.
    d, m = bin_mat.shape
    total_bins = 0
    if d > 0:
        total_bins = offsets[d - 1] + n_bins[d - 1]
    contrib = np.zeros(total_bins)
    scores = np.full(m, intercept)
    counts = np.zeros(total_bins)
    for j in range(d):
        off = offsets[j]
        for i in range(m):
            counts[off + bin_mat[j, i]] += 1.0
    delta = np.zeros(total_bins)
    for _ in range(sweeps):
        for j in range(d):
            if not active[j]:
                continue
            off = offsets[j]
            nb = n_bins[j]
            for b in range(nb):
                delta[off + b] = 0.0
            for i in range(m):
                s = scores[i]
                if s >= 0.0:
                    p = 1.0 / (1.0 + np.exp(-s))
                else:
                    es = np.exp(s)
                    p = es / (1.0 + es)
                delta[off + bin_mat[j, i]] += y[i] - p
            for b in range(nb):
                c = counts[off + b]
                if c >= min_child_weight and c > 0.0:
                    delta[off + b] = eta * delta[off + b] / c
                else:
                    delta[off + b] = 0.0
            for i in range(m):
                scores[i] += delta[off + bin_mat[j, i]]
            for b in range(nb):
                contrib[off + b] += delta[off + b]
    return contrib, scores


if HAVE_NUMBA:
    boost_cycle_numba = njit(cache=True)(_boost_cycle_loops)
else:  # pragma: no cover
    boost_cycle_numba = None


def _resolve_backend() -> str:
    choice = os.environ.get(ENV_VAR, "").strip().lower()
    if choice == "numpy":
        return "numpy"
    if choice == "numba":
        if not HAVE_NUMBA:
            raise ImportError(
                f"{ENV_VAR}=numba requested but numba is not importable"
            )
        return "numba"
    if choice:
        raise ValueError(f"unknown {ENV_VAR} value {choice!r}; use 'numba' or 'numpy'")
    return "numba" if HAVE_NUMBA else "numpy"


ACTIVE_BACKEND = _resolve_backend()

boost_cycle = boost_cycle_numba if ACTIVE_BACKEND == "numba" else boost_cycle_numpy


def warm_up():
    """Trigger JIT compilation of the numba kernel on a tiny problem so
    the first real training call is not charged for it. No-op on numpy."""
    if ACTIVE_BACKEND != "numba":
        return
    bin_mat = np.array([[0, 1, 0, 1]], dtype=np.int64)
    y = np.array([1.0, 0.0, 1.0, 0.0])
    boost_cycle(
        bin_mat, y, np.array([3], dtype=np.int64), np.array([0], dtype=np.int64),
        np.array([True]), 0.1, 1.0, 1, 0.0,
    )
