"""Benchmark the cyclic-boosting kernel: numba JIT vs pure numpy.

Runs the same flat-layout problem through both implementations and
reports wall-clock medians. The numba path is compiled once before
timing so JIT cost is excluded.

    python3 benchmarks/bench_boost.py [--rows 20000] [--features 10]
        [--sweeps 200] [--repeats 5]
"""

import argparse
import statistics
import time

import numpy as np

from clusterlens.kernels import HAVE_NUMBA, boost_cycle_numpy

try:
    from clusterlens.kernels import boost_cycle_numba
except ImportError:  # pragma: no cover
    boost_cycle_numba = None


def make_problem(rows: int, features: int, max_bins: int, seed: int):
    rng = np.random.default_rng(seed)
    n_bins = np.full(features, max_bins + 2, dtype=np.int64)
    offsets = np.concatenate([[0], np.cumsum(n_bins)[:-1]]).astype(np.int64)
    bin_mat = rng.integers(0, max_bins, size=(features, rows)).astype(np.int64)
    active = np.ones(features, dtype=bool)
    y = rng.integers(0, 2, size=rows).astype(np.float64)
    return bin_mat, y, n_bins, offsets, active


def time_kernel(fn, args, repeats: int):
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        samples.append(time.perf_counter() - t0)
    return samples


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--rows", type=int, default=20000)
    parser.add_argument("--features", type=int, default=10)
    parser.add_argument("--max-bins", type=int, default=32)
    parser.add_argument("--sweeps", type=int, default=200)
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    opts = parser.parse_args()

    bin_mat, y, n_bins, offsets, active = make_problem(
        opts.rows, opts.features, opts.max_bins, opts.seed
    )
    args = (bin_mat, y, n_bins, offsets, active, 0.05, 1.0, opts.sweeps, 0.0)

    print(
        f"problem: rows={opts.rows} features={opts.features} "
        f"bins={opts.max_bins}+2 sweeps={opts.sweeps} repeats={opts.repeats}"
    )

    c_np, s_np = boost_cycle_numpy(*args)
    np_times = time_kernel(boost_cycle_numpy, args, opts.repeats)
    print(
        f"numpy : median {statistics.median(np_times):8.3f}s"
        f"  (min {min(np_times):.3f}s, max {max(np_times):.3f}s)"
    )

    if not HAVE_NUMBA or boost_cycle_numba is None:
        print("numba : unavailable (install numba to compare)")
        return 0

    boost_cycle_numba(*args)  # JIT warm-up, untimed
    nb_times = time_kernel(boost_cycle_numba, args, opts.repeats)
    print(
        f"numba : median {statistics.median(nb_times):8.3f}s"
        f"  (min {min(nb_times):.3f}s, max {max(nb_times):.3f}s)"
    )

    c_nb, s_nb = boost_cycle_numba(*args)
    worst_c = float(np.max(np.abs(c_np - c_nb)))
    worst_s = float(np.max(np.abs(s_np - s_nb)))
    agree = worst_c <= 1e-12 and worst_s <= 1e-12
    print(
        f"agreement: max |contrib diff| = {worst_c:.2e}, "
        f"max |score diff| = {worst_s:.2e} -> {'OK' if agree else 'MISMATCH'}"
    )
    speedup = statistics.median(np_times) / statistics.median(nb_times)
    print(f"speedup: numba is {speedup:.1f}x the numpy backend")
    return 0 if agree else 1


if __name__ == "__main__":
    raise SystemExit(main())
