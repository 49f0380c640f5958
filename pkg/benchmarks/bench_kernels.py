#!/usr/bin/env python3
"""Benchmark the compiled scan kernels against the numpy fallback.

Runs each kernel on harness-sized inputs under both backends, checks the
outputs are identical, and prints a timing table:

    python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from boundarylab import _scan_py

try:
    from boundarylab import _scan
except ImportError:
    _scan = None


def _time(fn, *args, repeats=5):
    best = float("inf")
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, result


def _workloads():
    rng = np.random.default_rng(7)
    y = (rng.random((50_000, 1000)) < 0.01).astype(np.uint8)
    yield ("failure_run_stop (50k x 1000, run 299)",
           "failure_run_stop", (y, 299))

    inc = np.where(rng.random((20_000, 2048)) < 0.01,
                   np.log(0.5), np.log(0.995 / 0.99))
    start = np.zeros(20_000)
    yield ("cross_times (20k x 2048 chunk)",
           "cross_times", (inc, start, -2.9444, 2.9444))

    m = np.clip(0.12 - 0.105 * np.exp(-(np.arange(1, 121) - 50.0) ** 2 / 80)
                + 0.006 * rng.standard_normal((15_000, 120)), 1e-5, 1 - 1e-5)
    yield ("stop_times (15k x 120, three-condition)",
           "stop_times", (m, 0.02, 0.0008, 0.10, 0.015, 10, 5, True))


def main():
    if _scan is None:
        print("compiled extension not built; timing the fallback only")
    print(f"{'workload':<45} {'numpy':>10} {'cython':>10} {'speedup':>9}")
    for label, name, args in _workloads():
        t_py, out_py = _time(getattr(_scan_py, name), *args)
        if _scan is None:
            print(f"{label:<45} {t_py * 1e3:>8.1f}ms {'--':>10} {'--':>9}")
            continue
        t_cy, out_cy = _time(getattr(_scan, name), *args)
        for a, b in zip(np.atleast_1d(out_py), np.atleast_1d(out_cy)):
            np.testing.assert_array_equal(a, b)
        print(f"{label:<45} {t_py * 1e3:>8.1f}ms {t_cy * 1e3:>8.1f}ms "
              f"{t_py / t_cy:>8.1f}x")


if __name__ == "__main__":
    main()
