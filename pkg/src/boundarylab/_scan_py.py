"""Pure-numpy fallback for the compiled scan kernels.

Bit-identical to ``_scan``: cumulative sums are sequential (np.cumsum),
window sums accumulate shifted slices in increasing offset order, and
every comparison mirrors the compiled code.
"""

import numpy as np

BACKEND = "python"


def failure_run_stop(y, run_len):
    y = np.ascontiguousarray(y, dtype=np.uint8)
    if run_len <= 0:
        raise ValueError("run_len must be positive")
    n_rows, n_cols = y.shape
    t = np.arange(1, n_cols + 1, dtype=np.int64)
    # length of the zero-run ending at t: t minus position of last one
    last_one = np.maximum.accumulate(np.where(y == 1, t, 0), axis=1)
    hit = (t - last_one) >= run_len
    first = hit.argmax(axis=1)
    out = np.where(hit.any(axis=1), first + 1, 0).astype(np.int64)
    return out


def cross_times(inc, start, lower, upper):
    inc = np.ascontiguousarray(inc, dtype=np.float64)
    start = np.ascontiguousarray(start, dtype=np.float64)
    n_rows, n_cols = inc.shape
    path = np.cumsum(np.hstack([start[:, None], inc]), axis=1)[:, 1:]
    up = path >= upper
    dn = path <= lower
    crossed = up | dn
    any_cross = crossed.any(axis=1)
    first = crossed.argmax(axis=1)
    rows = np.arange(n_rows)
    steps = np.where(any_cross, first + 1, n_cols).astype(np.int64)
    value = path[rows, np.where(any_cross, first, n_cols - 1)]
    decision = np.zeros(n_rows, dtype=np.int8)
    decision[any_cross & up[rows, first]] = 1
    decision[any_cross & ~up[rows, first]] = -1
    return value, steps, decision


def stop_times(m, eps, eta, w_scale, w, n_min, h, with_stability):
    m = np.ascontiguousarray(m, dtype=np.float64)
    if n_min < 1 or h < 1:
        raise ValueError("n_min and h must be positive")
    n_rows, n_cols = m.shape
    t = np.arange(1, n_cols + 1, dtype=np.float64)
    ok = np.minimum(m, 1.0 - m) <= eps
    ok &= np.arange(1, n_cols + 1) >= n_min
    if with_stability:
        ok &= (w_scale / np.sqrt(t)) <= w
        defect_ok = np.zeros((n_rows, n_cols), dtype=bool)
        if n_cols > h:
            width = n_cols - h
            s = np.zeros((n_rows, width))
            for k in range(1, h + 1):
                s += m[:, k:width + k]
            defect_ok[:, :width] = np.abs(m[:, :width] - s / float(h)) <= eta
        ok &= defect_ok
    any_stop = ok.any(axis=1)
    first = ok.argmax(axis=1)
    return np.where(any_stop, first + 1, 0).astype(np.int64)
