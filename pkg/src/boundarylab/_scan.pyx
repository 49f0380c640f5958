# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled scan kernels for the Monte Carlo hot loops.

Semantics are pinned so that the pure-Python fallback in ``_scan_py``
produces bit-identical results: all floating accumulation is sequential
left-to-right, window sums add terms in increasing offset order, and all
threshold comparisons are closed (<= / >=).
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, sqrt

cnp.import_array()

BACKEND = "cython"


def failure_run_stop(const cnp.uint8_t[:, ::1] y, Py_ssize_t run_len):
    """First 1-based trial index at which ``run_len`` consecutive zeros
    complete, counting runs that restart after every one; 0 if no run
    completes within the row."""
    cdef Py_ssize_t n_rows = y.shape[0]
    cdef Py_ssize_t n_cols = y.shape[1]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out = np.zeros(n_rows, dtype=np.int64)
    cdef Py_ssize_t r, j, run
    if run_len <= 0:
        raise ValueError("run_len must be positive")
    for r in range(n_rows):
        run = 0
        for j in range(n_cols):
            if y[r, j] == 0:
                run += 1
                if run >= run_len:
                    out[r] = j + 1
                    break
            else:
                run = 0
    return out


def cross_times(const double[:, ::1] inc, const double[::1] start,
                double lower, double upper):
    """Scan cumulative paths for the first boundary crossing.

    Row r follows ``start[r] + inc[r, 0] + ... + inc[r, j]``.  Returns
    ``(value, steps, decision)`` where decision is +1 on an upper
    crossing (>= upper), -1 on a lower crossing (<= lower) and 0 when
    the row is exhausted; ``value`` is the running sum at the crossing
    (or at the end), ``steps`` the number of increments consumed.
    """
    cdef Py_ssize_t n_rows = inc.shape[0]
    cdef Py_ssize_t n_cols = inc.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] value = np.empty(n_rows)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] steps = np.empty(n_rows, dtype=np.int64)
    cdef cnp.ndarray[cnp.int8_t, ndim=1] decision = np.zeros(n_rows, dtype=np.int8)
    cdef Py_ssize_t r, j
    cdef double running
    for r in range(n_rows):
        running = start[r]
        steps[r] = n_cols
        for j in range(n_cols):
            running += inc[r, j]
            if running >= upper:
                decision[r] = 1
                steps[r] = j + 1
                break
            if running <= lower:
                decision[r] = -1
                steps[r] = j + 1
                break
        value[r] = running
    return value, steps, decision


def stop_times(const double[:, ::1] m, double eps, double eta,
               double w_scale, double w, Py_ssize_t n_min, Py_ssize_t h,
               bint with_stability):
    """First 1-based index t >= n_min where the stopping conditions hold.

    Boundary-only mode checks min(m, 1-m) <= eps.  With stability, the
    index must additionally satisfy w_scale/sqrt(t) <= w and the
    h-step future-average defect |m_t - mean(m_{t+1..t+h})| <= eta; the
    defect is undefined (never satisfied) once t + h exceeds the row
    length.  Returns 0 for rows that never stop.
    """
    cdef Py_ssize_t n_rows = m.shape[0]
    cdef Py_ssize_t n_cols = m.shape[1]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out = np.zeros(n_rows, dtype=np.int64)
    cdef Py_ssize_t r, i, k
    cdef double bd, alt, s
    if n_min < 1 or h < 1:
        raise ValueError("n_min and h must be positive")
    for r in range(n_rows):
        for i in range(n_cols):
            if i + 1 < n_min:
                continue
            bd = m[r, i]
            alt = 1.0 - m[r, i]
            if alt < bd:
                bd = alt
            if bd > eps:
                continue
            if with_stability:
                if w_scale / sqrt(<double>(i + 1)) > w:
                    continue
                if i + h >= n_cols:
                    continue
                s = 0.0
                for k in range(1, h + 1):
                    s += m[r, i + k]
                if fabs(m[r, i] - s / <double>h) > eta:
                    continue
            out[r] = i + 1
            break
    return out
