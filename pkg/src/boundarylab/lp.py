"""Small dense simplex solver with Bland's rule.

Solves  max c.x  subject to  A x <= b, x >= 0  with b >= 0, which is all
the separation detector needs; the nonnegative right-hand side makes the
slack basis feasible, so no phase-one is required.  Bland's entering and
leaving rules guarantee termination.
"""

import numpy as np

from .errors import BoundaryLabError

__all__ = ["simplex_maximize", "SimplexError"]


class SimplexError(BoundaryLabError, RuntimeError):
    pass


def simplex_maximize(c, A, b, tol: float = 1e-9, max_pivots: int = 50_000):
    """Return ``(x, value)`` maximizing c.x over {A x <= b, x >= 0}.

    Raises SimplexError on an unbounded problem or pivot-limit overrun.
    """
    c = np.asarray(c, dtype=np.float64)
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    m, n = A.shape
    if b.shape != (m,) or c.shape != (n,):
        raise ValueError("inconsistent LP dimensions")
    if (b < 0).any():
        raise ValueError("this solver requires b >= 0")

    # tableau: [A | I | b] over constraint rows, reduced costs underneath
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = b
    T[m, :n] = -c
    basis = list(range(n, n + m))

    for _ in range(max_pivots):
        reduced = T[m, :n + m]
        candidates = np.nonzero(reduced < -tol)[0]
        if candidates.size == 0:
            break
        col = int(candidates[0])  # Bland: smallest variable index
        rates = T[:m, col]
        rows = np.nonzero(rates > tol)[0]
        if rows.size == 0:
            raise SimplexError("LP is unbounded")
        ratios = T[rows, -1] / rates[rows]
        best = ratios.min()
        ties = rows[ratios <= best + tol * (1.0 + abs(best))]
        row = int(min(ties, key=lambda i: basis[i]))  # Bland on leaving var
        # pivot
        T[row] /= T[row, col]
        for i in range(m + 1):
            if i != row and T[i, col] != 0.0:
                T[i] -= T[i, col] * T[row]
        basis[row] = col
    else:
        raise SimplexError(f"no convergence within {max_pivots} pivots")

    x = np.zeros(n + m)
    for i, var in enumerate(basis):
        x[var] = T[i, -1]
    return x[:n], float(T[m, -1])
