"""Predictive scoring metrics used by the study runners."""

import numpy as np

__all__ = ["log_loss", "brier", "calib_error", "PROB_CLIP"]

PROB_CLIP = 1e-12


def _check(y, p):
    y = np.asarray(y, dtype=np.float64)
    p = np.asarray(p, dtype=np.float64)
    if y.shape != p.shape or y.ndim != 1:
        raise ValueError(f"shape mismatch: y {y.shape} vs p {p.shape}")
    return y, p


def log_loss(y, p) -> float:
    """Mean negative Bernoulli log-likelihood with probabilities clipped
    to [1e-12, 1 - 1e-12] before taking logs."""
    y, p = _check(y, p)
    p = np.clip(p, PROB_CLIP, 1.0 - PROB_CLIP)
    return float(-np.mean(y * np.log(p) + (1.0 - y) * np.log1p(-p)))


def brier(y, p) -> float:
    """Mean squared error of the probability forecasts."""
    y, p = _check(y, p)
    return float(np.mean((p - y) ** 2))


def calib_error(y, p, bins: int = 10) -> float:
    """Mean absolute (predicted - empirical) gap over nonempty
    predicted-probability decile bins."""
    y, p = _check(y, p)
    edges = np.unique(np.quantile(p, np.linspace(0.0, 1.0, bins + 1)))
    if edges.size < 2:
        return float(abs(p.mean() - y.mean()))
    idx = np.clip(np.searchsorted(edges, p, side="right") - 1,
                  0, edges.size - 2)
    gaps = []
    for k in range(edges.size - 1):
        mask = idx == k
        if mask.any():
            gaps.append(abs(p[mask].mean() - y[mask].mean()))
    return float(np.mean(gaps))
