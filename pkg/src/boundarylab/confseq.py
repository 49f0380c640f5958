"""Time-uniform confidence sequence for a Bernoulli proportion.

The interval at time n is the superlevel set {p : R_n(p) < 1/alpha} of a
Beta-mixture likelihood-ratio process

    R_n(p) = Beta(a + s, b + f) / (Beta(a, b) * p^s * (1-p)^f),

with f = n - s failures.  R_n(p) is a nonnegative martingale with unit
mean under p, so by Ville's inequality the sequence of intervals covers
the true p at every time simultaneously with probability at least
1 - alpha, and remains valid under any data-dependent stopping time.
Successive intervals are intersected, which only tightens them.

The practical-zero / practical-one stopping times declare a boundary
statement once the running interval is inside [0, eps] or [1-eps, 1].
"""

import enum
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import gammaln

from .bernoulli import JEFFREYS, BernoulliCounts, BetaPosterior
from .errors import BoundaryEvaluationError

__all__ = [
    "DecisionKind", "BoundaryDecision", "ConfSeqState", "fresh",
    "mixture_ratio", "log_mixture_ratio_counts", "interval", "update",
    "check_stop",
]

_BISECT_TOL = 1e-10


class DecisionKind(enum.Enum):
    CONTINUE = "continue"
    PRACTICAL_ZERO = "practical_zero"
    PRACTICAL_ONE = "practical_one"


@dataclass(frozen=True)
class BoundaryDecision:
    kind: DecisionKind
    at_n: int


@dataclass(frozen=True)
class ConfSeqState:
    """Running counts plus the running-intersection interval."""

    prior: BetaPosterior
    counts: BernoulliCounts
    alpha: float
    lo: float
    hi: float

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must be in (0, 1), got {self.alpha}")
        if not 0.0 <= self.lo <= self.hi <= 1.0:
            raise ValueError(f"invalid interval [{self.lo}, {self.hi}]")


def fresh(alpha: float = 0.05, prior: BetaPosterior = JEFFREYS) -> ConfSeqState:
    """State before any observation; the interval is the whole of [0, 1]."""
    return ConfSeqState(prior=prior, counts=BernoulliCounts(0, 0),
                        alpha=alpha, lo=0.0, hi=1.0)


def _log_ratio(n: int, s: int, p: float, prior: BetaPosterior) -> float:
    """log R_n(p); +inf at a boundary p whose count is nonzero."""
    f = n - s
    a, b = prior.a, prior.b
    val = (math.lgamma(a + s) + math.lgamma(b + f) - math.lgamma(a + b + n)
           - math.lgamma(a) - math.lgamma(b) + math.lgamma(a + b))
    if s > 0:
        if p <= 0.0:
            return math.inf
        val -= s * math.log(p)
    if f > 0:
        if p >= 1.0:
            return math.inf
        val -= f * math.log1p(-p)
    return val


def log_mixture_ratio_counts(n, s, p, prior: BetaPosterior = JEFFREYS):
    """Vectorized log R_n(p) over arrays of counts, for 0 < p < 1."""
    n = np.asarray(n, dtype=np.float64)
    s = np.asarray(s, dtype=np.float64)
    if not 0.0 < p < 1.0:
        raise BoundaryEvaluationError(f"p must be in (0, 1), got {p}")
    f = n - s
    a, b = prior.a, prior.b
    const = math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)
    return (gammaln(a + s) + gammaln(b + f) - gammaln(a + b + n) - const
            - s * math.log(p) - f * math.log1p(-p))


def mixture_ratio(state: ConfSeqState, p: float) -> float:
    """R_n(p) for interior p; degenerate at p in {0, 1}."""
    if not 0.0 < p < 1.0:
        raise BoundaryEvaluationError(
            f"mixture ratio degenerates at p={p}; need 0 < p < 1")
    return math.exp(_log_ratio(state.counts.n, state.counts.s, p, state.prior))


def _bisect(f, lo: float, hi: float, increasing: bool) -> float:
    """Root of the sign change of monotone f on [lo, hi]."""
    for _ in range(200):
        if hi - lo <= _BISECT_TOL:
            break
        mid = 0.5 * (lo + hi)
        val = f(mid)
        if (val < 0.0) == increasing:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _raw_interval(n: int, s: int, alpha: float,
                  prior: BetaPosterior) -> tuple[float, float]:
    """Superlevel set {p : R_n(p) < 1/alpha} as an interval.

    log R_n is decreasing left of the MLE s/n and increasing right of it,
    and its minimum is at most 0, so the set is a nonempty interval whose
    endpoints can be located by bisection outward from s/n.
    """
    if n == 0:
        return 0.0, 1.0
    target = -math.log(alpha)

    def excess(p):
        return _log_ratio(n, s, p, prior) - target

    phat = s / n
    if s == 0:
        lo = 0.0
    else:
        lo = _bisect(excess, 0.0, phat, increasing=False)
    if s == n:
        hi = 1.0
    else:
        hi = _bisect(excess, phat, 1.0, increasing=True)
    return max(0.0, lo), min(1.0, hi)


def update(state: ConfSeqState, y: int) -> ConfSeqState:
    """Advance the state by one binary outcome."""
    if y not in (0, 1):
        raise ValueError(f"outcome must be 0 or 1, got {y!r}")
    counts = BernoulliCounts(state.counts.n + 1, state.counts.s + int(y))
    raw_lo, raw_hi = _raw_interval(counts.n, counts.s, state.alpha, state.prior)
    lo = max(state.lo, raw_lo)
    hi = min(state.hi, raw_hi)
    if lo > hi:
        # running intersection emptied (a coverage failure, probability
        # at most alpha); collapse to the midpoint of the gap
        lo = hi = 0.5 * (lo + hi)
    return replace(state, counts=counts, lo=lo, hi=hi)


def interval(state: ConfSeqState) -> tuple[float, float]:
    """Running-intersection confidence interval after n observations."""
    return state.lo, state.hi


def check_stop(state: ConfSeqState, epsilon: float) -> BoundaryDecision:
    """Declare practical zero/one once the interval is inside the zone."""
    if not 0.0 < epsilon < 0.5:
        raise ValueError(f"epsilon must be in (0, 1/2), got {epsilon}")
    n = state.counts.n
    if state.hi <= epsilon:
        return BoundaryDecision(DecisionKind.PRACTICAL_ZERO, n)
    if state.lo >= 1.0 - epsilon:
        return BoundaryDecision(DecisionKind.PRACTICAL_ONE, n)
    return BoundaryDecision(DecisionKind.CONTINUE, n)
