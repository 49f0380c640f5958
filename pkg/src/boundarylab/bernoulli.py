"""Closed-form boundary rules and Beta smoothing for iid Bernoulli trials.

A run of failures can justify the practical statement ``p < epsilon`` at
error level alpha, but never the exact statement ``p = 0``.  This module
implements the exact run-length rule, its dual Clopper-Pearson bound, the
one-sided binomial p-value, conjugate Beta smoothing, and the shrinking
posterior-mean path of a window that keeps showing only failures.
"""

import math
from dataclasses import dataclass

from .errors import ConfigError, UndefinedEstimateError

__all__ = [
    "BoundaryRuleConfig", "BernoulliCounts", "BetaPosterior",
    "all_failure_threshold", "prob_all_failures", "exact_stop_prob_tau0",
    "mle", "posterior_update", "rm_window_path",
    "clopper_pearson_upper_zero", "binomial_onesided_pvalue",
]


@dataclass(frozen=True)
class BoundaryRuleConfig:
    """Tolerance and error level of a practical boundary rule."""

    epsilon: float
    alpha: float

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ConfigError(f"epsilon must be in (0, 1), got {self.epsilon}")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError(f"alpha must be in (0, 1), got {self.alpha}")


@dataclass(frozen=True)
class BernoulliCounts:
    """Trial and success counts."""

    n: int
    s: int

    def __post_init__(self):
        if self.n < 0 or self.s < 0 or self.s > self.n:
            raise ConfigError(f"need 0 <= s <= n, got n={self.n}, s={self.s}")

    @property
    def failures(self) -> int:
        return self.n - self.s


@dataclass(frozen=True)
class BetaPosterior:
    """Beta(a, b) conjugate state for a Bernoulli probability."""

    a: float
    b: float

    def __post_init__(self):
        if not (self.a > 0.0 and self.b > 0.0):
            raise ConfigError(f"shapes must be positive, got a={self.a}, b={self.b}")

    @property
    def mean(self) -> float:
        return self.a / (self.a + self.b)


#: Jeffreys prior, the default smoothing choice throughout the package.
JEFFREYS = BetaPosterior(0.5, 0.5)


def all_failure_threshold(cfg: BoundaryRuleConfig) -> int:
    """Smallest n with (1-epsilon)^n <= alpha, i.e. ceil(log a / log(1-e)).

    Observing that many consecutive failures bounds the type-I error of
    declaring ``p < epsilon`` by alpha whenever the true p is >= epsilon.
    """
    log_q = math.log1p(-cfg.epsilon)
    log_a = math.log(cfg.alpha)
    n = max(1, math.ceil(log_a / log_q))
    # guard float error in the ratio: enforce minimality in log space
    while n > 1 and (n - 1) * log_q <= log_a:
        n -= 1
    while n * log_q > log_a:
        n += 1
    return n


def prob_all_failures(p: float, n: int) -> float:
    """(1-p)^n, accumulated in log space."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return 1.0
    if p == 1.0:
        return 0.0
    return math.exp(n * math.log1p(-p))


def exact_stop_prob_tau0(p: float, cfg: BoundaryRuleConfig, n_max: int) -> float:
    """Exact P(tau_0 <= n_max) for the run counted from trial 1.

    This is (1-p)^{n_eps} when the threshold is reachable and 0 otherwise.
    The probability that *any* restarted run of n_eps failures occurs is
    larger; the harness exposes that quantity by simulation only.
    """
    n_eps = all_failure_threshold(cfg)
    if n_max < n_eps:
        return 0.0
    return prob_all_failures(p, n_eps)


def mle(counts: BernoulliCounts) -> float:
    """Ordinary maximum-likelihood estimate s/n."""
    if counts.n == 0:
        raise UndefinedEstimateError("MLE undefined with zero trials")
    return counts.s / counts.n


def posterior_update(prior: BetaPosterior, counts: BernoulliCounts) -> BetaPosterior:
    """Conjugate update: Beta(a, b) -> Beta(a + s, b + n - s)."""
    return BetaPosterior(prior.a + counts.s, prior.b + counts.failures)


def rm_window_path(prior: BetaPosterior, k_max: int) -> list[float]:
    """Posterior means a/(a+b+k) after k = 0..k_max windowed failures.

    This is the reverse-martingale trajectory of a look-ahead window that
    keeps showing only failures; it decreases strictly toward zero but
    never reaches it for finite k.
    """
    if k_max < 0:
        raise ValueError("k_max must be nonnegative")
    return [prior.a / (prior.a + prior.b + k) for k in range(k_max + 1)]


def clopper_pearson_upper_zero(n: int, alpha: float) -> float:
    """Upper Clopper-Pearson bound at zero successes: 1 - alpha^(1/n)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    return -math.expm1(math.log(alpha) / n)


def binomial_onesided_pvalue(counts: BernoulliCounts, epsilon: float) -> float:
    """Exact one-sided p-value of H0: p >= epsilon given s successes in n.

    Computes sum_{k<=s} C(n,k) eps^k (1-eps)^(n-k) with log-space terms,
    so very small tail masses do not underflow term by term.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must be in (0, 1), got {epsilon}")
    n, s = counts.n, counts.s
    if n == 0:
        return 1.0
    log_eps = math.log(epsilon)
    log_q = math.log1p(-epsilon)
    total = 0.0
    for k in range(s + 1):
        log_term = (math.lgamma(n + 1) - math.lgamma(k + 1)
                    - math.lgamma(n - k + 1) + k * log_eps + (n - k) * log_q)
        total += math.exp(log_term)
    return min(total, 1.0)
