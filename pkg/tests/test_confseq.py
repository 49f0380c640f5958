"""Confidence-sequence tests: frozen bisection-oracle endpoints, live
mpmath cross-checks of the mixture ratio, and the time-uniform coverage
and stopping-validity Monte Carlo properties."""

import math

import mpmath as mp
import numpy as np
import pytest

from boundarylab import confseq
from boundarylab.bernoulli import JEFFREYS, BetaPosterior
from boundarylab.confseq import DecisionKind
from boundarylab.errors import BoundaryEvaluationError
from boundarylab.rng import stream

ALPHA = 0.05


def _mp_log_ratio(n, s, p, a="0.5", b="0.5"):
    a, b, p = mp.mpf(a), mp.mpf(b), mp.mpf(p)
    f = n - s
    val = mp.log(mp.beta(a + s, b + f)) - mp.log(mp.beta(a, b))
    if s:
        val -= s * mp.log(p)
    if f:
        val -= f * mp.log(1 - p)
    return val


def _run_failures(k, alpha=ALPHA):
    state = confseq.fresh(alpha=alpha)
    for _ in range(k):
        state = confseq.update(state, 0)
    return state


def test_fresh_interval_is_vacuous():
    state = confseq.fresh()
    assert confseq.interval(state) == (0.0, 1.0)
    assert confseq.mixture_ratio(state, 0.37) == pytest.approx(1.0, rel=1e-12)


def test_mixture_ratio_known_values():
    one_success = confseq.update(confseq.fresh(), 1)
    # Beta(1.5, 0.5) / (Beta(0.5, 0.5) * 0.5) = (pi/2) / (pi/2) = 1
    assert confseq.mixture_ratio(one_success, 0.5) == pytest.approx(1.0, rel=1e-12)
    twenty_failures = _run_failures(20)
    ratio = confseq.mixture_ratio(twenty_failures, 0.5)
    assert ratio > 20.0
    oracle = float(mp.e ** _mp_log_ratio(20, 0, "0.5"))
    assert ratio == pytest.approx(oracle, rel=1e-10)


def test_mixture_ratio_matches_mpmath_on_grid():
    for n, s, p in [(7, 3, 0.4), (50, 1, 0.01), (598, 0, 0.005), (12, 12, 0.9)]:
        state = confseq.ConfSeqState(
            prior=JEFFREYS, alpha=ALPHA, lo=0.0, hi=1.0,
            counts=confseq.BernoulliCounts(n, s))
        oracle = float(mp.e ** _mp_log_ratio(n, s, repr(p)))
        assert confseq.mixture_ratio(state, p) == pytest.approx(oracle, rel=1e-9)


def test_mixture_ratio_boundary_p_rejected():
    state = _run_failures(3)
    for p in (0.0, 1.0):
        with pytest.raises(BoundaryEvaluationError):
            confseq.mixture_ratio(state, p)


def test_upper_endpoint_after_failures():
    # frozen mpmath bisection oracle on log R_n(p) = log(1/alpha)
    state = _run_failures(100)
    lo, hi = confseq.interval(state)
    assert lo == 0.0
    assert hi == pytest.approx(0.05702859764, abs=1e-6)
    state = _run_failures(598)
    assert confseq.interval(state)[1] == pytest.approx(0.01124912898, abs=1e-6)
    assert confseq.interval(state)[1] < 0.012


def test_permutation_invariance_of_raw_interval():
    # the per-n interval depends on the data only through (n, s); the
    # running intersection additionally remembers the path, so the
    # invariance statement applies to the raw interval
    outcomes = [1, 0, 0, 1, 0, 0, 0, 1, 0, 0]
    n, s = len(outcomes), sum(outcomes)
    fwd = confseq._raw_interval(n, s, ALPHA, JEFFREYS)
    rev = confseq._raw_interval(n, sum(reversed(outcomes)), ALPHA, JEFFREYS)
    assert fwd == rev
    fwd_state = confseq.fresh()
    rev_state = confseq.fresh()
    for y in outcomes:
        fwd_state = confseq.update(fwd_state, y)
    for y in reversed(outcomes):
        rev_state = confseq.update(rev_state, y)
    assert fwd_state.counts == rev_state.counts


def test_nesting_running_intersection():
    rng = stream(11, 9, 0, 0)
    state = confseq.fresh()
    prev = (0.0, 1.0)
    for y in (rng.random(300) < 0.3).astype(int):
        state = confseq.update(state, int(y))
        lo, hi = confseq.interval(state)
        assert prev[0] <= lo and hi <= prev[1]
        prev = (lo, hi)


def test_upper_endpoint_monotone_under_failures():
    hi200 = confseq.interval(_run_failures(200))[1]
    hi400 = confseq.interval(_run_failures(400))[1]
    assert hi200 >= hi400


def test_interval_endpoints_solve_threshold_equation():
    # dual route: endpoints located by bisection must sit on the
    # R_n(p) = 1/alpha level set (where interior)
    target = math.log(1.0 / ALPHA)
    rng = stream(12, 9, 1, 0)
    state = confseq.fresh()
    for y in (rng.random(120) < 0.4).astype(int):
        state = confseq.update(state, int(y))
    n, s = state.counts.n, state.counts.s
    lo, hi = confseq._raw_interval(n, s, ALPHA, JEFFREYS)
    for endpoint in (lo, hi):
        assert 0.0 < endpoint < 1.0
        assert confseq._log_ratio(n, s, endpoint, JEFFREYS) == pytest.approx(
            target, abs=1e-6)


def test_check_stop_decisions():
    state = _run_failures(598)
    assert confseq.check_stop(state, 0.012).kind is DecisionKind.PRACTICAL_ZERO
    assert confseq.check_stop(state, 0.005).kind is DecisionKind.CONTINUE
    successes = confseq.fresh()
    for _ in range(598):
        successes = confseq.update(successes, 1)
    assert confseq.check_stop(successes, 0.012).kind is DecisionKind.PRACTICAL_ONE
    assert confseq.check_stop(confseq.fresh(), 0.01).kind is DecisionKind.CONTINUE
    with pytest.raises(ValueError):
        confseq.check_stop(state, 0.5)


def _ever_reject(p, horizon, n_seqs, seed_tag):
    """Fraction of Bernoulli(p) sequences whose mixture process ever
    reaches 1/alpha within the horizon (coverage failure event)."""
    out = np.zeros(n_seqs, dtype=bool)
    threshold = math.log(1.0 / ALPHA)
    block = 500
    done = 0
    while done < n_seqs:
        size = min(block, n_seqs - done)
        rng = stream(55, 9, seed_tag, done)
        y = (rng.random((size, horizon)) < p)
        s = np.cumsum(y, axis=1)
        n = np.arange(1, horizon + 1)[None, :]
        log_r = confseq.log_mixture_ratio_counts(n, s, p)
        out[done:done + size] = (log_r >= threshold).any(axis=1)
        done += size
    return out.mean()


@pytest.mark.slow
def test_time_uniform_coverage():
    horizon, n_seqs = 2000, 2000
    se = math.sqrt(ALPHA * (1 - ALPHA) / n_seqs)
    for tag, p in enumerate((0.005, 0.01, 0.1, 0.5)):
        assert _ever_reject(p, horizon, n_seqs, 100 + tag) <= ALPHA + 3 * se


@pytest.mark.slow
def test_practical_zero_stopping_validity():
    # P(tau_0 < infinity and p > eps) <= alpha: tau_0 fires iff the raw
    # upper endpoint drops below eps, i.e. R_n(eps) >= 1/alpha on the
    # right branch (s/n <= eps)
    eps, horizon, n_seqs = 0.005, 5000, 2000
    threshold = math.log(1.0 / ALPHA)
    se = math.sqrt(ALPHA * (1 - ALPHA) / n_seqs)
    for tag, p in enumerate((0.01, 0.1, 0.5)):
        fired = np.zeros(n_seqs, dtype=bool)
        done = 0
        while done < n_seqs:
            size = min(250, n_seqs - done)
            rng = stream(56, 9, 200 + tag, done)
            y = (rng.random((size, horizon)) < p)
            s = np.cumsum(y, axis=1)
            n = np.arange(1, horizon + 1)[None, :]
            log_r = confseq.log_mixture_ratio_counts(n, s, eps)
            fired[done:done + size] = (
                (log_r >= threshold) & (s / n <= eps)).any(axis=1)
            done += size
        assert fired.mean() <= ALPHA + 3 * se


def test_stop_event_characterization_matches_interval():
    # the vectorized tau_0 test above relies on: upper endpoint <= eps
    # iff R_n(eps) >= 1/alpha and s/n <= eps; verify on mixed states
    eps = 0.02
    rng = stream(57, 9, 3, 0)
    state = confseq.fresh()
    for y in (rng.random(400) < 0.01).astype(int):
        state = confseq.update(state, int(y))
        n, s = state.counts.n, state.counts.s
        raw_hi = confseq._raw_interval(n, s, ALPHA, JEFFREYS)[1]
        fired = (s / n <= eps
                 and confseq._log_ratio(n, s, eps, JEFFREYS) >= math.log(1 / ALPHA))
        assert fired == (raw_hi <= eps + 1e-9) or abs(raw_hi - eps) < 1e-7
