"""SPRT tests: closed-form stop times against an extended-precision
oracle, step-wise cross-checks, and Monte Carlo operating
characteristics inside the Wald error envelope."""

import math

import mpmath as mp
import numpy as np
import pytest

from boundarylab.errors import ConfigError, FrozenStateError
from boundarylab.rng import stream
from boundarylab.sprt import (SprtConfig, SprtDecision, all_failure_stop_time,
                              simulate_paths, start, step)

RARE = SprtConfig(p0=0.01, p1=0.005, alpha=0.05, beta=0.05)


def test_config_validation():
    with pytest.raises(ConfigError):
        SprtConfig(0.01, 0.01, 0.05, 0.05)
    with pytest.raises(ConfigError):
        SprtConfig(0.005, 0.01, 0.05, 0.05)
    with pytest.raises(ConfigError):
        SprtConfig(0.5, 0.25, 0.6, 0.5)


def test_boundaries_ordering():
    assert RARE.lower_boundary < 0.0 < RARE.upper_boundary


def test_all_failure_stop_time_oracle():
    # mpmath: ceil(log(19) / log(0.995/0.99)) = ceil(584.4699...) = 585
    assert all_failure_stop_time(RARE) == 585
    oracle = int(mp.ceil(mp.log(19) / mp.log(mp.mpf("0.995") / mp.mpf("0.99"))))
    assert all_failure_stop_time(RARE) == oracle
    assert all_failure_stop_time(SprtConfig(0.5, 0.25, 0.05, 0.05)) == 8


def test_stop_time_confirmed_by_stepping():
    for cfg in (RARE, SprtConfig(0.5, 0.25, 0.05, 0.05),
                SprtConfig(0.2, 0.1, 0.1, 0.05)):
        tau = all_failure_stop_time(cfg)
        state = start()
        for i in range(1, tau + 1):
            assert state.decision is SprtDecision.CONTINUE
            state = step(state, cfg, 0)
            if i < tau:
                assert state.decision is SprtDecision.CONTINUE
        assert state.decision is SprtDecision.ACCEPT_H1
        assert state.n == tau


def test_llr_linear_in_failures():
    state = start()
    for n in range(1, 200):
        state = step(state, RARE, 0)
        assert state.llr == n * RARE.failure_increment


def test_single_success_keeps_continuing():
    state = step(start(), RARE, 1)
    assert state.llr == pytest.approx(math.log(0.5))
    assert state.decision is SprtDecision.CONTINUE


def test_frozen_state_rejects_steps():
    state = start()
    cfg = SprtConfig(0.9, 0.1, 0.05, 0.05)
    while state.decision is SprtDecision.CONTINUE:
        state = step(state, cfg, 0)
    with pytest.raises(FrozenStateError):
        step(state, cfg, 0)


@pytest.mark.slow
def test_operating_characteristics():
    reps, horizon = 20_000, 50_000
    dec0, _ = simulate_paths(RARE, RARE.p0, reps, horizon, stream(77, 8, 0, 0))
    dec1, _ = simulate_paths(RARE, RARE.p1, reps, horizon, stream(77, 8, 1, 0))
    assert (dec0 == 0).mean() < 0.001  # essentially always decided
    assert (dec1 == 0).mean() < 0.001
    alpha_hat = (dec0 == 1).mean()  # wrongly favours H1 under p0
    beta_hat = (dec1 == -1).mean()  # wrongly favours H0 under p1
    assert alpha_hat <= 0.07
    assert beta_hat <= 0.07
    se = math.sqrt(0.1 * 0.9 / reps)
    assert alpha_hat + beta_hat <= RARE.alpha + RARE.beta + 3 * se


def test_simulated_all_failure_paths_hit_closed_form():
    # under p so small that failures dominate, the first crossings match
    # the closed-form threshold
    cfg = SprtConfig(0.5, 0.25, 0.05, 0.05)
    tau = all_failure_stop_time(cfg)
    dec, times = simulate_paths(cfg, 1e-12, 500, 100, stream(78, 8, 2, 0))
    assert (dec == 1).all()
    assert (times == tau).all()
