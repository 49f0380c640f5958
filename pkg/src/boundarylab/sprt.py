"""Wald sequential probability ratio test for two simple Bernoulli
hypotheses, oriented at rare-event monitoring (alternative below null).

The log-likelihood ratio after n trials with s successes is

    L_n = s * log(p1/p0) + (n - s) * log((1-p1)/(1-p0)),

accepted against the closed Wald boundaries a = log(beta/(1-alpha)) and
b = log((1-beta)/alpha); crossing uses >= b and <= a to match the ceiling
in the all-failure stop-time formula.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ConfigError, FrozenStateError

__all__ = ["SprtDecision", "SprtConfig", "SprtState", "start", "step",
           "all_failure_stop_time", "simulate_paths"]


class SprtDecision(enum.Enum):
    CONTINUE = "continue"
    ACCEPT_H0 = "accept_h0"
    ACCEPT_H1 = "accept_h1"


@dataclass(frozen=True)
class SprtConfig:
    p0: float
    p1: float
    alpha: float
    beta: float

    def __post_init__(self):
        if not 0.0 < self.p1 < self.p0 < 1.0:
            raise ConfigError(
                f"need 0 < p1 < p0 < 1, got p0={self.p0}, p1={self.p1}")
        if not (0.0 < self.alpha < 1.0 and 0.0 < self.beta < 1.0):
            raise ConfigError("alpha and beta must be in (0, 1)")
        if self.alpha + self.beta >= 1.0:
            raise ConfigError("alpha + beta must be below 1")

    @property
    def success_increment(self) -> float:
        return math.log(self.p1 / self.p0)

    @property
    def failure_increment(self) -> float:
        return math.log((1.0 - self.p1) / (1.0 - self.p0))

    @property
    def lower_boundary(self) -> float:
        return math.log(self.beta / (1.0 - self.alpha))

    @property
    def upper_boundary(self) -> float:
        return math.log((1.0 - self.beta) / self.alpha)


@dataclass(frozen=True)
class SprtState:
    llr: float
    n: int
    s: int
    decision: SprtDecision


def start() -> SprtState:
    return SprtState(llr=0.0, n=0, s=0, decision=SprtDecision.CONTINUE)


def step(state: SprtState, cfg: SprtConfig, y: int) -> SprtState:
    """Advance one observation; decided states are frozen."""
    if state.decision is not SprtDecision.CONTINUE:
        raise FrozenStateError(f"state already decided: {state.decision}")
    if y not in (0, 1):
        raise ValueError(f"outcome must be 0 or 1, got {y!r}")
    n = state.n + 1
    s = state.s + int(y)
    # recomputed from counts so that an all-failure path has llr exactly
    # n * failure_increment
    llr = s * cfg.success_increment + (n - s) * cfg.failure_increment
    if llr >= cfg.upper_boundary:
        decision = SprtDecision.ACCEPT_H1
    elif llr <= cfg.lower_boundary:
        decision = SprtDecision.ACCEPT_H0
    else:
        decision = SprtDecision.CONTINUE
    return SprtState(llr=llr, n=n, s=s, decision=decision)


def all_failure_stop_time(cfg: SprtConfig) -> int:
    """ceil(log((1-beta)/alpha) / log((1-p1)/(1-p0))) with an exactness
    guard: the returned n is the first at which the all-failure llr path
    reaches the upper boundary."""
    b = cfg.upper_boundary
    inc = cfg.failure_increment
    n = max(1, math.ceil(b / inc))
    while n > 1 and (n - 1) * inc >= b:
        n -= 1
    while n * inc < b:
        n += 1
    return n


def simulate_paths(cfg: SprtConfig, p: float, reps: int, horizon: int,
                   rng: np.random.Generator, chunk: int = 2048):
    """Monte Carlo SPRT runs under Bernoulli(p) data.

    Returns ``(decision, stop_time)`` arrays; decision is +1 for
    accept-H1, -1 for accept-H0 and 0 for paths still undecided at the
    horizon.  Outcomes are drawn chunk by chunk and scanned by the
    compiled kernel, so memory stays bounded at reps * chunk.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must be in (0, 1), got {p}")
    inc1 = cfg.success_increment
    inc0 = cfg.failure_increment
    decision = np.zeros(reps, dtype=np.int8)
    stop_time = np.full(reps, horizon, dtype=np.int64)
    llr = np.zeros(reps)
    active = np.arange(reps)
    consumed = np.zeros(reps, dtype=np.int64)
    while active.size and consumed[active[0]] < horizon:
        width = min(chunk, horizon - consumed[active[0]])
        y = rng.random((active.size, width)) < p
        inc = np.where(y, inc1, inc0)
        value, steps, dec = kernels.cross_times(
            inc, llr[active], cfg.lower_boundary, cfg.upper_boundary)
        decided = dec != 0
        idx = active[decided]
        decision[idx] = dec[decided]
        stop_time[idx] = consumed[idx] + steps[decided]
        llr[active] = value
        consumed[active] += width
        active = active[~decided]
    stop_time[decision == 0] = horizon
    return decision, stop_time
