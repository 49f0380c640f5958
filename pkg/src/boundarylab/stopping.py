"""Boundary-distance stopping rules for conditional-risk trajectories.

A trajectory M_t estimates a conditional success probability at each
step.  The boundary-only rule stops as soon as the boundary distance
B_t = min(M_t, 1 - M_t) falls below a tolerance; the three-condition
rule additionally requires the future-window stability defect

    r_t = |M_t - mean(M_{t+1}, ..., M_{t+h})|

to be small and the uncertainty-width schedule W_t = c / sqrt(t) to have
shrunk below its threshold.  The conjunction can only stop later than
the boundary-only rule, which is what protects it against transient
boundary visits.

Three trajectory generators reproduce the study scenarios: a stable
boundary-convergent path, a transient dip toward the boundary, and a
stable interior path.  All generated values are clipped to
[1e-5, 1 - 1e-5].
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ConfigError
from .logistic import expit

__all__ = [
    "CLIP_LO", "CLIP_HI", "StopRule", "RiskTrajectory", "StopConfig",
    "StopOutcome", "StreamingStopper", "boundary_distance",
    "stability_defect", "width", "tau_boundary_only", "tau_rm",
    "stop_times_batch", "gen_stable_boundary", "gen_transient_boundary",
    "gen_interior_stable",
]

CLIP_LO = 1e-5
CLIP_HI = 1.0 - 1e-5


class StopRule(enum.Enum):
    BOUNDARY_ONLY = "boundary_only"
    BOUNDARY_PLUS_STABILITY = "boundary_plus_stability"


@dataclass(frozen=True)
class RiskTrajectory:
    m: np.ndarray
    scenario_label: str = ""

    def __post_init__(self):
        m = np.asarray(self.m, dtype=np.float64)
        if m.ndim != 1 or m.size < 1:
            raise ConfigError("trajectory must be a nonempty 1-D sequence")
        if (m < CLIP_LO).any() or (m > CLIP_HI).any():
            raise ConfigError(
                f"trajectory values must lie in [{CLIP_LO}, {CLIP_HI}]")
        object.__setattr__(self, "m", m)

    def __len__(self) -> int:
        return self.m.size


@dataclass(frozen=True)
class StopConfig:
    """Thresholds of the stopping rules; defaults are the trajectory-study
    constants."""

    epsilon: float = 0.02
    eta: float = 0.0008
    w: float = 0.015
    n_min: int = 10
    h: int = 5
    width_scale: float = 0.10

    def __post_init__(self):
        if min(self.epsilon, self.eta, self.w, self.width_scale) <= 0:
            raise ConfigError("all thresholds must be positive")
        if self.n_min < 1 or self.h < 1:
            raise ConfigError("n_min and h must be at least 1")


@dataclass(frozen=True)
class StopOutcome:
    stopped: bool
    stop_time: int | None
    rule: StopRule


def boundary_distance(m):
    """min(m, 1 - m), elementwise; ranges over [0, 1/2]."""
    m = np.asarray(m, dtype=np.float64)
    if (m < 0).any() or (m > 1).any():
        raise ValueError("probabilities must lie in [0, 1]")
    out = np.minimum(m, 1.0 - m)
    return float(out) if out.ndim == 0 else out


def stability_defect(traj: RiskTrajectory, t: int, h: int) -> float:
    """|M_t - mean(M_{t+1..t+h})| with 1-based t; NaN when the window
    extends past the trajectory (treated as not-yet-stable by the rule)."""
    if t < 1 or h < 1:
        raise ValueError("t and h must be positive")
    if t + h > len(traj):
        return math.nan
    window = traj.m[t:t + h]
    return float(abs(traj.m[t - 1] - window.mean()))


def width(t: int, cfg: StopConfig) -> float:
    """Uncertainty-width schedule W_t = width_scale / sqrt(t)."""
    if t < 1:
        raise ValueError("t must be at least 1")
    return cfg.width_scale / math.sqrt(t)


def stop_times_batch(m: np.ndarray, cfg: StopConfig,
                     with_stability: bool) -> np.ndarray:
    """Vectorized stop times over a (paths, T) matrix; 0 means no stop."""
    m = np.ascontiguousarray(np.atleast_2d(m), dtype=np.float64)
    return kernels.stop_times(m, cfg.epsilon, cfg.eta, cfg.width_scale,
                              cfg.w, cfg.n_min, cfg.h, with_stability)


def _outcome(stop: int, rule: StopRule) -> StopOutcome:
    if stop == 0:
        return StopOutcome(False, None, rule)
    return StopOutcome(True, int(stop), rule)


def tau_boundary_only(traj: RiskTrajectory, cfg: StopConfig) -> StopOutcome:
    """First t >= n_min with B_t <= epsilon."""
    stop = stop_times_batch(traj.m[None, :], cfg, with_stability=False)[0]
    return _outcome(int(stop), StopRule.BOUNDARY_ONLY)


def tau_rm(traj: RiskTrajectory, cfg: StopConfig) -> StopOutcome:
    """First t >= n_min meeting all three conditions: B_t <= epsilon,
    r_t <= eta (with the defect defined), and W_t <= w."""
    stop = stop_times_batch(traj.m[None, :], cfg, with_stability=True)[0]
    return _outcome(int(stop), StopRule.BOUNDARY_PLUS_STABILITY)


class StreamingStopper:
    """Online three-condition rule over a live stream of risk values.

    The stability defect at index t needs the h future values, so the
    decision for t is finalized only once M_{t+h} has arrived; push()
    therefore reports stops with a lag of h observations.  Matches the
    batch rule exactly on any prefix.
    """

    def __init__(self, cfg: StopConfig):
        self.cfg = cfg
        self._values: list[float] = []
        self._outcome: StopOutcome | None = None

    @property
    def outcome(self) -> StopOutcome | None:
        return self._outcome

    def push(self, m: float) -> StopOutcome | None:
        """Feed one value; returns the outcome when the rule fires."""
        if self._outcome is not None:
            return None
        if not CLIP_LO <= m <= CLIP_HI:
            raise ConfigError(f"risk value {m} outside the clip range")
        self._values.append(float(m))
        cfg = self.cfg
        t = len(self._values) - cfg.h  # newest index whose window closed
        if t < cfg.n_min:
            return None
        value = self._values[t - 1]
        if min(value, 1.0 - value) > cfg.epsilon:
            return None
        if cfg.width_scale / math.sqrt(t) > cfg.w:
            return None
        window = self._values[t:t + cfg.h]
        if abs(value - sum(window) / cfg.h) > cfg.eta:
            return None
        self._outcome = StopOutcome(True, t, StopRule.BOUNDARY_PLUS_STABILITY)
        return self._outcome


def _clip(values: np.ndarray) -> np.ndarray:
    return np.clip(values, CLIP_LO, CLIP_HI)


def gen_stable_boundary(T: int, rng: np.random.Generator) -> RiskTrajectory:
    """M_t = clip(expit(-1.5 - 0.06 t) + xi_t), xi_t ~ N(0, 0.025^2 / t)."""
    t = np.arange(1, T + 1, dtype=np.float64)
    noise = rng.standard_normal(T) * (0.025 / np.sqrt(t))
    return RiskTrajectory(_clip(expit(-1.5 - 0.06 * t) + noise),
                          "stable_boundary")


def gen_transient_boundary(T: int, rng: np.random.Generator) -> RiskTrajectory:
    """M_t = clip(0.12 - 0.105 exp(-(t-50)^2/80) + xi_t), xi_t ~ N(0, 0.006^2)."""
    t = np.arange(1, T + 1, dtype=np.float64)
    bump = 0.105 * np.exp(-((t - 50.0) ** 2) / 80.0)
    noise = 0.006 * rng.standard_normal(T)
    return RiskTrajectory(_clip(0.12 - bump + noise), "transient_boundary")


def gen_interior_stable(T: int, rng: np.random.Generator) -> RiskTrajectory:
    """M_t = clip(0.10 + 0.005 sin(t/10) + xi_t), xi_t ~ N(0, 0.004^2)."""
    t = np.arange(1, T + 1, dtype=np.float64)
    noise = 0.004 * rng.standard_normal(T)
    return RiskTrajectory(_clip(0.10 + 0.005 * np.sin(t / 10.0) + noise),
                          "interior_stable")
