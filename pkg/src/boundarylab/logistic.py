"""Logistic regression core: IRLS maximum likelihood with optional ridge
penalty, LP-based separation detection, the five-criterion instability
panel, intercept calibration, and prediction.

Fitted probabilities from any finite coefficient vector are strictly
inside (0, 1); apparent zeros or ones signal separation or numerical
divergence, which is exactly what the instability panel flags.
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import ConfigError, OneClassError
from .lp import simplex_maximize

__all__ = [
    "Design", "RidgeConfig", "LogisticFit", "SeparationKind",
    "SeparationReport", "InstabilityReport", "expit", "log_likelihood",
    "penalized_objective", "penalized_gradient", "fit", "predict",
    "detect_separation", "instability", "calibrate_intercept",
]

# instability thresholds of the common diagnostic panel
COEF_NORM_LIMIT = 50.0
LOGIT_LIMIT = 30.0
EXTREME_PROB = 1e-6
EXTREME_FRACTION_LIMIT = 0.01

_SEPARATION_TOL = 1e-9
# fitted logits are kept below this cap so exp(-|logit|) never underflows
# to an exact 0/1 fitted probability (strict interiority); separation
# escapes hit the cap and report nonconvergence
_LOGIT_CAP = 600.0


def expit(z):
    """Numerically stable logistic function, elementwise."""
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    if out.ndim == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class Design:
    """Covariate matrix and binary outcomes.

    When ``intercept_included`` is False (the default), a constant column
    is prepended internally, so coefficient vectors have length d + 1
    with the intercept in slot 0.
    """

    X: np.ndarray
    y: np.ndarray
    intercept_included: bool = False

    def __post_init__(self):
        X = np.atleast_2d(np.asarray(self.X, dtype=np.float64))
        y = np.asarray(self.y)
        if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
            raise ConfigError(f"X must be a nonempty 2-D matrix, got {X.shape}")
        if y.shape != (X.shape[0],):
            raise ConfigError("y length must match the number of rows of X")
        if not np.isin(y, (0, 1)).all():
            raise ConfigError("y entries must be 0 or 1")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y.astype(np.float64))

    @property
    def n(self) -> int:
        return self.X.shape[0]

    def model_matrix(self) -> np.ndarray:
        if self.intercept_included:
            return self.X
        return np.hstack([np.ones((self.n, 1)), self.X])

    def one_class(self) -> bool:
        return self.y.min() == self.y.max()


@dataclass(frozen=True)
class RidgeConfig:
    """L2 penalty (lambda/2)*||beta||^2, by default on slopes only."""

    lam: float = 0.0
    penalize_intercept: bool = False

    def __post_init__(self):
        if self.lam < 0:
            raise ConfigError(f"lambda must be nonnegative, got {self.lam}")


@dataclass(frozen=True)
class LogisticFit:
    beta: np.ndarray
    converged: bool
    iterations: int
    max_abs_logit: float
    coef_norm: float
    extreme_prob_fraction: float
    intercept_included: bool
    objective_path: tuple = field(repr=False, default=())


class SeparationKind(enum.Enum):
    NONE = "none"
    QUASI_COMPLETE = "quasi_complete"
    COMPLETE = "complete"


@dataclass(frozen=True)
class SeparationReport:
    kind: SeparationKind
    direction: np.ndarray
    margin: float


@dataclass(frozen=True)
class InstabilityReport:
    one_class: bool
    nonconverged: bool
    coef_norm_exceeded: bool
    logit_exceeded: bool
    extreme_prob_exceeded: bool

    @property
    def unstable(self) -> bool:
        return (self.one_class or self.nonconverged or self.coef_norm_exceeded
                or self.logit_exceeded or self.extreme_prob_exceeded)


def _penalty_mask(m: int, ridge: RidgeConfig) -> np.ndarray:
    mask = np.full(m, ridge.lam)
    if not ridge.penalize_intercept:
        mask[0] = 0.0
    return mask


def log_likelihood(eta, y) -> float:
    """Bernoulli log-likelihood sum(y*eta - log(1 + exp(eta)))."""
    return float(np.sum(y * eta - np.logaddexp(0.0, eta)))


def penalized_objective(design: Design, beta, ridge: RidgeConfig) -> float:
    Xm = design.model_matrix()
    beta = np.asarray(beta, dtype=np.float64)
    pen = _penalty_mask(Xm.shape[1], ridge)
    return log_likelihood(Xm @ beta, design.y) - 0.5 * float(pen @ (beta * beta))


def penalized_gradient(design: Design, beta, ridge: RidgeConfig) -> np.ndarray:
    Xm = design.model_matrix()
    beta = np.asarray(beta, dtype=np.float64)
    pen = _penalty_mask(Xm.shape[1], ridge)
    mu = expit(Xm @ beta)
    return Xm.T @ (design.y - mu) - pen * beta


def _solve_spd(H: np.ndarray, g: np.ndarray):
    """Cholesky solve with additive jitter fallback; returns (step, jittered)."""
    m = H.shape[0]
    try:
        c, low = scipy.linalg.cho_factor(H, check_finite=False)
        return scipy.linalg.cho_solve((c, low), g, check_finite=False), False
    except scipy.linalg.LinAlgError:
        pass
    jitter = 1e-10 * max(np.trace(H) / m, 1.0)
    for _ in range(8):
        try:
            c, low = scipy.linalg.cho_factor(
                H + jitter * np.eye(m), check_finite=False)
            return scipy.linalg.cho_solve((c, low), g, check_finite=False), True
        except scipy.linalg.LinAlgError:
            jitter *= 10.0
    raise np.linalg.LinAlgError("normal equations unsolvable even with jitter")


def fit(design: Design, ridge: RidgeConfig = RidgeConfig(),
        max_iter: int = 100, tol: float = 1e-8) -> LogisticFit:
    """IRLS with step halving on the penalized log-likelihood.

    Convergence requires the penalized gradient norm to fall below
    ``tol`` with no further float-resolvable ascent along the Newton
    direction; under separation the saturated objective keeps climbing
    even after the gradient underflows past tol, so such fits run to the
    iteration budget (or the logit cap) and report nonconvergence.  A
    jittered normal-equation solve also marks the fit nonconverged.
    """
    if design.one_class():
        raise OneClassError("all outcomes belong to one class; "
                            "an ordinary logistic fit is not identifiable")
    Xm = design.model_matrix()
    y = design.y
    n, m = Xm.shape
    pen = _penalty_mask(m, ridge)

    def objective_at(b):
        eta = Xm @ b
        terms = y * eta - np.logaddexp(0.0, eta)
        pen_term = 0.5 * float(pen @ (b * b))
        value = float(terms.sum()) - pen_term
        # float-noise scale of the evaluation: eps times the magnitude
        # mass of the summands, not of the (possibly cancelled) total
        noise = 64.0 * np.finfo(float).eps * (
            1.0 + float(np.abs(terms).sum()) + abs(pen_term))
        return value, eta, noise

    # smoothed base-rate intercept start keeps early steps well scaled
    s = y.sum()
    beta = np.zeros(m)
    beta[0] = math.log((s + 0.5) / (n - s + 0.5))

    objective, eta, noise = objective_at(beta)
    path = [objective]
    converged = False
    jittered = False
    iterations = 0
    while iterations < max_iter:
        mu = expit(eta)
        grad = Xm.T @ (y - mu) - pen * beta
        grad_norm = np.linalg.norm(grad)
        w = mu * (1.0 - mu)
        H = (Xm * w[:, None]).T @ Xm + np.diag(pen)
        try:
            step, used_jitter = _solve_spd(H, grad)
        except np.linalg.LinAlgError:
            break
        jittered = jittered or used_jitter
        if grad_norm <= tol:
            # a tiny gradient is genuine convergence only when no further
            # float-resolvable ascent exists; the saturated objective
            # (~ -sum exp(-margin)) still climbs under separation even
            # though the gradient has underflowed past tol
            cand_obj, cand_eta, cand_noise = objective_at(beta + step)
            within_cap = np.max(np.abs(cand_eta)) <= _LOGIT_CAP
            if not within_cap or cand_obj <= objective + noise + cand_noise:
                converged = within_cap
                break
            beta = beta + step
            objective, eta, noise = cand_obj, cand_eta, cand_noise
            path.append(objective)
            iterations += 1
            continue
        iterations += 1
        scale = 1.0
        improved = False
        for _ in range(31):
            cand_obj, cand_eta, cand_noise = objective_at(beta + scale * step)
            if cand_obj > objective and np.max(np.abs(cand_eta)) <= _LOGIT_CAP:
                beta = beta + scale * step
                objective, eta, noise = cand_obj, cand_eta, cand_noise
                improved = True
                path.append(objective)
                break
            scale *= 0.5
        if not improved:
            # endgame: once objective gains fall below float resolution,
            # accept the full Newton step while it keeps contracting the
            # gradient (quadratic convergence regime)
            cand_obj, cand_eta, cand_noise = objective_at(beta + step)
            cand_grad = np.linalg.norm(
                penalized_gradient(design, beta + step, ridge))
            if (cand_obj >= objective - noise - cand_noise
                    and cand_grad < 0.5 * grad_norm
                    and np.max(np.abs(cand_eta)) <= _LOGIT_CAP):
                beta = beta + step
                objective, eta, noise = cand_obj, cand_eta, cand_noise
                path.append(objective)
            else:
                break
        if np.linalg.norm(beta) > 1e12:
            break

    if jittered:
        converged = False

    mu = expit(eta)
    extreme = np.mean((mu < EXTREME_PROB) | (mu > 1.0 - EXTREME_PROB))
    slopes = beta if design.intercept_included else beta[1:]
    return LogisticFit(
        beta=beta,
        converged=bool(converged),
        iterations=iterations,
        max_abs_logit=float(np.max(np.abs(eta))),
        coef_norm=float(np.linalg.norm(slopes)),
        extreme_prob_fraction=float(extreme),
        intercept_included=design.intercept_included,
        objective_path=tuple(path),
    )


def predict(fit_result: LogisticFit, X) -> np.ndarray:
    """Elementwise expit of the fitted logits; strictly interior."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    m = fit_result.beta.shape[0]
    expected = m if fit_result.intercept_included else m - 1
    if X.shape[1] != expected:
        raise ValueError(f"expected {expected} columns, got {X.shape[1]}")
    if not fit_result.intercept_included:
        X = np.hstack([np.ones((X.shape[0], 1)), X])
    return expit(X @ fit_result.beta)


def detect_separation(design: Design) -> SeparationReport:
    """Classify the design as completely, quasi-completely, or not
    separated.

    Solves  max t  s.t.  (2y_i - 1) x_i.a >= t, ||a||_inf <= 1  by the
    dense simplex; a positive optimum certifies complete separation.  At
    optimum zero, a second program maximizes the total margin subject to
    all margins >= 0; a nonzero solution (or a null direction of the
    model matrix) certifies quasi-complete separation.
    """
    if design.one_class():
        raise OneClassError("separation is undefined for one-class data")
    Xm = design.model_matrix()
    n, m = Xm.shape
    z = 2.0 * design.y - 1.0
    M = z[:, None] * Xm

    # variables [g (m), h (m), t]: a = g - h, boxes keep the LP bounded
    A1 = np.zeros((n + 2 * m, 2 * m + 1))
    A1[:n, :m] = -M
    A1[:n, m:2 * m] = M
    A1[:n, -1] = 1.0
    A1[n:n + m, :m] = np.eye(m)
    A1[n + m:, m:2 * m] = np.eye(m)
    b1 = np.concatenate([np.zeros(n), np.ones(2 * m)])
    c1 = np.zeros(2 * m + 1)
    c1[-1] = 1.0
    x1, t_star = simplex_maximize(c1, A1, b1, tol=_SEPARATION_TOL)
    direction = x1[:m] - x1[m:2 * m]
    if t_star > _SEPARATION_TOL:
        margins = M @ direction
        return SeparationReport(SeparationKind.COMPLETE, direction,
                                float(margins.min()))

    # total-margin program over {all margins >= 0}
    A2 = np.zeros((n + 2 * m, 2 * m))
    A2[:n, :m] = -M
    A2[:n, m:] = M
    A2[n:n + m, :m] = np.eye(m)
    A2[n + m:, m:] = np.eye(m)
    b2 = np.concatenate([np.zeros(n), np.ones(2 * m)])
    col_sum = M.sum(axis=0)
    c2 = np.concatenate([col_sum, -col_sum])
    x2, total = simplex_maximize(c2, A2, b2, tol=_SEPARATION_TOL)
    scale = max(1.0, float(np.abs(M).max()))
    if total > _SEPARATION_TOL * scale * n:
        direction = x2[:m] - x2[m:]
        margins = M @ direction
        return SeparationReport(SeparationKind.QUASI_COMPLETE, direction,
                                float(margins.min()))

    # a null direction of the model matrix keeps every margin at zero
    svals = np.linalg.svd(Xm, compute_uv=False)
    if svals[-1] <= _SEPARATION_TOL * max(1.0, svals[0]):
        null_dir = np.linalg.svd(Xm)[2][-1]
        return SeparationReport(SeparationKind.QUASI_COMPLETE, null_dir, 0.0)

    return SeparationReport(SeparationKind.NONE, np.zeros(m), 0.0)


def instability(fit_result: LogisticFit | None,
                design: Design) -> InstabilityReport:
    """Five-criterion diagnostic panel; pass ``fit_result=None`` for a
    one-class design, where no ordinary fit exists."""
    if design.one_class():
        return InstabilityReport(True, False, False, False, False)
    if fit_result is None:
        raise ValueError("fit_result required for a two-class design")
    return InstabilityReport(
        one_class=False,
        nonconverged=not fit_result.converged,
        coef_norm_exceeded=fit_result.coef_norm > COEF_NORM_LIMIT,
        logit_exceeded=fit_result.max_abs_logit > LOGIT_LIMIT,
        extreme_prob_exceeded=(fit_result.extreme_prob_fraction
                               > EXTREME_FRACTION_LIMIT),
    )


def calibrate_intercept(slopes, rho: float, draws: int = 250_000,
                        rng: np.random.Generator | None = None) -> float:
    """Intercept b0 with mean event probability rho under X ~ N(0, I).

    The linear predictor X.slopes is N(0, sigma^2) with sigma the slope
    norm, so a fixed Monte Carlo sample of sigma * Z realizes the
    required sample of linear predictors; the sample mean of
    expit(b0 + .) is strictly increasing in b0 and is bisected until it
    is within 1e-5 of rho.
    """
    if not 0.0 < rho < 1.0:
        raise ValueError(f"rho must be in (0, 1), got {rho}")
    if draws < 1:
        raise ValueError("draws must be positive")
    slopes = np.asarray(slopes, dtype=np.float64)
    sigma = float(np.linalg.norm(slopes))
    if sigma == 0.0:
        return math.log(rho / (1.0 - rho))
    if rng is None:
        rng = np.random.default_rng(np.random.SeedSequence(0x10E5EED))
    eta = sigma * rng.standard_normal(draws)

    def mean_prob(b0):
        return float(np.mean(expit(b0 + eta)))

    lo = math.log(rho / (1.0 - rho)) - 1.0
    hi = lo + 2.0
    while mean_prob(lo) > rho:
        lo -= max(1.0, sigma)
    while mean_prob(hi) < rho:
        hi += max(1.0, sigma)
    mid = 0.5 * (lo + hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        value = mean_prob(mid)
        if abs(value - rho) <= 1e-5:
            return mid
        if value < rho:
            lo = mid
        else:
            hi = mid
    return mid
