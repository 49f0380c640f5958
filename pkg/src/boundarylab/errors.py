"""Exception types shared across the package."""


class BoundaryLabError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(BoundaryLabError, ValueError):
    """A configuration object violates its invariants."""


class UndefinedEstimateError(BoundaryLabError, ValueError):
    """An estimator was requested on data where it is undefined."""


class OneClassError(BoundaryLabError, ValueError):
    """All observed outcomes belong to a single class."""


class FrozenStateError(BoundaryLabError, RuntimeError):
    """A sequential state that already reached a decision was advanced."""


class BoundaryEvaluationError(BoundaryLabError, ValueError):
    """A quantity was evaluated at a degenerate boundary parameter."""


class DataValidationError(BoundaryLabError, ValueError):
    """An external data file failed schema or integrity validation."""
