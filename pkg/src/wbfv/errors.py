"""Exception hierarchy shared across the solver."""


class WBError(Exception):
    """Base class for all solver errors."""


class ConfigurationError(WBError):
    """Invalid run configuration (bad grid, unknown scheme, unsupported model)."""


class StateError(WBError):
    """Physically invalid state encountered (e.g. non-positive thickness)."""


class CriticalFlowError(StateError):
    """Stationary ODE slope requested at (or too close to) a critical point."""


class CollocationError(WBError):
    """Implicit-midpoint collocation step failed to converge."""


class StageSolveError(WBError):
    """Implicit stage solver did not converge within its iteration budget."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class SingularMatrixError(WBError):
    """Banded LU hit a zero pivot."""
