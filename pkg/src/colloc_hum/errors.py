"""Exception types raised across the package."""


class CollocHumError(Exception):
    """Base class for all package errors."""


class InvalidOrderError(CollocHumError, ValueError):
    pass


class DimensionError(CollocHumError, ValueError):
    pass


class DomainError(CollocHumError, ValueError):
    pass


class InvalidDataError(CollocHumError, ValueError):
    pass


class ParameterError(CollocHumError, ValueError):
    pass


class ConfigurationError(CollocHumError, ValueError):
    pass


class NumericError(CollocHumError, ArithmeticError):
    pass


class NonConvergenceError(CollocHumError, RuntimeError):
    """CG hit its iteration cap; ``best`` holds the last iterate."""

    def __init__(self, message, best=None, iterations=None, residual=None):
        super().__init__(message)
        self.best = best
        self.iterations = iterations
        self.residual = residual
