"""Exception hierarchy shared by all subfield modules."""


class SubfieldError(Exception):
    """Base class for errors raised by subfield."""


class ConfigError(SubfieldError):
    """An experiment configuration is invalid or cannot be read."""


class NumericalError(SubfieldError):
    """A numerical procedure failed (non-finite values, failed factorization, ...)."""


class FactorizationError(NumericalError):
    """The covariance could not be factorized within the jitter ladder."""

    def __init__(self, message: str, max_jitter: float):
        super().__init__(message)
        self.max_jitter = max_jitter


class UnsupportedOperationError(SubfieldError, ValueError):
    """The operation is not defined for the given model (time, density, kind)."""
