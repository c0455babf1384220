"""Exception types shared across the package."""


class GhostDualityError(Exception):
    """Base class for all package errors."""


class DomainError(GhostDualityError, ValueError):
    """A parameter lies outside the domain where an operation is defined."""


class RegimeError(GhostDualityError):
    """An approximate formula was requested outside its validity regime."""


class ResolutionError(GhostDualityError):
    """A sampling grid does not resolve the function placed on it.

    ``suggested_n_points`` carries a grid size that would have passed the
    check, when one can be estimated.
    """

    def __init__(self, message, suggested_n_points=None):
        super().__init__(message)
        self.suggested_n_points = suggested_n_points


class PreconditionError(GhostDualityError):
    """An operation was called on inputs that violate its precondition."""


class ConfigError(GhostDualityError):
    """A run configuration could not be parsed."""

    def __init__(self, message, line=None, key=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
        self.key = key
