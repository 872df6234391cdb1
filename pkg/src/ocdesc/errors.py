"""Exception hierarchy shared by all ocdesc modules."""


class OcdescError(Exception):
    """Base class for every error raised by this package."""


class InputError(OcdescError, ValueError):
    """Malformed or non-finite input data, or mismatched shapes."""


class ConfigError(OcdescError, ValueError):
    """Invalid hyperparameter or configuration value."""


class InfeasibleError(OcdescError, ValueError):
    """The dual constraints admit no feasible point (C * N < 1)."""


class NumericError(OcdescError, ArithmeticError):
    """A linear-algebra step failed or produced unusable values."""


class DegenerateDataError(NumericError):
    """Data carries no usable variance (e.g. all samples identical)."""


class ConvergenceError(OcdescError, RuntimeError):
    """Iterative solver stopped before meeting its tolerance.

    ``best`` holds the best iterate found, so callers may still inspect it.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class SearchError(OcdescError, RuntimeError):
    """Every grid cell of a hyperparameter search failed."""

    def __init__(self, message, failures=None):
        super().__init__(message)
        self.failures = failures or {}
