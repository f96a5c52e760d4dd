"""Exception hierarchy shared by every module of the package."""


class ConflationError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(ConflationError, ValueError):
    """An input violates a documented precondition or invariant."""


class CapacityError(ConflationError):
    """An exhaustive computation would exceed its enumeration cap."""


class SolverError(ConflationError, RuntimeError):
    """An iterative solver failed to produce a certified answer.

    ``residuals`` carries the last residuals observed before giving up.
    """

    def __init__(self, message, residuals=None, iterations=None):
        super().__init__(message)
        self.residuals = dict(residuals or {})
        self.iterations = iterations
