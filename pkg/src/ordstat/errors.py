"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument violates a mathematical precondition."""


class OracleError(RuntimeError):
    """An oracle failed to converge within its evaluation budget.

    The best estimate reached so far is kept on ``best_estimate``.
    """

    def __init__(self, message: str, best_estimate: float | None = None):
        super().__init__(message)
        self.best_estimate = best_estimate


class ConsistencyError(RuntimeError):
    """An internal numerical consistency check failed."""
