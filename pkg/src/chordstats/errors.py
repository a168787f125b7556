"""Exception types shared across the package."""


class ConsistencyError(AssertionError):
    """An internal cross-check failed: two exact routes disagree, a division
    left a remainder, or an invariant of a computed table was violated."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message: str, error_estimate: float):
        super().__init__(f"{message} (error estimate {error_estimate:.3e})")
        self.error_estimate = error_estimate
