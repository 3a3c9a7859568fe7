"""Exception types shared across the package."""

__all__ = [
    "EmptySupportError",
    "EmptySumError",
    "ConvergenceError",
    "ResolutionError",
    "NumericalInstabilityError",
]


class EmptySupportError(ValueError):
    """Raised when no partition carries nonzero weight.

    Typical cause: the strictly decreasing set at level N is empty, which
    happens exactly when N < d(d+1)/2.
    """


class EmptySumError(ValueError):
    """Raised when a sum that must be nonzero has no terms for the given (d, N)."""


class ConvergenceError(RuntimeError):
    """Raised when an iterative solver hits its iteration cap.

    The best iterate found so far is attached as ``best`` so callers can
    inspect how close the run got.
    """

    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best


class ResolutionError(RuntimeError):
    """Raised when a quadrature grid is too coarse for the requested integrand.

    ``suggested_resolution`` is the smallest per-angle point count known to be
    exact for the integrand that triggered the refusal.
    """

    def __init__(self, message: str, suggested_resolution: int | None = None):
        super().__init__(message)
        self.suggested_resolution = suggested_resolution


class NumericalInstabilityError(RuntimeError):
    """Raised when both evaluation paths of a numerical routine fail."""
