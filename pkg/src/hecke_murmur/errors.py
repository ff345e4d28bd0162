"""Exception hierarchy. The CLI maps these onto exit codes."""


class HeckeMurmurError(Exception):
    """Base class for library errors."""


class ResourceLimitError(HeckeMurmurError):
    """A sieve, loop or memory budget would be exceeded."""


class BudgetExceededError(ResourceLimitError):
    """A brute-force oracle would exceed its loop budget."""


class InvariantViolation(HeckeMurmurError):
    """A structural invariant failed at runtime."""


class ExclusionZoneError(HeckeMurmurError, ValueError):
    """A density was requested too close to a singular point y^2/4."""

    def __init__(self, xi: float, y: int, radius: float):
        self.xi, self.y, self.radius = xi, y, radius
        super().__init__(f"xi={xi!r} lies within {radius} of the singular point y^2/4 = {y * y / 4} (y={y})")


class QuadratureError(HeckeMurmurError):
    """Adaptive quadrature failed to converge on a subinterval."""

    def __init__(self, lo: float, hi: float, estimate: float):
        self.lo, self.hi, self.estimate = lo, hi, estimate
        super().__init__(f"quadrature did not converge on [{lo!r}, {hi!r}] (error estimate {estimate:.3g})")


class EmptyWindowError(HeckeMurmurError, ValueError):
    """An average was requested over a window with no members."""


class CacheCorruptionError(HeckeMurmurError):
    """The on-disk class-number cache failed its integrity check."""
