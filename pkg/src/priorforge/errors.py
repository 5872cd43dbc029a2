"""Exception hierarchy.

Every error raised by this package derives from :class:`PriorforgeError`,
so callers (and the CLI) can distinguish our numerical / precondition
failures from genuine bugs.
"""


class PriorforgeError(Exception):
    """Base class for all package errors."""


class DomainError(PriorforgeError, ValueError):
    """An argument lies outside the domain an operation requires
    (observation outside the sample space, parameter outside its box)."""


class BoundaryError(DomainError):
    """A parameter point is on, outside, or numerically too close to the
    boundary of its open box for the requested operation (for example a
    finite-difference stencil would step over the edge)."""


class BoundaryMLEError(PriorforgeError):
    """The likelihood is maximized on the boundary of the parameter space,
    so interior-stationary-point machinery (expansions) does not apply."""


class OptimizationError(PriorforgeError):
    """An iterative optimizer failed to converge."""


class ConditioningError(PriorforgeError):
    """A matrix that must be symmetric positive definite (or invertible)
    is numerically not; carries diagnostics in ``details``."""

    def __init__(self, message, details=None):
        super().__init__(message)
        self.details = details or {}


class IntegrationError(PriorforgeError):
    """Adaptive quadrature failed to reach the requested tolerance."""

    def __init__(self, message, interval=None, estimate=None, error=None):
        super().__init__(message)
        self.interval = interval
        self.estimate = estimate
        self.error = error


class FactorizationError(PriorforgeError):
    """A Fisher-information block does not factor into separate functions
    of the interest and nuisance parameters."""


class OrthogonalityError(PriorforgeError):
    """Parameter blocks asserted orthogonal have a non-negligible
    off-diagonal Fisher information."""


class NonConvergenceError(PriorforgeError):
    """A limiting construction (compact-set sequence, grid refinement)
    did not stabilize."""


class ImproperPosteriorError(PriorforgeError):
    """The unnormalized posterior does not decay enough at the edges of
    the search region to be normalized reliably."""


class UsageError(PriorforgeError):
    """Bad user-facing input: unknown ids, malformed configuration."""
