"""
Exception hierarchy for the shrinkage toolkit.

Every error is also an instance of the matching built-in exception, so code
that catches ``ValueError`` or ``RuntimeError`` keeps working.
"""


class ShrinkageError(Exception):
    """Base class for all errors raised by this package."""


class DomainViolation(ShrinkageError, ValueError):
    """An argument lies outside the domain an operation is defined on."""


class NonIntegrable(DomainViolation):
    """
    A requested moment E[U^v] does not exist.

    Attributes:
        p: Degrees of freedom
        exponent: The offending exponent v (p/2 + v <= 0)
    """

    def __init__(self, p, exponent, context=None):
        self.p = p
        self.exponent = exponent
        message = f"E[U^{exponent:g}] is not integrable for p={p} (requires p/2 + v > 0)"
        if context:
            message = f"{context}: {message}"
        super().__init__(message)


class DimensionTooSmall(DomainViolation):
    """
    An estimator family was requested below the dimension its coefficients
    are derived for.

    Attributes:
        degree: Polynomial degree (1 for James-Stein)
        p: Requested dimension
        threshold: Smallest excluded dimension; p must exceed it
    """

    def __init__(self, degree, p, threshold):
        self.degree = degree
        self.p = p
        self.threshold = threshold
        label = "James-Stein" if degree == 1 else f"degree {degree}"
        super().__init__(f"{label} requires p > {threshold} (got p={p})")


class LengthMismatch(DomainViolation):
    """Vectors that must share a dimension do not."""


class ConventionUnsupported(ShrinkageError, ValueError):
    """The requested evaluation path is not valid for the coefficient convention."""


class TruncationFailure(ShrinkageError, RuntimeError):
    """A Poisson-mixture series did not converge within its term budget."""


class SingularObservation(ShrinkageError, ArithmeticError):
    """A shrinkage factor was evaluated at an observation with ||x||^2 = 0."""
