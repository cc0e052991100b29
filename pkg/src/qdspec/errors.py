"""Exception hierarchy shared by all modules."""


class QDSpecError(Exception):
    """Base class for every error raised by the package."""


class InvalidParameterError(QDSpecError, ValueError):
    pass


class DomainError(QDSpecError, ValueError):
    """Argument lies outside the region where an operation is defined."""


class BranchError(DomainError):
    """Spectral parameter lies on the cut [2, inf)."""


class SingularityError(QDSpecError, ArithmeticError):
    """Evaluation requested at (or too close to) a pole or removable singularity."""


class AccuracyError(QDSpecError, ArithmeticError):
    """Quadrature did not reach the requested tolerance.

    The best available estimate and its error bound are attached so callers
    can decide whether to accept them.
    """

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class AccuracyWarning(UserWarning):
    pass


class UnderflowWarning(UserWarning):
    """A value was smaller than the double range and has been returned as 0."""
