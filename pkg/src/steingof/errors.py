"""Exception hierarchy shared by every module of the package."""


class SteinGofError(Exception):
    """Base class for all errors raised by steingof."""


class EmptyInput(SteinGofError):
    pass


class ParseError(SteinGofError):
    """A token in the input could not be turned into a finite real number."""

    def __init__(self, message, position=None, token=None):
        super().__init__(message)
        self.position = position
        self.token = token


class SampleTooSmall(SteinGofError):
    pass


class DegenerateSample(SteinGofError):
    """The sample has zero variance, so it cannot be standardized."""


class DomainError(SteinGofError, ValueError):
    pass


class ShapeError(SteinGofError, ValueError):
    pass


class InfeasibleConstraint(SteinGofError):
    """Zero lies outside the open convex hull of the pseudo-values."""


class ConvergenceFailure(SteinGofError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
