"""Exception hierarchy shared by every module of the package."""


class FlrwKgError(Exception):
    """Base class; every error raised on purpose derives from it."""


class InvalidArgs(FlrwKgError, ValueError):
    pass


class DomainError(FlrwKgError, ValueError):
    pass


class NonConvergence(FlrwKgError, ArithmeticError):
    pass


class SingularBoundary(DomainError):
    pass


class QuadratureDivergence(FlrwKgError, ArithmeticError):
    pass


class GridTooSmall(FlrwKgError, ValueError):
    pass


class StiffnessFailure(FlrwKgError, ArithmeticError):
    pass


class NoContraction(FlrwKgError, ArithmeticError):
    pass


class MaxIter(FlrwKgError, ArithmeticError):
    pass


class NotInvertible(FlrwKgError, ValueError):
    pass


class Inapplicable(FlrwKgError, ValueError):
    pass


class DegenerateWindow(FlrwKgError, ValueError):
    pass


class ConfigError(FlrwKgError, ValueError):
    """Raised for malformed run configurations; carries the offending key path."""

    def __init__(self, message, location=""):
        super().__init__(message)
        self.location = location
