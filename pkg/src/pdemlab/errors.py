"""Exception hierarchy shared by all modules."""


class DomainError(ValueError):
    """An input lies outside the domain where the operation is defined."""


class NumericError(ArithmeticError):
    """A numerical procedure (quadrature, root find, eigensolve) failed."""


class QuadratureError(NumericError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message, interval=None, abserr=None):
        super().__init__(message)
        self.interval = interval
        self.abserr = abserr


class SingularityError(DomainError):
    """Evaluation too close to a parameter value where a closed form diverges."""

    def __init__(self, message, critical=None):
        super().__init__(message)
        self.critical = critical
