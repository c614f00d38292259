class ZenoLabError(Exception):
    pass


class DomainError(ZenoLabError, ValueError):
    """Argument outside the domain where an operation is defined."""


class PoleError(ZenoLabError, ArithmeticError):
    """Evaluation requested exactly at the bare A pole of beta."""


class ResolutionBudgetExceeded(ZenoLabError, RuntimeError):
    """Oscillation-resolving quadrature would need more panels than allowed."""


class BoundStateSearchError(ZenoLabError, RuntimeError):
    pass


class ClosureError(ZenoLabError, ArithmeticError):
    """A completeness sum missed its target; ``residual`` carries the miss."""

    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual
