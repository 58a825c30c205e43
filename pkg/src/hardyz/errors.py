"""Exception types shared across the package."""


class DomainError(ValueError):
    """Argument outside the domain where the requested evaluation is defined."""


class ToleranceError(ValueError):
    """Requested tolerance is below what binary64 can deliver."""


class WindowCollisionError(ValueError):
    """The T^eps windows around sqrt(T/2pi) and sqrt(T/pi) overlap."""


class NoSaddleError(ValueError):
    """The phase derivative has no sign change on the interval."""


class HypothesisError(ValueError):
    """An a-priori bound was requested outside the hypotheses it needs."""


class InsufficientDataError(ValueError):
    """Too few data points for the requested fit."""


class BudgetExceededError(RuntimeError):
    """A computation would exceed its configured evaluation budget."""
