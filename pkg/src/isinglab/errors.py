"""Exception types shared across the package."""


class IsinglabError(Exception):
    """Base class for errors raised by this package."""


class SizeError(IsinglabError):
    """An exact computation was requested beyond its enumeration cap."""


class BudgetError(IsinglabError):
    """An exploration exceeded its node or visit budget."""


class ConditioningError(IsinglabError):
    """A conditioning event has probability zero or contradicts a clamp."""


class MonotonicityError(IsinglabError):
    """The coupled pair of chains left the ordered region X >= Y."""
