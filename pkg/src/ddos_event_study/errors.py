"""Exception hierarchy for the event-study engine."""


class EventStudyError(ValueError):
    """Base class for all errors raised by this package."""


class PriceDataError(EventStudyError):
    """A price file is malformed or violates a series invariant."""


class InsufficientDataError(EventStudyError):
    """Not enough observations around an event to cut a window."""


class DegenerateRegressorError(EventStudyError):
    """The regressor of a market-model fit has zero variance."""


class DomainError(EventStudyError):
    """A return is at or below -1 where a gross return must be positive."""
