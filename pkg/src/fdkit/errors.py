"""Exception types shared across the toolkit.

Everything derives from ValueError so callers that don't care about the
taxonomy can catch the usual thing. The CLI maps InvalidParameterError to
exit code 1, DataError subclasses to 2, anything else to 3.
"""

from __future__ import annotations


class FdkitError(ValueError):
    """Base class for all toolkit errors."""


class InvalidParameterError(FdkitError):
    """A parameter is out of range, non-finite, or otherwise unusable."""


class PoleError(InvalidParameterError):
    """Gamma-function route hit a pole (integer d); use the recursive route."""


class DataError(FdkitError):
    """Base class for problems with the input data rather than the call."""


class EmptyInputError(DataError):
    """An operation received no data."""


class InsufficientDataError(DataError):
    """Not enough observations; carries the minimum length required."""

    def __init__(self, message: str, required: int):
        super().__init__(message)
        self.required = required


class DomainError(DataError):
    """A value is outside the mathematical domain (e.g. log of <= 0)."""


class IngestionError(DataError):
    """CSV rows violated the schema; carries all offending line numbers."""

    def __init__(self, message: str, lines=()):
        super().__init__(message)
        self.lines = tuple(lines)


class MissingDataError(DataError):
    """A lookup (e.g. sentiment for a date) found nothing."""


class DegenerateInputError(DataError):
    """Input has no variation where variation is required."""


class DegenerateLabelsError(DataError):
    """Labels contain a single class where both are required."""


class UndefinedAUCError(DataError):
    """ROC AUC is undefined because one class is absent."""


class SingularRegressionError(DataError):
    """Regression design matrix is perfectly collinear."""


class NoStationaryDError(DataError):
    """No d in the scanned grid passed the stationarity test.

    Carries the row that came closest (lowest ADF p-value) so callers can
    report how near the grid came to passing.
    """

    def __init__(self, message: str, best_row):
        super().__init__(message)
        self.best_row = best_row
