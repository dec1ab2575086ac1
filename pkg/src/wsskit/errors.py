"""Exception types shared across the toolkit."""


class WsskitError(Exception):
    """Base class for all toolkit errors."""


class ParseError(WsskitError):
    """A corpus or config file could not be parsed.

    Carries the file and line number of the offending record.
    """

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        if path is not None and line is not None:
            message = f"{path}:{line}: {message}"
        super().__init__(message)


class ValidationError(WsskitError):
    """A dataset invariant is violated; the message names the offending id."""


class NotFound(WsskitError, KeyError):
    """A referenced id does not exist in the dataset."""

    def __str__(self):
        # KeyError quotes its argument; keep the plain message.
        return Exception.__str__(self)


class CalibrationError(WsskitError):
    """Threshold calibration cannot run (e.g. one-class validation set)."""


class TrainingError(WsskitError):
    """A trainer precondition failed (e.g. missing a label class)."""


class ShapeError(WsskitError, ValueError):
    """Matrix or vector dimensions are inconsistent."""


class ComparisonError(WsskitError):
    """Group comparison received an empty group."""


class TooLarge(WsskitError):
    """An exhaustive routine was asked to run past its size guard."""


class ArgumentError(WsskitError, ValueError):
    """An argument is out of range for the operation."""
