"""Exception types raised across the package."""


class LtddmError(Exception):
    """Base class for all package errors."""


class HorizonMismatch(LtddmError, ValueError):
    """Two event streams that must be aligned have different lengths."""


class DimensionMismatch(LtddmError, ValueError):
    """A stimulus, weight or accumulator vector has the wrong length."""


class DegenerateWindow(LtddmError, ValueError):
    """A timing correction was requested over an empty accumulation window."""


class ZeroAccumulator(LtddmError, ValueError):
    """No evidence has been accumulated, so there is nothing to attribute error to."""


class InvalidPeriod(LtddmError, ValueError):
    """A synthetic stream's period does not fit in its horizon."""


class InsufficientHistory(LtddmError, ValueError):
    """Too few samples for a rolling-window computation."""


class ParseError(LtddmError, ValueError):
    """An input file could not be parsed.

    Parameters
    ----------
    message : str
        What went wrong.
    line : int, optional
        1-based line (row) number of the offending input.
    column : int, optional
        1-based column number of the offending cell.
    """

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = []
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


class UnsupportedToken(ParseError):
    """A kern token outside the supported monophonic subset."""
