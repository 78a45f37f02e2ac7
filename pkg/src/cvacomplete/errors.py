"""Exception hierarchy.

Two families map onto the CLI exit codes: ``InputError`` (bad data, bad
arguments, exit 1) and ``NumericalError`` (calibration or integration
failure, exit 2).
"""


class CvaError(Exception):
    """Base class for every error raised by this package."""


class InputError(CvaError, ValueError):
    pass


class DomainError(InputError):
    """An argument lies outside the domain of the function."""


class ScheduleError(InputError):
    """Times are not strictly increasing, or a schedule is empty/irregular."""


class ConfigError(InputError):
    """Required inputs for a mode or command are missing."""


class ParseError(InputError):
    """A data file could not be read; carries file, line and column."""

    def __init__(self, path, message, line=None, column=None):
        self.path = str(path)
        self.line = line
        self.column = column
        where = self.path
        if line is not None:
            where += f":{line}"
        if column is not None:
            where += f" (column '{column}')"
        super().__init__(f"{where}: {message}")


class NumericalError(CvaError, ArithmeticError):
    pass


class CalibrationError(NumericalError):
    """Hazard bootstrap could not reprice a quote."""

    def __init__(self, message, maturity=None):
        self.maturity = maturity
        super().__init__(message)


class ArbitrageError(CalibrationError):
    """Quotes imply a negative hazard rate."""
