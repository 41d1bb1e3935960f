"""Exception types raised across the package."""


class QcRelaxError(Exception):
    """Base class for all package errors."""


class NonFiniteBounds(QcRelaxError):
    """A continuous variable has an infinite bound; the instance is unsupported."""


class ConfigError(QcRelaxError, ValueError):
    """Invalid relaxation configuration (depths, lambda)."""


class DomainError(QcRelaxError, ValueError):
    """Argument outside the mathematical domain of a function."""


class ValidationError(QcRelaxError, ValueError):
    """Structurally invalid instance or model."""


class ValidationFailure(QcRelaxError):
    """A sampled feasible point failed to extend to a relaxation-feasible one.

    The offending original point and the worst violation are attached.
    """

    def __init__(self, message, point=None, violation=None):
        super().__init__(message)
        self.point = point
        self.violation = violation


class NumericalFailure(QcRelaxError):
    """The simplex engine stalled or hit its iteration cap."""


class ParseError(QcRelaxError, ValueError):
    """Malformed input file. ``line``/``column`` are 1-based when known."""

    def __init__(self, message, line=None, column=None):
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {column})" if column is not None else ")")
        super().__init__(message + where)
        self.line = line
        self.column = column
