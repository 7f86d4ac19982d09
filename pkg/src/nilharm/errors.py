"""Exception types shared across the package."""


class NilharmError(Exception):
    pass


class DimensionError(NilharmError, ValueError):
    """Array lengths do not conform to the algebra."""


class NondegeneracyError(NilharmError):
    """B_lambda is (numerically) degenerate at the requested functional."""


class TruncationError(NilharmError):
    """An integrand has not decayed at the edge of its quadrature box."""


class GroupFileError(NilharmError, ValueError):
    """Malformed group-definition text."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
