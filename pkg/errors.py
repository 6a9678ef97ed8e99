"""
Exception hierarchy for stokes-summa.

Library code raises these; the command-line front end maps them to exit
codes (1 for validation/domain problems, 2 for numerical accuracy failures).
"""


class StokesSummaError(Exception):
    """Base class for every error raised by the package."""

    exit_code = 1

    def to_dict(self):
        return {"error": str(self), "type": type(self).__name__}


class ValidationError(StokesSummaError):
    """Malformed input: bad JSON, unknown config fields, invalid parameters."""


class DomainError(StokesSummaError):
    """An operation was asked for a value outside its mathematical domain."""


class SingularEvaluationError(DomainError):
    """A function was evaluated at (or numerically on top of) a singular point."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class SingularRayError(DomainError):
    """The integrand of a ray integral is singular on the integration ray."""

    def __init__(self, message, direction=None, location=None):
        super().__init__(message)
        self.direction = direction
        self.location = location

    def to_dict(self):
        data = super().to_dict()
        if self.direction is not None:
            data["direction"] = self.direction
        return data


class AccuracyError(StokesSummaError):
    """A quadrature or series evaluation could not reach the requested tolerance."""

    exit_code = 2

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error

    def to_dict(self):
        data = super().to_dict()
        if self.error is not None:
            data["achieved_error"] = float(self.error)
        return data
