"""Exception types raised by povminfo."""


class DomainError(ValueError):
    """An argument lies outside its mathematical domain."""

    def __init__(self, parameter, value, message=None):
        self.parameter = parameter
        self.value = value
        super().__init__(message or f"{parameter}={value!r} is out of range")


class ValidationError(ValueError):
    """A measurement violates completeness or overlap preservation."""

    def __init__(self, message, residuals=None):
        self.residuals = dict(residuals or {})
        super().__init__(message)


class DegenerateSpanError(ValueError):
    """The two states are parallel, so the effective span is one-dimensional."""


class InfeasibleError(RuntimeError):
    """No restart produced a point satisfying the constraints."""


class EmptyReportError(ValueError):
    """Every outcome fell under the probability floor."""
