"""Exception taxonomy shared across the package."""


class TwistfillError(Exception):
    pass


class InessentialCurve(TwistfillError):
    """Raised when a curve class is null-homotopic or boundary-parallel."""


class ResourceCap(TwistfillError):
    """An overlay or search exceeded the configured desk-scale limits."""


class UnknownGenerator(TwistfillError):
    pass


class UnliftableGenerator(TwistfillError):
    pass


class SearchExhausted(TwistfillError):
    """Candidate pool ran out before all certificate checks were met."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class TemplateUnavailable(TwistfillError):
    pass


class SlopeTooShort(TwistfillError):
    """Filling slope not longer than 2*pi; the length bound is inapplicable."""


class OracleInconsistent(TwistfillError):
    pass


class Stalled(TwistfillError):
    pass
