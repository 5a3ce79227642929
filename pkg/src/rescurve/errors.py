"""Exception hierarchy shared across the package."""


class RescurveError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(RescurveError):
    """An argument lies outside the mathematical domain of an operation."""


class DepletionError(RescurveError):
    """A quantity at or beyond the technical potential was requested.

    The marginal cost diverges there, so no finite answer exists.
    """

    def __init__(self, message, feasible=None):
        super().__init__(message)
        self.feasible = feasible  # largest quantity that is still available


class DegenerateAnchors(RescurveError):
    """Two anchor points coincide in cost or in quantile."""


class InfeasibleAnchors(RescurveError):
    """Anchor points admit no distribution with positive cost scale."""


class MonotonicityError(RescurveError):
    """Cumulative data points are not non-decreasing."""


class DegenerateData(RescurveError):
    """Fit input carries too little information to determine a curve."""


class UnitError(RescurveError):
    """Mismatched or unknown units."""


class EnvelopeError(RescurveError):
    """Lower/mode/upper curves violate the required ordering."""


class WeightError(RescurveError):
    """Proxy weights sum to zero over the countries being split."""


class CoverageError(RescurveError):
    """A region set references countries with no curve available."""

    def __init__(self, message, missing=()):
        super().__init__(message)
        self.missing = tuple(missing)


class ParseError(RescurveError):
    """A data file does not match its documented schema."""

    def __init__(self, message, row=None):
        if row is not None:
            message = f"{message} (row {row})"
        super().__init__(message)
        self.row = row


class ValidationError(RescurveError):
    """Loaded data violates a consistency rule (negative amount, bad checksum)."""


class RecipeError(RescurveError):
    """A scenario recipe references an occurrence/confidence class that is absent."""
