"""Exception types raised by qszilard."""


class QSzilardError(Exception):
    """Base class for all library errors."""


class DomainError(QSzilardError, ValueError):
    """An argument lies outside the domain of the operation."""


class UnsupportedOperationError(QSzilardError):
    """The operation is not defined for the given potential model."""


class TruncationError(QSzilardError):
    """A partition sum could not reach the requested tolerance.

    ``achieved`` holds the best certified relative tail bound.
    """

    def __init__(self, message, achieved=float("nan")):
        super().__init__(message)
        self.achieved = achieved


class NumericalLossError(QSzilardError):
    """Cancellation destroyed the significance of a result."""

    def __init__(self, message, quantity=""):
        super().__init__(message)
        self.quantity = quantity


class CapacityError(QSzilardError):
    """Brute-force enumeration was asked for more than it handles."""


class InternalConsistencyError(QSzilardError):
    """Two independent routes to the same quantity disagree."""


class FitDomainError(QSzilardError):
    """The data handed to a scaling fit is outside its valid regime."""


class ConfigError(QSzilardError):
    """A scenario file is malformed."""


class PerturbativeRangeWarning(UserWarning):
    """The high-temperature expansion is used where b is not small."""
