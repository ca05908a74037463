"""Exception types shared across the package."""


class CurveDecayError(Exception):
    """Base class for all package errors."""


class DomainError(CurveDecayError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class CapabilityError(CurveDecayError):
    """The request exceeds what this implementation supports."""


class DegeneracyError(CurveDecayError):
    """Derivative vectors fail the required linear independence."""

    def __init__(self, message, failing_order=None):
        super().__init__(message)
        self.failing_order = failing_order


class FitError(CurveDecayError):
    """The regression design is too ill-conditioned to fit."""


class ConfigError(CurveDecayError, ValueError):
    """An experiment configuration file violates the schema."""
