"""Defines a common set of exceptions which callers can raise and/or catch."""

from __future__ import annotations

from typing import Any


class RoughHarmonicsError(Exception):
    """Base class for all library errors."""


class DomainError(RoughHarmonicsError, ValueError):
    """Raised when an argument lies outside the domain of an operation."""


class UnsupportedDimensionError(DomainError):
    """Raised when an operation is only implemented for other sphere dimensions."""


class IncompatibleVariantError(DomainError):
    """Raised when a series or instance variant does not fit the requested dimension."""


class SupportError(DomainError):
    """Raised when a ball, bump or rule does not fit inside its region of validity."""


class HarmonicOverflowError(RoughHarmonicsError, OverflowError):
    """Raised when a dimension count or recurrence leaves the representable range."""


class InsufficientQuadratureError(RoughHarmonicsError):
    """Raised when a quadrature rule or sample grid cannot resolve the request."""


class KelvinTransformError(RoughHarmonicsError):
    """Raised when a Kelvin transform is applied to an exterior series."""


class TruncationError(RoughHarmonicsError):
    """Raised when no truncation can meet the requested tolerance."""


class NumericalError(RoughHarmonicsError, ArithmeticError):
    """Raised when an iterative solver exhausts its iteration budget."""


class ConfigValidationError(RoughHarmonicsError):
    """Raised when a user's config settings fail validation."""


class VerificationFailed(RoughHarmonicsError):
    """Raised when an experiment's verification report does not pass."""

    def __init__(self, message: str, report: Any = None) -> None:
        """Extends the default with the failed report as an attribute.

        Args:
            message: The error message.
            report: The report object that failed.
        """
        super().__init__(message)
        self.report = report
