"""Exception types shared across the package."""

from __future__ import annotations


class XpmsimError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(XpmsimError, ValueError):
    """A scalar argument is outside its admissible range."""


class ModeError(XpmsimError, ValueError):
    """Velocity configuration does not match the requested propagation mode."""


class ProfileError(XpmsimError, ValueError):
    """Pulse profile unsupported by the requested operation."""


class GridMismatchError(ParameterError):
    """Two states that must share sampling grids do not."""


class NormalizationError(XpmsimError):
    """An operation that requires unit-norm input received an unnormalized state."""


class DegenerateStateError(XpmsimError):
    """State norm too small to normalize meaningfully."""


class DegeneratePhaseError(XpmsimError):
    """Conditional phase undefined: overlap numerator and denominator both vanish."""


class CoefficientError(XpmsimError):
    """Overlap coefficients violate the positivity constraints of the closed forms."""


class AccuracyError(XpmsimError):
    """Quadrature failed to converge to the requested tolerance.

    Carries both estimates so the caller can inspect the discrepancy.
    """

    def __init__(self, message: str, coarse: complex | float | None = None,
                 fine: complex | float | None = None):
        super().__init__(message)
        self.coarse = coarse
        self.fine = fine


class TruncationError(XpmsimError):
    """Series truncated before reaching the requested tolerance."""


class ConfigError(XpmsimError):
    """Run configuration file or override could not be parsed or validated."""


class ApproximationWarning(UserWarning):
    """Parameters have drifted outside the validity band of an approximation."""
