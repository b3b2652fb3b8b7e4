"""Exception hierarchy shared across the package."""

from __future__ import annotations


class CondensateError(Exception):
    """Base class for all package errors."""


class ConfigurationError(CondensateError):
    """Invalid parameter, grid bound, or config file entry."""


class NumericError(CondensateError):
    """Non-finite values where finite ones are required."""


class RangeError(CondensateError):
    """Evaluation point outside the discretized domain."""


class StructuralError(CondensateError):
    """Operands built on different grids."""


class ResolutionError(CondensateError):
    """Too few nodes or checkpoints to evaluate a diagnostic."""


class HeadUnavailableError(CondensateError):
    """Leading density values are nonpositive; no power-law head fit."""


class SubcriticalMassError(CondensateError):
    """Total mass below the condensation threshold.

    Carries the critical mass so callers can report how far below
    threshold the configuration is.
    """

    def __init__(self, message: str, critical_mass: float):
        super().__init__(message)
        self.critical_mass = critical_mass


class BlowUpError(CondensateError):
    """Density exceeded the configured cap during time stepping."""

    def __init__(self, message: str, t: float, x: float, value: float):
        super().__init__(message)
        self.t = t
        self.x = x
        self.value = value


class StiffnessError(CondensateError):
    """Adaptive step size underflowed."""


class OracleError(CondensateError):
    """Reference computation failed to converge."""


class FitWindowError(CondensateError):
    """Fit window has too few usable (positive) profile values."""


class DegenerateWindowError(CondensateError):
    """Fit basis is rank deficient on the window."""
