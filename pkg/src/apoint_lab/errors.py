"""Exception and warning types shared across the lab."""

from __future__ import annotations


class LabError(Exception):
    """Base class for every error raised by apoint_lab."""


class DomainError(LabError, ValueError):
    """An argument lies outside the documented domain of an operation."""


class PoleError(DomainError):
    """Evaluation requested at the pole s = 1 of zeta."""


class CapacityError(DomainError):
    """A size or cost limit would be exceeded."""


class NumericalError(LabError, ArithmeticError):
    """A numerical procedure failed (non-convergence, lost roots, ...)."""


class ConvergenceError(NumericalError):
    pass


class CoverageError(NumericalError):
    """A zero list does not cover the window an operation needs."""


class MissingZeroError(NumericalError):
    """Zero count disagrees with the Riemann-von Mangoldt main term."""


class BoundaryProximityError(NumericalError):
    """zeta(s) - a came too close to 0 on an argument-principle contour."""


class SaturatedError(NumericalError):
    """log|zeta| diverges because the ordinate sits on a zero."""


class PrecisionWarning(UserWarning):
    pass


class IncompleteCaptureWarning(UserWarning):
    """Newton search found fewer a-points than the argument principle counts."""
