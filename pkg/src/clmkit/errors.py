"""Exception hierarchy shared by every engine."""

from __future__ import annotations


class ClmError(Exception):
    """Base class for all package errors."""


class InvalidSpecError(ClmError, ValueError):
    """A model or parameter specification is malformed."""


class NoFieldError(ClmError, ValueError):
    """B = 0: no continuum Landau mode exists."""


class CoverageError(ClmError, ValueError):
    """An evaluation grid does not cover the object being sampled."""


class DegenerateDriftError(ClmError, ValueError):
    """The envelope drift coefficient vanishes, so no gaussian envelope exists."""


class InsufficientDataError(ClmError, ValueError):
    """Too few samples survive filtering for a meaningful fit."""


class ConvergenceError(ClmError, RuntimeError):
    """QR iteration failed to converge.

    Attributes
    ----------
    partial_values : ndarray
        Eigenvalues that did converge before the iteration budget ran out.
    sweeps : int
        Number of QR sweeps performed.
    """

    def __init__(self, message, partial_values=None, sweeps=0):
        super().__init__(message)
        self.partial_values = partial_values
        self.sweeps = sweeps


class ResonanceError(ClmError, ArithmeticError):
    """The driven system is singular, or nearly so, at the given frequency."""

    def __init__(self, omega, min_pivot=None, threshold=None):
        msg = f"near-singular response system at omega={omega!r}"
        if min_pivot is not None:
            msg += f" (min pivot {min_pivot:.3e} < {threshold:.3e})"
        super().__init__(msg)
        self.omega = omega
        self.min_pivot = min_pivot


class StabilityError(ClmError, ValueError):
    """The requested time step exceeds the explicit stability limit."""


class DivergenceError(ClmError, ArithmeticError):
    """The integrated field became non-finite."""

    def __init__(self, t):
        super().__init__(f"field diverged (non-finite values) at t={t:.6g}")
        self.t = t


class UsageError(ClmError, ValueError):
    """Bad command-line or configuration input."""
