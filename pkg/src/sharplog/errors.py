"""Exception hierarchy shared by every module."""

from __future__ import annotations


class SharplogError(Exception):
    """Base class for all library errors."""


class DomainError(SharplogError, ValueError):
    """An argument lies outside the admissible parameter range."""


class UnsupportedOperation(SharplogError):
    """The requested operator is not defined for this segment kind."""


class DivergenceError(SharplogError, ArithmeticError):
    """A norm or integral is infinite for the given profile."""


class DegenerateContactError(SharplogError):
    """The matching system for the closed-form minimizer is singular."""


class InconsistentParameters(SharplogError):
    """Closed-form parameters fail their own feasibility or matching checks."""


class ScanFailure(SharplogError):
    """A constant scan could not establish the required bound."""

    def __init__(self, message: str, diagnostic: dict | None = None):
        super().__init__(message)
        self.diagnostic = diagnostic or {}


class BracketError(SharplogError):
    """Root bracketing found no sign change."""


class NonConvergence(SharplogError):
    """An iterative solver hit its iteration limit."""

    def __init__(self, message: str, trace: list | None = None):
        super().__init__(message)
        self.trace = trace or []


class SolverError(SharplogError):
    """A linear algebra step failed (singular or indefinite system)."""


class AssemblyError(SharplogError):
    """Finite element assembly met a degenerate element."""


class ResolutionError(SharplogError):
    """A quadrature or transform grid does not resolve the integrand."""


class WindowError(SharplogError):
    """Dyadic window too narrow: energy outside the window is not negligible."""


class ConstructionError(SharplogError):
    """A cutoff or auxiliary function failed its constraint checks."""
