"""Exception types shared across the package."""

from __future__ import annotations


class DomainError(ValueError):
    """An argument lies outside the domain an operation accepts."""


class DegenerateInputError(DomainError):
    """Input is geometrically degenerate (e.g. collinear points for a circle fit)."""


class SolverError(RuntimeError):
    """A constrained solve failed.

    ``result`` carries the last iterate when one is available.
    """

    def __init__(self, message: str, result=None):
        super().__init__(message)
        self.result = result


class ConvergenceError(SolverError):
    pass


class SingularSystemError(SolverError):
    pass
