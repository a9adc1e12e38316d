"""Elastic regular polygon pressed against a rigid flat surface."""

from .analysis import (
    CircleFit,
    SweepRecord,
    apparent_height,
    convergence_study,
    fit_circle,
    force_sweep,
    relaxation_study,
)
from .contact import DeformedConfig, detect_contacts, indent, relax
from .energy import ElasticParams, EnergyModel, build_model
from .errors import ConvergenceError, DegenerateInputError, DomainError, SingularSystemError, SolverError
from .geometry import Polygon, bending_constant, build_polygon, edge_vectors
from .solver import ConstraintSet, SolveResult, SolverOptions, solve_equality, solve_oracle, solve_pdas, uniform_load

__all__ = [
    "CircleFit",
    "ConstraintSet",
    "ConvergenceError",
    "DeformedConfig",
    "DegenerateInputError",
    "DomainError",
    "ElasticParams",
    "EnergyModel",
    "Polygon",
    "SingularSystemError",
    "SolveResult",
    "SolverError",
    "SolverOptions",
    "SweepRecord",
    "apparent_height",
    "bending_constant",
    "build_model",
    "build_polygon",
    "convergence_study",
    "detect_contacts",
    "edge_vectors",
    "fit_circle",
    "force_sweep",
    "indent",
    "relax",
    "relaxation_study",
    "solve_equality",
    "solve_oracle",
    "solve_pdas",
    "uniform_load",
]
