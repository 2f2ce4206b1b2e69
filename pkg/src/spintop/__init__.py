"""Geometric spinning-particle models: Casimir conditions, Hessian degeneracy
and constrained Hamiltonian motion of a worldline with a null flag."""

from .errors import (
    ChartError,
    ClockReversalWarning,
    ConfigError,
    ConstraintError,
    DegenerateError,
    DomainError,
    ProjectionError,
    SpintopError,
    StepPolicyError,
    StepUnderflowError,
)

__version__ = "0.1.0"

__all__ = [
    "ChartError",
    "ClockReversalWarning",
    "ConfigError",
    "ConstraintError",
    "DegenerateError",
    "DomainError",
    "ProjectionError",
    "SpintopError",
    "StepPolicyError",
    "StepUnderflowError",
]
