"""Exception hierarchy.

CLI exit codes map onto these classes: ``ConfigError`` -> 2,
``DomainError`` (and its ``ChartError`` subclass) -> 3, anything else -> 1.
"""


class SpintopError(Exception):
    """Base class for all library errors."""


class ConfigError(SpintopError, ValueError):
    """Malformed or schema-violating run configuration."""


class DomainError(SpintopError, ValueError):
    """Input outside the declared domain of an operation."""


class ChartError(DomainError):
    """Euler-angle chart singularity, superluminal or grazing state."""


class DegenerateError(DomainError):
    """A quantity that must be nonzero (p.p, k.xdot, a factor) vanished."""


class ConstraintError(SpintopError):
    """Phase point off the constraint surface, or inconsistent rates."""


class ProjectionError(ConstraintError):
    """Newton projection onto the constraint surface did not converge."""


class StepUnderflowError(SpintopError):
    """Adaptive step size fell below the representable minimum."""


class StepPolicyError(SpintopError):
    """Richardson extrapolation levels disagree beyond tolerance."""


class ClockReversalWarning(RuntimeWarning):
    """Centre-of-momentum time runs backwards along a trajectory."""
