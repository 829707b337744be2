"""Stable discrete solutions of singular, strongly coupled hyperbolic matrix systems."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    DegenerateBoundary,
    HypothesisViolation,
    InadmissibleRho,
    InconsistentStep,
    InfeasibleBoundary,
    NumericalFailure,
    PencilSingular,
    PreconditionError,
    SingHypError,
    SpecError,
)
from .problem import BoundaryConditions, MixedProblem, SolverOptions  # noqa: E402
from .hypotheses import validate_all  # noqa: E402
from .solver import scheme_residual, solve, stability_sweep  # noqa: E402

__all__ = [
    "BoundaryConditions",
    "DegenerateBoundary",
    "HypothesisViolation",
    "InadmissibleRho",
    "InconsistentStep",
    "InfeasibleBoundary",
    "MixedProblem",
    "NumericalFailure",
    "PencilSingular",
    "PreconditionError",
    "SingHypError",
    "SolverOptions",
    "SpecError",
    "scheme_residual",
    "solve",
    "stability_sweep",
    "validate_all",
]
