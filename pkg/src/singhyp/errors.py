"""Exception hierarchy shared by the library and the CLI exit-code mapping."""


class SingHypError(Exception):
    """Base class for every error raised by this package."""


class NumericalFailure(SingHypError):
    """A decomposition or iteration did not reach the required accuracy."""


class PreconditionError(SingHypError, ValueError):
    """An input violates the documented precondition of an operation."""


class DegenerateBoundary(PreconditionError):
    """alpha*N == 1 or beta*N == -1: the Sturm-Liouville corner entries blow up."""


class PencilSingular(SingHypError):
    """No shift gamma makes gamma*E + A numerically invertible."""


class InadmissibleRho(PreconditionError):
    """rho*d*(1 + rho*d/4) vanishes for some nonzero d: the mode system is singular."""


class HypothesisViolation(SingHypError):
    """The mode systems for P_l, Q_l are inconsistent (data conditions not met)."""


class InfeasibleBoundary(SingHypError):
    """The boundary relations admit no solution for the given interior values."""


class InconsistentStep(SingHypError):
    """Time stepping found no consistent continuation at time level ``j``."""

    def __init__(self, j: int, residual: float):
        super().__init__(f"inconsistent linear system at time level j={j} (residual {residual:.3e})")
        self.j = j
        self.residual = residual


class SpecError(SingHypError, ValueError):
    """A problem specification file is malformed or dimensionally inconsistent."""
