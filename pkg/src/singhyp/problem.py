"""Problem data: coefficient matrices, boundary operators, grids and solver options."""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import PreconditionError
from .matfun import as_matrix

#: Environment variable that overrides the default residual tolerance.
TOL_ENV = "SINGHYP_TOL"


def _default_residual_tol() -> float:
    raw = os.environ.get(TOL_ENV)
    if raw is None:
        return 1e-8
    try:
        value = float(raw)
    except ValueError as exc:
        raise PreconditionError(f"{TOL_ENV}={raw!r} is not a number") from exc
    if not value > 0:
        raise PreconditionError(f"{TOL_ENV} must be positive")
    return value


@dataclass(frozen=True)
class SolverOptions:
    gamma: complex | None = None
    rank_tol: float = 1e-12
    residual_tol: float = field(default_factory=_default_residual_tol)
    eps_growth: float = 0.1
    halvings: int = 5
    cond_max: float = 1e8

    def __post_init__(self):
        for name in ("rank_tol", "residual_tol", "eps_growth", "cond_max"):
            if not getattr(self, name) > 0:
                raise PreconditionError(f"option {name} must be positive")
        if self.halvings < 0:
            raise PreconditionError("halvings must be nonnegative")


@dataclass(frozen=True)
class BoundaryConditions:
    """``A1 u(0) + A2 u_x(0) = 0`` and ``B1 u(1) + B2 u_x(1) = 0``."""

    A1: np.ndarray
    A2: np.ndarray
    B1: np.ndarray
    B2: np.ndarray

    def __post_init__(self):
        mats = [as_matrix(getattr(self, n)) for n in ("A1", "A2", "B1", "B2")]
        if len({m.shape for m in mats}) != 1:
            raise PreconditionError("boundary matrices must share one square shape")
        for name, mat in zip(("A1", "A2", "B1", "B2"), mats):
            object.__setattr__(self, name, mat)

    @property
    def m(self) -> int:
        return self.A1.shape[0]

    @classmethod
    def robin(cls, m: int, alpha: float, beta: float) -> "BoundaryConditions":
        """Componentwise ``u + alpha u_x = 0`` at x=0 and ``u + beta u_x = 0`` at x=1 (G = 0)."""
        eye = np.eye(m)
        return cls(eye, alpha * eye, eye, beta * eye)


@dataclass(frozen=True)
class MixedProblem:
    """Discrete mixed problem on the grid x_i = i/N, t_j = j*k, 0 <= j <= M = round(T/k).

    ``F`` and ``G`` hold the samples f(ih), g(ih) for i = 0..N, shape (N+1, m).
    """

    E: np.ndarray
    A: np.ndarray
    bc: BoundaryConditions
    alpha: float
    beta: float
    N: int
    k: float
    T: float
    F: np.ndarray
    G: np.ndarray

    def __post_init__(self):
        E, A = as_matrix(self.E), as_matrix(self.A)
        if E.shape != A.shape or self.bc.m != E.shape[0]:
            raise PreconditionError("E, A and boundary matrices must have the same size")
        object.__setattr__(self, "E", E)
        object.__setattr__(self, "A", A)
        if int(self.N) != self.N or self.N < 3:
            raise PreconditionError("N must be an integer >= 3")
        if not (np.isfinite(self.k) and self.k > 0 and np.isfinite(self.T) and self.T > 0):
            raise PreconditionError("k and T must be finite and positive")
        if self.M < 1:
            raise PreconditionError("T/k must give at least one time step")
        for name in ("F", "G"):
            grid = np.array(getattr(self, name), dtype=complex)
            if grid.shape != (self.N + 1, self.m):
                raise PreconditionError(f"{name} must have shape {(self.N + 1, self.m)}, got {grid.shape}")
            if not np.all(np.isfinite(grid)):
                raise PreconditionError(f"{name} has non-finite entries")
            object.__setattr__(self, name, grid)

    @property
    def m(self) -> int:
        return self.E.shape[0]

    @property
    def M(self) -> int:
        return int(round(self.T / self.k))

    @property
    def h(self) -> float:
        return 1.0 / self.N

    @property
    def r(self) -> float:
        return self.k * self.N

    @property
    def data_scale(self) -> float:
        return max(float(np.max(np.abs(self.F), initial=0.0)), float(np.max(np.abs(self.G), initial=0.0)))

    def with_steps(self, M: int) -> "MixedProblem":
        """Same horizon T resolved with M time steps."""
        return replace(self, k=self.T / M)

    def with_data(self, F=None, G=None) -> "MixedProblem":
        return replace(self, F=self.F if F is None else F, G=self.G if G is None else G)
