"""Discrete Sturm-Liouville problem with Robin-type boundary parameters.

The recurrence ``h(i+1) - (2 - lam) h(i) + h(i-1) = 0`` for ``0 < i < N`` with

    h(0) + alpha*N*(h(1) - h(0)) = 0
    h(N) + beta*N*(h(N) - h(N-1)) = 0

is eliminated to an (N-1)x(N-1) tridiagonal eigenproblem.  Only the corner
diagonal entries depend on (alpha, beta), so the matrix is real symmetric
for every admissible pair.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import DegenerateBoundary, PreconditionError

_DENOM_TOL = 1e-12


@dataclass(frozen=True)
class SLProblem:
    N: int
    alpha: float
    beta: float

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 3:
            raise PreconditionError(f"N must be an integer >= 3, got {self.N}")
        if abs(1.0 - self.alpha * self.N) <= _DENOM_TOL:
            raise DegenerateBoundary(f"alpha*N = 1 (alpha={self.alpha}, N={self.N})")
        if abs(1.0 + self.beta * self.N) <= _DENOM_TOL:
            raise DegenerateBoundary(f"beta*N = -1 (beta={self.beta}, N={self.N})")

    def corners(self) -> tuple[float, float]:
        aN, bN = self.alpha * self.N, self.beta * self.N
        return (2.0 - aN) / (1.0 - aN), (2.0 + bN) / (1.0 + bN)


def sl_diagonals(p: SLProblem) -> tuple[np.ndarray, np.ndarray]:
    d = np.full(p.N - 1, 2.0)
    d[0], d[-1] = p.corners()
    return d, -np.ones(p.N - 2)


def build_sl_matrix(p: SLProblem) -> np.ndarray:
    d, e = sl_diagonals(p)
    return np.diag(d) + np.diag(e, 1) + np.diag(e, -1)


def extend_to_boundary(p: SLProblem, interior: np.ndarray) -> np.ndarray:
    """Append h(0) and h(N) obtained from the two boundary relations.

    ``interior`` holds h(1..N-1) along its first axis.
    """
    interior = np.asarray(interior)
    aN, bN = p.alpha * p.N, p.beta * p.N
    h0 = -aN * interior[0] / (1.0 - aN)
    hN = bN * interior[-1] / (1.0 + bN)
    return np.concatenate([h0[None, ...], interior, hN[None, ...]], axis=0)


@dataclass(frozen=True)
class SLEigensystem:
    """Eigenvalues (ascending) and eigenfunctions sampled on i = 0..N.

    ``vectors[l]`` is the l-th eigenfunction (0-based l); the interior slice
    ``vectors[l, 1:N]`` has unit Euclidean norm and a positive first
    nonzero entry.
    """

    problem: SLProblem
    eigenvalues: np.ndarray
    vectors: np.ndarray

    @property
    def N(self) -> int:
        return self.problem.N

    @property
    def interior(self) -> np.ndarray:
        return self.vectors[:, 1 : self.N]

    def __len__(self) -> int:
        return len(self.eigenvalues)


def _fix_sign(v: np.ndarray) -> np.ndarray:
    idx = np.flatnonzero(np.abs(v) > 1e-8 * np.max(np.abs(v)))[0]
    return v if v[idx] > 0 else -v


def solve_sl(p: SLProblem) -> SLEigensystem:
    d, e = sl_diagonals(p)
    w, V = sla.eigh_tridiagonal(d, e)
    V = np.column_stack([_fix_sign(V[:, l] / np.linalg.norm(V[:, l])) for l in range(V.shape[1])])
    full = extend_to_boundary(p, V).T
    return SLEigensystem(p, w, full)


def recurrence_residuals(es: SLEigensystem) -> tuple[float, float, float]:
    """Worst (interior recurrence, left boundary, right boundary) residual over all pairs."""
    p = es.problem
    v = es.vectors
    lam = es.eigenvalues[:, None]
    interior = v[:, 2:] - (2.0 - lam) * v[:, 1:-1] + v[:, :-2]
    left = v[:, 0] + p.alpha * p.N * (v[:, 1] - v[:, 0])
    right = v[:, -1] + p.beta * p.N * (v[:, -1] - v[:, -2])
    return float(np.max(np.abs(interior))), float(np.max(np.abs(left))), float(np.max(np.abs(right)))


def _interior_values(u: np.ndarray, N: int) -> np.ndarray:
    u = np.asarray(u)
    if u.shape[0] == N + 1:
        return u[1:N]
    if u.shape[0] == N - 1:
        return u
    raise PreconditionError(f"grid has {u.shape[0]} nodes, expected {N - 1} interior or {N + 1} total")


def expand(u, es: SLEigensystem) -> np.ndarray:
    """Coefficients c_l = sum_i v_l(i) u(i) / sum_i v_l(i)^2 over interior nodes.

    ``u`` may be given on the N-1 interior nodes or on all N+1 nodes (the
    boundary values are then ignored).
    """
    vi = es.interior
    norms = np.sum(vi**2, axis=1)
    if np.any(norms == 0.0):
        raise ArithmeticError("eigenfunction with zero norm")
    return (vi @ _interior_values(u, es.N)) / norms


def expand_vector(F, es: SLEigensystem) -> np.ndarray:
    """Per-mode vectors F_l (shape (N-1, m)) of a grid of C^m vectors."""
    F = np.asarray(F, dtype=complex)
    vi = es.interior
    norms = np.sum(vi**2, axis=1)
    return (vi @ _interior_values(F, es.N)) / norms[:, None]


def reconstruct(coeffs, es: SLEigensystem, boundary: bool = False) -> np.ndarray:
    """Inverse of :func:`expand` / :func:`expand_vector`."""
    v = es.vectors if boundary else es.interior
    return np.tensordot(v, np.asarray(coeffs), axes=(0, 0))
