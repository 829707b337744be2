"""Formula-free reference computations used to cross-check the separated solution."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg as sla

from .errors import InconsistentStep, InfeasibleBoundary, PreconditionError
from .matfun import as_matrix, moore_penrose, solve_mitra
from .pencil import find_gamma
from .problem import MixedProblem, SolverOptions
from .sturm import SLEigensystem, SLProblem, extend_to_boundary


@dataclass
class SteppedSolution:
    U: np.ndarray
    method: str


def _boundary_values(lhs: np.ndarray, rhs: np.ndarray, side: str) -> np.ndarray:
    if np.linalg.cond(lhs) < 1e12:
        return np.linalg.solve(lhs, rhs)
    sol = solve_mitra(lhs, moore_penrose(lhs), rhs, tol=1e-9)
    if not sol.consistent:
        raise InfeasibleBoundary(f"{side} boundary relation has no solution (residual {sol.residual:.3e})")
    return sol.particular


def _close_boundary(problem: MixedProblem, layer: np.ndarray) -> None:
    """Fill layer[0] and layer[N] from the two boundary relations, in place."""
    bc, N = problem.bc, problem.N
    layer[0] = _boundary_values(bc.A1 - N * bc.A2, -N * bc.A2 @ layer[1], "left")
    layer[N] = _boundary_values(bc.B1 + N * bc.B2, N * bc.B2 @ layer[N - 1], "right")


def step_nonsingular(problem: MixedProblem, cond_max: float = 1e10) -> SteppedSolution:
    """Explicit time stepping with E^-1; boundary nodes from the boundary relations."""
    E, A, N, M = problem.E, problem.A, problem.N, problem.M
    if np.linalg.cond(E) >= cond_max:
        raise PreconditionError("E is numerically singular; use step_singular")
    r2 = problem.r**2
    Einv = np.linalg.inv(E)
    U = np.zeros((N + 1, M + 1, problem.m), dtype=complex)
    U[1:N, 0] = problem.F[1:N]
    _close_boundary(problem, U[:, 0])
    U[1:N, 1] = problem.F[1:N] + problem.k * problem.G[1:N]
    _close_boundary(problem, U[:, 1])
    for j in range(1, M):
        cur = U[:, j]
        rhs = (cur[2:] + cur[:-2]) @ (r2 * A).T + cur[1:-1] @ (2.0 * (E - r2 * A)).T
        U[1:N, j + 1] = rhs @ Einv.T - U[1:N, j - 1]
        _close_boundary(problem, U[:, j + 1])
    return SteppedSolution(U, "explicit-nonsingular")


def _left_null(mat: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Rows spanning {l : l mat = 0}."""
    u, s, _ = np.linalg.svd(mat)
    rank = int(np.sum(s > tol * max(s[0], 1.0))) if s.size else 0
    return u[:, rank:].conj().T


class _LevelSystem:
    """Stacked equations for one unknown layer X = U(., j+1), flattened node-major."""

    def __init__(self, problem: MixedProblem, Ehat: np.ndarray, Ahat: np.ndarray, first: bool,
                 constrained: bool = True):
        N, m = problem.N, problem.m
        bc = problem.bc
        n = (N + 1) * m
        rows = []

        def block(i, mat):
            row = np.zeros((mat.shape[0], n), dtype=complex)
            row[:, i * m : (i + 1) * m] = mat
            return row

        interior = np.eye(m) if first else Ehat
        for i in range(1, N):
            rows.append(block(i, interior))
        rows.append(block(0, bc.A1 - N * bc.A2) + block(1, N * bc.A2))
        rows.append(block(N, bc.B1 + N * bc.B2) + block(N - 1, -N * bc.B2))
        # solvability of the next step: L Ahat (X(i+1) - 2X(i) + X(i-1)) = 0 with L Ehat = 0
        L = _left_null(Ehat) if constrained else np.zeros((0, m))
        if L.shape[0]:
            LA = L @ Ahat
            for i in range(1, N):
                rows.append(block(i + 1, LA) + block(i, -2 * LA) + block(i - 1, LA))
        self.K = np.vstack(rows)
        self.Kp = np.linalg.pinv(self.K, rcond=1e-12)
        self.shape = (N + 1, m)

    def solve(self, interior_rhs: np.ndarray, j: int, tol: float) -> np.ndarray:
        rhs = np.zeros(self.K.shape[0], dtype=complex)
        rhs[: interior_rhs.size] = interior_rhs.ravel()
        x = self.Kp @ rhs
        resid = float(np.linalg.norm(self.K @ x - rhs))
        scale = np.linalg.norm(self.K, 2) * np.linalg.norm(x) + np.linalg.norm(rhs)
        if resid > tol * max(scale, 1e-300):
            raise InconsistentStep(j, resid)
        return x.reshape(self.shape)


def step_singular(problem: MixedProblem, options: SolverOptions | None = None, tol: float = 1e-9) -> SteppedSolution:
    """Projected stepping of the premultiplied scheme with minimum-norm layer solves.

    Each layer is solved together with the boundary relations and the
    constraints that keep the following layer solvable.  A layer with no
    consistent solution raises InconsistentStep with its time level.
    """
    opts = options or SolverOptions()
    E, A, N, M = problem.E, problem.A, problem.N, problem.M
    gamma = opts.gamma if opts.gamma is not None else find_gamma(E, A, opts.cond_max)
    S = gamma * E + A
    Ehat, Ahat = np.linalg.solve(S, E), np.linalg.solve(S, A)
    r2 = problem.r**2
    U = np.zeros((N + 1, M + 1, problem.m), dtype=complex)

    # the stencil is applied from time level 1 on, so layer 0 carries no next-step constraint
    level0 = _LevelSystem(problem, Ehat, Ahat, first=True, constrained=False)
    level1 = _LevelSystem(problem, Ehat, Ahat, first=True)
    U[:, 0] = level0.solve(problem.F[1:N], 0, tol)
    U[:, 1] = level1.solve(problem.F[1:N] + problem.k * problem.G[1:N], 1, tol)
    if M >= 2:
        system = _LevelSystem(problem, Ehat, Ahat, first=False)
        for j in range(1, M):
            cur = U[:, j]
            rhs = (
                (cur[2:] + cur[:-2]) @ (r2 * Ahat).T
                + cur[1:-1] @ (2.0 * (Ehat - r2 * Ahat)).T
                - U[1:N, j - 1] @ Ehat.T
            )
            U[:, j + 1] = system.solve(rhs, j + 1, tol)
    return SteppedSolution(U, "projected-singular")


def _index(A: np.ndarray) -> int:
    """Smallest k with rank A^k = rank A^(k+1), ranks from numpy with power-scaled cutoffs."""
    m = A.shape[0]
    nrm = max(np.linalg.norm(A, 2), np.finfo(float).tiny)
    prev = m
    power = np.eye(m, dtype=A.dtype)
    for k in range(m + 1):
        nxt = power @ A
        rk = np.linalg.matrix_rank(nxt, tol=1e-10 * m * nrm ** (k + 1)) if np.any(nxt) else 0
        if rk == prev:
            return k
        prev, power = rk, nxt
    return m


def drazin_by_limit(A) -> np.ndarray:
    """A^D = A^k (A^(2k+1))^+ A^k with k the index of A.

    Singular values of A^(2k+1) below 1e-10 ||A||^(2k+1) are treated as zero,
    so a nilpotent A gives exactly 0 rather than an inverted rounding error.
    """
    A = as_matrix(A)
    m = A.shape[0]
    k = _index(A)
    Ak = np.linalg.matrix_power(A, k)
    big = np.linalg.matrix_power(A, 2 * k + 1)
    nrm = np.linalg.norm(A, 2)
    u, s, vh = np.linalg.svd(big)
    keep = s > 1e-10 * m * nrm ** (2 * k + 1)
    if not np.any(keep):
        return np.zeros_like(Ak)
    if s[keep][-1] / s[0] < 1e-8:
        warnings.warn("drazin_by_limit: A^(2k+1) is severely ill-conditioned, oracle unreliable", RuntimeWarning)
    pinv = (vh[keep].conj().T / s[keep]) @ u[:, keep].conj().T
    return Ak @ pinv @ Ak


def sl_dense_oracle(p: SLProblem) -> SLEigensystem:
    """Generalized dense eigensolve on all N+1 nodes; infinite eigenvalues dropped."""
    N = p.N
    aN, bN = p.alpha * N, p.beta * N
    K = np.zeros((N + 1, N + 1))
    Mm = np.zeros((N + 1, N + 1))
    K[0, 0], K[0, 1] = 1.0 - aN, aN
    K[N, N], K[N, N - 1] = 1.0 + bN, -bN
    for i in range(1, N):
        K[i, i - 1], K[i, i], K[i, i + 1] = -1.0, 2.0, -1.0
        Mm[i, i] = 1.0
    w, V = sla.eig(K, Mm)
    finite = np.isfinite(w)
    w, V = w[finite], V[:, finite]
    order = np.argsort(w.real)
    w, V = w[order].real, V[:, order].real
    vecs = []
    for col in V.T:
        inner = col[1:N] / np.linalg.norm(col[1:N])
        idx = np.flatnonzero(np.abs(inner) > 1e-8)[0]
        if inner[idx] < 0:
            inner = -inner
        vecs.append(inner)
    full = extend_to_boundary(p, np.array(vecs).T).T
    return SLEigensystem(p, w, full)


@dataclass
class CrossCheck:
    """Comparison of two solutions of the same discrete problem.

    ``nonunique`` means the two differ beyond tolerance while both satisfy
    the scheme and the difference solves the homogeneous problem.
    """

    agree: bool
    max_diff: float
    scale: float
    nonunique: bool
    difference_residual: float

    @property
    def passed(self) -> bool:
        return self.agree or self.nonunique

    def as_dict(self) -> dict:
        return {
            "agree": self.agree,
            "max_diff": self.max_diff,
            "scale": self.scale,
            "nonunique": self.nonunique,
            "difference_residual": self.difference_residual,
        }


def compare(U1, U2, problem: MixedProblem, tol: float = 1e-6, residual_tol: float = 1e-8) -> CrossCheck:
    from .solver import residual_scale, scheme_residual

    U1, U2 = np.asarray(U1), np.asarray(U2)
    scale = max(float(np.max(np.linalg.norm(U1, axis=-1), initial=0.0)), 1.0)
    diff = U1 - U2
    max_diff = float(np.max(np.linalg.norm(diff, axis=-1), initial=0.0))
    agree = max_diff <= tol * scale
    zero = np.zeros_like(problem.F)
    homog = replace(problem, F=zero, G=zero)
    dres = scheme_residual(diff, homog).worst
    nonunique = False
    if not agree:
        bound = residual_tol * residual_scale(problem)
        both_ok = scheme_residual(U1, problem).worst <= bound and scheme_residual(U2, problem).worst <= bound
        nonunique = both_ok and dres <= bound
    return CrossCheck(agree, max_diff, scale, nonunique, dres)


def cross_check(problem: MixedProblem, U, options: SolverOptions | None = None) -> CrossCheck:
    """Compare U against the stepped oracle suited to the problem (explicit when E is invertible)."""
    opts = options or SolverOptions()
    if np.linalg.cond(problem.E) < 1e10:
        ref = step_nonsingular(problem)
    else:
        ref = step_singular(problem, opts)
    return compare(U, ref.U, problem, residual_tol=opts.residual_tol)
