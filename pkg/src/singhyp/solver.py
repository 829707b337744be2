"""Separated solution of the discrete mixed problem, its residuals and the stability sweep.

Each Sturm-Liouville mode l carries a temporal sequence

    c_l(j) = Z0^j P_l + Z1^j Q_l + j k R_l

where ``R_l`` lives on the drift subspace (core directions with ``A x = 0``),
on which both propagators are the identity.  The initial conditions
``c_l(0) = F_l`` and ``c_l(1) - c_l(0) = k G_l`` give

    (Z1 - Z0) P_l = (Z1 - I) F_l - k G_l
    (Z1 - Z0) Q_l = k G_l - (Z0 - I) F_l

on the wave subspace, solved with a group inverse after Mitra's consistency test.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import HypothesisViolation, InadmissibleRho, SingHypError
from .matfun import group_style_inverse, solve_mitra
from .pencil import ModePropagators, RegularizedPencil, build_propagators, find_gamma, regularize, rho_admissible
from .problem import MixedProblem, SolverOptions
from .sturm import SLEigensystem, SLProblem, expand_vector, solve_sl


def discretize(f, g, N: int, m: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Sample ``f`` and ``g`` at x_i = i/N; raw (N+1, m) grids pass through unchanged."""
    if int(N) != N or N < 3:
        raise ValueError("N must be an integer >= 3")
    x = np.arange(N + 1) / N

    def sample(fun):
        if callable(fun):
            grid = np.array([np.atleast_1d(fun(xi)) for xi in x], dtype=complex)
        else:
            grid = np.array(fun, dtype=complex)
            if grid.ndim == 1:
                grid = grid[:, None]
        if grid.shape[0] != N + 1:
            raise ValueError(f"grid has {grid.shape[0]} nodes, expected {N + 1}")
        if m is not None and grid.shape[1] != m:
            raise ValueError(f"grid has dimension {grid.shape[1]}, expected {m}")
        return grid

    F, G = sample(f), sample(g)
    if F.shape != G.shape:
        raise ValueError("f and g samples have different dimensions")
    return F, G


@dataclass
class ModeData:
    l: int
    eigenvalue: float
    v: np.ndarray
    P: np.ndarray
    Q: np.ndarray
    drift: np.ndarray
    propagators: ModePropagators


@dataclass
class DiscreteSolution:
    """U has shape (N+1, M+1, m): U[i, j] is the vector at x = i/N, t = j k."""

    U: np.ndarray
    modes: list[ModeData]
    pencil: RegularizedPencil
    eigensystem: SLEigensystem
    k: float
    warnings: list[str] = field(default_factory=list)

    @property
    def max_norm(self) -> float:
        return float(np.max(np.sum(np.abs(self.U), axis=-1), initial=0.0))


def mode_coefficients(l: int, es: SLEigensystem, rp: RegularizedPencil, mp: ModePropagators,
                      F, Gdata, k: float, tol: float = 1e-10) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(P_l, Q_l, R_l) for 1-based mode index l.

    Raises HypothesisViolation when either mode system is inconsistent.
    """
    Fl = expand_vector(F, es)[l - 1]
    Gl = expand_vector(Gdata, es)[l - 1]
    Pz = rp.drift_projector
    I = np.eye(rp.m)
    wave = I - Pz
    b1 = wave @ ((mp.Z1 - I) @ Fl - k * Gl)
    b2 = wave @ (k * Gl - (mp.Z0 - I) @ Fl)
    A_op = (mp.Z1 - mp.Z0) @ rp.P
    Ag = group_style_inverse(A_op)
    out = []
    for name, b in (("P", b1), ("Q", b2)):
        sol = solve_mitra(A_op, Ag, b, tol)
        if not sol.consistent:
            raise HypothesisViolation(
                f"mode {l}: system for {name}_l is inconsistent (residual {sol.residual:.3e}); "
                "data or boundary hypotheses are not met"
            )
        out.append(sol.particular)
    return out[0], out[1] + Pz @ Fl, Pz @ Gl


def _pencil_for(problem: MixedProblem, opts: SolverOptions) -> RegularizedPencil:
    gamma = opts.gamma if opts.gamma is not None else find_gamma(problem.E, problem.A, opts.cond_max)
    return regularize(problem.E, problem.A, gamma, opts.rank_tol, opts.cond_max)


def compute_modes(problem: MixedProblem, rp: RegularizedPencil, es: SLEigensystem,
                  check_admissible: bool = True) -> list[ModeData]:
    lam_max = float(np.max(np.abs(es.eigenvalues)))
    modes = []
    for l in range(1, problem.N):
        lam = float(es.eigenvalues[l - 1])
        if check_admissible:
            adm = rho_admissible(-problem.r**2 * lam, rp, lam_max, problem.r)
            if not adm.ok:
                raise InadmissibleRho(f"mode {l}: " + "; ".join(adm.reasons))
        mp = build_propagators(rp, lam, problem.r, l)
        P, Q, R = mode_coefficients(l, es, rp, mp, problem.F, problem.G, problem.k)
        modes.append(ModeData(l, lam, es.vectors[l - 1], P, Q, R, mp))
    return modes


def assemble(problem: MixedProblem, es: SLEigensystem, rp: RegularizedPencil, modes: list[ModeData]) -> DiscreteSolution:
    """Sum the separated modes in ascending l; powers are advanced one multiply per step."""
    M, m = problem.M, problem.m
    U = np.zeros((problem.N + 1, M + 1, m), dtype=complex)
    jk = problem.k * np.arange(M + 1)
    for mode in modes:
        temporal = np.empty((M + 1, m), dtype=complex)
        a = rp.P @ mode.P
        b = rp.P @ mode.Q
        for j in range(M + 1):
            temporal[j] = a + b
            a = mode.propagators.Z0 @ a
            b = mode.propagators.Z1 @ b
        temporal += jk[:, None] * mode.drift[None, :]
        U += mode.v[:, None, None] * temporal[None, :, :]
    return DiscreteSolution(U, modes, rp, es, problem.k)


def solve(problem: MixedProblem, options: SolverOptions | None = None) -> DiscreteSolution:
    opts = options or SolverOptions()
    rp = _pencil_for(problem, opts)
    es = solve_sl(SLProblem(problem.N, problem.alpha, problem.beta))
    sol = assemble(problem, es, rp, compute_modes(problem, rp, es))
    if not np.any(np.abs(rp.nonzero_spectrum()) > 0):
        sol.warnings.append("Ehat^D Ahat is nilpotent on the core: only the zero-speed part is propagated")
    return sol


@dataclass(frozen=True)
class Residuals:
    interior: float
    boundary0: float
    boundaryN: float
    init0: float
    init1: float

    def as_dict(self) -> dict:
        return {n: getattr(self, n) for n in ("interior", "boundary0", "boundaryN", "init0", "init1")}

    @property
    def worst(self) -> float:
        return max(self.as_dict().values())


def _max_row_norm(arr: np.ndarray) -> float:
    if arr.size == 0:
        return 0.0
    return float(np.max(np.linalg.norm(arr, axis=-1)))


def scheme_residual(U, problem: MixedProblem) -> Residuals:
    """Max residuals of the interior stencil, both boundary relations and both initial conditions.

    The initial conditions are checked on interior nodes 0 < i < N: the
    boundary values of U are fixed by the boundary relations, not by F, G.
    """
    U = np.asarray(U.U if isinstance(U, DiscreteSolution) else U)
    E, A, bc, N, r = problem.E, problem.A, problem.bc, problem.N, problem.r
    r2 = r * r
    inner = U[1:-1, 1:-1]
    res = (
        (U[2:, 1:-1] + U[:-2, 1:-1]) @ (r2 * A).T
        + inner @ (2.0 * (E - r2 * A)).T
        - (U[1:-1, 2:] + U[1:-1, :-2]) @ E.T
    )
    b0 = U[0] @ bc.A1.T + N * (U[1] - U[0]) @ bc.A2.T
    bN = U[N] @ bc.B1.T + N * (U[N] - U[N - 1]) @ bc.B2.T
    i0 = U[1:N, 0] - problem.F[1:N]
    i1 = (U[1:N, 1] - U[1:N, 0]) / problem.k - problem.G[1:N]
    return Residuals(_max_row_norm(res), _max_row_norm(b0), _max_row_norm(bN), _max_row_norm(i0), _max_row_norm(i1))


def residual_scale(problem: MixedProblem) -> float:
    """1 + max node norm of F and G, the scale for all residual tolerances."""
    return 1.0 + max(_max_row_norm(problem.F), _max_row_norm(problem.G))


@dataclass(frozen=True)
class SweepRow:
    k: float
    M: int
    max_norm: float
    error: str | None = None

    def as_dict(self) -> dict:
        return {"k": self.k, "M": self.M, "max_norm": self.max_norm, "error": self.error}


@dataclass(frozen=True)
class SweepResult:
    rows: list[SweepRow]
    ratios: list[float]
    passed: bool
    eps_growth: float

    def as_dict(self) -> dict:
        return {
            "rows": [r.as_dict() for r in self.rows],
            "ratios": self.ratios,
            "passed": self.passed,
            "eps_growth": self.eps_growth,
        }


def stability_sweep(problem: MixedProblem, halvings: int | None = None,
                    options: SolverOptions | None = None) -> SweepResult:
    """Halve k ``halvings`` times with M k = T fixed and record max_ij ||U(i,j)||_1.

    The verdict holds when no row errored and each successive ratio is at
    most ``1 + eps_growth``.
    """
    opts = options or SolverOptions()
    halvings = opts.halvings if halvings is None else halvings
    if halvings < 0:
        raise ValueError("halvings must be nonnegative")
    rows = []
    for h in range(halvings + 1):
        M = problem.M * 2**h
        trial = problem.with_steps(M)
        try:
            sol = solve(trial, opts)
            rows.append(SweepRow(trial.k, M, sol.max_norm))
        except SingHypError as exc:
            rows.append(SweepRow(trial.k, M, float("nan"), f"{type(exc).__name__}: {exc}"))
    ratios = []
    for prev, cur in zip(rows, rows[1:]):
        if prev.error or cur.error:
            ratios.append(float("nan"))
        elif prev.max_norm == 0.0:
            ratios.append(1.0 if cur.max_norm == 0.0 else float("inf"))
        else:
            ratios.append(cur.max_norm / prev.max_norm)
    passed = not any(r.error for r in rows) and all(x <= 1.0 + opts.eps_growth for x in ratios)
    return SweepResult(rows, ratios, passed, opts.eps_growth)


def power_growth_rate(Z, k: float, M: int) -> tuple[float, np.ndarray]:
    """Fitted S with ``||Z^j||_2 <= exp(S j k)`` for 0 <= j <= M, and the norm history."""
    Z = np.asarray(Z)
    norms = np.empty(M + 1)
    cur = np.eye(Z.shape[0], dtype=complex)
    for j in range(M + 1):
        norms[j] = np.linalg.norm(cur, 2)
        cur = cur @ Z
    j = np.arange(1, M + 1)
    with np.errstate(divide="ignore"):
        logs = np.log(np.maximum(norms[1:], 1e-300))
    S = float(np.max(logs / (j * k), initial=0.0))
    return max(S, 0.0), norms
