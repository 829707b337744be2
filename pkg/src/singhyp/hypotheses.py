"""Checks of every solvability/stability hypothesis on a concrete problem instance."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import NumericalFailure, PencilSingular, SingHypError
from .matfun import RANK_TOL, moore_penrose, numerical_rank
from .pencil import (
    RegularizedPencil,
    check_condition_45,
    find_gamma,
    propagator_roots,
    regularize,
    rho_admissible,
)
from .problem import BoundaryConditions, MixedProblem, SolverOptions
from .sturm import SLProblem, solve_sl

UNIT_MODULUS_TOL = 1e-9

CHECK_NAMES = (
    "gamma-found",
    "condition-45",
    "rank-deficiency",
    "kernel-F",
    "kernel-G",
    "projector-F",
    "projector-G",
    "invariance-78",
)


@dataclass(frozen=True)
class CouplingMatrix:
    """Stacked boundary coupling ``[alpha A1 - A2; beta B1 - B2]`` (2m x m)."""

    G: np.ndarray
    alpha: float
    beta: float

    @property
    def m(self) -> int:
        return self.G.shape[1]

    @property
    def top(self) -> np.ndarray:
        return self.G[: self.m]

    @property
    def bottom(self) -> np.ndarray:
        return self.G[self.m :]


def build_G(alpha: float, beta: float, bc: BoundaryConditions) -> CouplingMatrix:
    G = np.vstack([alpha * bc.A1 - bc.A2, beta * bc.B1 - bc.B2])
    return CouplingMatrix(G, alpha, beta)


@dataclass(frozen=True)
class RankInfo:
    rank: int
    deficient: bool


def _scale(G: np.ndarray) -> float:
    return float(np.linalg.norm(G, 2)) if G.size else 0.0


def rank_deficiency(G: CouplingMatrix, rank_tol: float = RANK_TOL) -> RankInfo:
    # absolute floor so that an all-rounding-noise G is rank 0
    rank = numerical_rank(G.G, rank_tol, scale=max(_scale(G.G), 1.0))
    return RankInfo(rank, rank < G.m)


def kernel_basis(G: CouplingMatrix, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal basis of Ker G as the columns of an (m, m - rank) array."""
    rank = rank_deficiency(G, rank_tol).rank
    _, _, vh = np.linalg.svd(G.G)
    return vh[rank:].conj().T


@dataclass
class CheckResult:
    name: str
    passed: bool
    residual: float
    detail: str = ""
    severity: str = "error"

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class ValidationReport:
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if c.severity == "error")

    @property
    def warnings(self) -> list[str]:
        return [f"{c.name}: {c.detail}" for c in self.checks if c.severity == "warning" and not c.passed]

    def __getitem__(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def names(self) -> list[str]:
        return [c.name for c in self.checks]

    def failed(self) -> list[str]:
        return [c.name for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "warnings": self.warnings,
            "checks": [c.to_dict() for c in self.checks],
        }


def _max_norm(rows) -> float:
    rows = np.asarray(rows)
    return float(np.max(np.linalg.norm(rows, axis=-1), initial=0.0))


def check_data_conditions(rp: RegularizedPencil, G: CouplingMatrix, F, Gdata, tol: float = 1e-8) -> list[CheckResult]:
    """Kernel and core-projector conditions on both initial data grids (all nodes)."""
    out = []
    for label, grid in (("F", F), ("G", Gdata)):
        grid = np.asarray(grid, dtype=complex)
        scale = 1.0 + _max_norm(grid)
        res = _max_norm(grid @ G.G.T)
        out.append(CheckResult(f"kernel-{label}", res <= tol * scale * max(1.0, _scale(G.G)), res,
                               f"max_i ||G(alpha,beta) {label}(i)||"))
    for label, grid in (("F", F), ("G", Gdata)):
        grid = np.asarray(grid, dtype=complex)
        scale = 1.0 + _max_norm(grid)
        res = _max_norm(grid @ rp.P.T - grid)
        out.append(CheckResult(f"projector-{label}", res <= tol * scale, res,
                               f"max_i ||Ehat Ehat^D {label}(i) - {label}(i)||"))
    order = {"kernel-F": 0, "kernel-G": 1, "projector-F": 2, "projector-G": 3}
    return sorted(out, key=lambda c: order[c.name])


def invariance_residuals(B: np.ndarray, G: CouplingMatrix, rank_tol: float = RANK_TOL) -> tuple[float, float]:
    """(||G B (I - G^+ G)||, ||G B K||) with K an orthonormal kernel basis."""
    m = G.m
    Gp = moore_penrose(G.G, rank_tol)
    mp_res = float(np.linalg.norm(G.G @ B @ (np.eye(m) - Gp @ G.G), 2))
    K = kernel_basis(G, rank_tol)
    ker_res = float(np.linalg.norm(G.G @ B @ K, 2)) if K.shape[1] else 0.0
    return mp_res, ker_res


def check_invariance(rp: RegularizedPencil, G: CouplingMatrix, tol: float = 1e-8,
                     rank_tol: float = RANK_TOL) -> CheckResult:
    """Ker G invariant under Ehat^D Ahat, by the pseudoinverse test and the kernel-basis test."""
    mp_res, ker_res = invariance_residuals(rp.B, G, rank_tol)
    scale = max(1.0, _scale(G.G)) * max(1.0, float(np.linalg.norm(rp.B, 2)))
    passed = mp_res <= tol * scale
    agree = passed == (ker_res <= tol * scale)
    detail = f"||G B (I - G^+ G)|| = {mp_res:.3e}; kernel-basis form {ker_res:.3e}"
    if not agree:
        detail += " (the two forms disagree)"
    return CheckResult("invariance-78", passed, mp_res, detail)


def unit_modulus(rho: float, rp: RegularizedPencil, tol: float = UNIT_MODULUS_TOL) -> tuple[bool, float, float]:
    """(passed, max |z| - 1, max ||z| - 1|) over the propagator roots on the core spectrum."""
    roots = propagator_roots(rho, rp.core_spectrum())
    if roots.size == 0:
        return True, 0.0, 0.0
    mods = np.abs(roots)
    growth = float(np.max(mods) - 1.0)
    return growth <= tol, growth, float(np.max(np.abs(mods - 1.0)))


def _skipped(name: str, why: str) -> CheckResult:
    return CheckResult(name, False, float("nan"), f"skipped: {why}")


def validate_all(problem: MixedProblem, options: SolverOptions | None = None) -> ValidationReport:
    """Run every check; failures are report entries, never exceptions.

    A failed condition-45 check is a warning: the method then only produces
    the drift part of the solution.
    """
    opts = options or SolverOptions()
    tol = opts.residual_tol
    report = ValidationReport()
    rp = None
    try:
        gamma = opts.gamma if opts.gamma is not None else find_gamma(problem.E, problem.A, opts.cond_max)
        rp = regularize(problem.E, problem.A, gamma, opts.rank_tol, opts.cond_max)
        report.checks.append(CheckResult("gamma-found", True, float(np.linalg.cond(gamma * problem.E + problem.A)),
                                         f"gamma = {gamma:.6g}; residual field is cond(gamma E + A)"))
    except (PencilSingular, NumericalFailure) as exc:
        report.checks.append(CheckResult("gamma-found", False, float("inf"), str(exc)))

    Gc = build_G(problem.alpha, problem.beta, problem.bc)
    rank = rank_deficiency(Gc, opts.rank_tol)

    if rp is not None:
        ok45, sig = check_condition_45(rp)
        report.checks.append(CheckResult("condition-45", ok45, float(np.max(np.abs(sig), initial=0.0)),
                                         "max |d| over spectrum of Ehat^D Ahat", severity="warning"))
    else:
        report.checks.append(_skipped("condition-45", "no regularizing gamma"))
        report.checks[-1].severity = "warning"

    report.checks.append(CheckResult("rank-deficiency", rank.deficient, float(rank.rank),
                                     f"rank G(alpha, beta) = {rank.rank}, m = {Gc.m}; residual field is the rank"))

    if rp is not None:
        report.checks.extend(check_data_conditions(rp, Gc, problem.F, problem.G, tol))
        report.checks.append(check_invariance(rp, Gc, tol, opts.rank_tol))
    else:
        # kernel conditions do not need the pencil
        for label, grid in (("F", problem.F), ("G", problem.G)):
            res = _max_norm(grid @ Gc.G.T)
            ok = res <= tol * (1.0 + _max_norm(grid)) * max(1.0, _scale(Gc.G))
            report.checks.append(CheckResult(f"kernel-{label}", ok, res, f"max_i ||G(alpha,beta) {label}(i)||"))
        report.checks.append(_skipped("projector-F", "no regularizing gamma"))
        report.checks.append(_skipped("projector-G", "no regularizing gamma"))
        report.checks.append(_skipped("invariance-78", "no regularizing gamma"))

    try:
        es = solve_sl(SLProblem(problem.N, problem.alpha, problem.beta))
        lambdas = es.eigenvalues
    except SingHypError as exc:
        lambdas = None
        sl_error = str(exc)
    lam_max = float(np.max(np.abs(lambdas))) if lambdas is not None else 0.0
    for l in range(1, problem.N):
        if lambdas is None or rp is None:
            why = sl_error if lambdas is None else "no regularizing gamma"
            report.checks.append(_skipped(f"rho-admissible[{l}]", why))
            report.checks.append(_skipped(f"unit-modulus[{l}]", why))
            continue
        rho = -problem.r**2 * lambdas[l - 1]
        adm = rho_admissible(rho, rp, lam_max, problem.r)
        detail = f"rho = {rho:.6g}" + ("; " + "; ".join(adm.reasons) if adm.reasons else "")
        report.checks.append(CheckResult(f"rho-admissible[{l}]", adm.ok, adm.margin, detail))
        ok, growth, dev = unit_modulus(rho, rp)
        report.checks.append(CheckResult(f"unit-modulus[{l}]", ok, max(growth, 0.0),
                                         f"max|z| - 1 = {growth:.3e}; max ||z| - 1| = {dev:.3e}"))
    return report
