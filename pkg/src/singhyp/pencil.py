"""Regularization of the singular pair (E, A) and the per-mode time propagators.

With ``gamma*E + A`` invertible, ``Ehat = (gamma E + A)^-1 E`` and
``Ahat = (gamma E + A)^-1 A`` satisfy ``gamma*Ehat + Ahat = I`` and commute.
The recurrence ``E G(j+1) - (2E + rho A) G(j) + E G(j-1) = 0`` is then solved
on the core subspace of ``Ehat`` by the two roots

    P+-(B) = I + rho/2 B +- sqrt((I + rho/2 B)^2 - I),   B = Ehat^D Ahat,

and is identically zero on the nilpotent subspace.

Directions of the core on which ``B`` vanishes (zero wave speed: ``A x = 0``)
give a double root 1; both propagators act as the identity there.  They are
split off as the *drift* subspace so the solver can add the linear-in-time
term the two-propagator form cannot represent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InadmissibleRho, NumericalFailure, PencilSingular
from .matfun import (
    RANK_TOL,
    CoreNilpotent,
    as_matrix,
    core_nilpotent,
    norm1,
    principal_scalar_sqrt,
    principal_sqrt,
    spectrum,
)

GAMMA_CANDIDATES = (1, -1, 2, -2, 1j, -1j, 10, -10, 0.5, -0.5, 1 + 1j, 1 - 1j, 100, -100, 0.1, -0.1)


def find_gamma(E, A, cond_max: float = 1e8) -> complex:
    """First shift from a fixed candidate list making ``gamma E + A`` well conditioned.

    Candidates are scaled by ``||A||_1 / max(||E||_1, eps)`` (1 when A = 0).
    """
    E, A = as_matrix(E), as_matrix(A)
    nE, nA = norm1(E), norm1(A)
    scale = nA / max(nE, np.finfo(float).eps) if nA > 0 else 1.0
    for c in GAMMA_CANDIDATES:
        gamma = complex(c) * scale
        if np.linalg.cond(gamma * E + A) < cond_max:
            return gamma
    raise PencilSingular("no candidate gamma makes gamma*E + A invertible; the pencil may be singular")


@dataclass(frozen=True)
class RegularizedPencil:
    gamma: complex
    E: np.ndarray
    A: np.ndarray
    Ehat: np.ndarray
    Ahat: np.ndarray
    EhatD: np.ndarray
    P: np.ndarray
    B: np.ndarray
    ehat_split: CoreNilpotent
    b_split: CoreNilpotent

    @property
    def m(self) -> int:
        return self.E.shape[0]

    @property
    def wave_projector(self) -> np.ndarray:
        """Projector onto the core directions with nonzero wave speed (range of B B^D)."""
        return self.b_split.core_projector()

    @property
    def drift_projector(self) -> np.ndarray:
        """Projector onto core directions where B vanishes."""
        return self.P - self.wave_projector

    def core_spectrum(self) -> np.ndarray:
        """Spectrum of B restricted to the core subspace of Ehat.

        Taken from the same split that builds the propagators: exact zeros on
        the drift block plus the spectrum of the core block of B.  A dense
        eigensolve would return O(eps) values for the zeros, and the double
        root at 1 turns those into O(sqrt(eps)) errors in the scalar roots.
        """
        drift = self.ehat_split.p - self.b_split.p
        return np.concatenate([np.zeros(drift, dtype=complex), self.nonzero_spectrum()])

    def nonzero_spectrum(self) -> np.ndarray:
        C = self.b_split.C
        return spectrum(C) if C.shape[0] else np.zeros(0, dtype=complex)


def regularize(E, A, gamma: complex, rank_tol: float = RANK_TOL, cond_max: float = 1e8) -> RegularizedPencil:
    E, A = as_matrix(E), as_matrix(A)
    shifted = gamma * E + A
    if np.linalg.cond(shifted) >= cond_max:
        raise PencilSingular(f"gamma*E + A is numerically singular for gamma={gamma}")
    Ehat = np.linalg.solve(shifted, E)
    Ahat = np.linalg.solve(shifted, A)
    ehat_split = core_nilpotent(Ehat, rank_tol)
    if ehat_split.p:
        EhatD = ehat_split.block_function(np.linalg.inv(ehat_split.C))
    else:
        EhatD = np.zeros_like(Ehat)
    P = Ehat @ EhatD
    B = EhatD @ Ahat
    b_split = core_nilpotent(B, rank_tol)
    if b_split.index > 1:
        raise NumericalFailure(
            "Ehat^D Ahat has a nontrivial nilpotent part; the propagators P+-(Ehat^D Ahat) are undefined"
        )
    return RegularizedPencil(complex(gamma), E, A, Ehat, Ahat, EhatD, P, B, ehat_split, b_split)


def check_condition_45(rp: RegularizedPencil, tol: float = 1e-10) -> tuple[bool, np.ndarray]:
    """True when some eigenvalue of ``Ehat^D Ahat`` is nonzero."""
    sig = spectrum(rp.B)
    scale = max(1.0, np.linalg.norm(rp.B, 2))
    return bool(np.any(np.abs(sig) > tol * scale)), sig


@dataclass(frozen=True)
class Admissibility:
    ok: bool
    reasons: tuple[str, ...]
    margin: float


def rho_admissible(rho: float, rp: RegularizedPencil, lambda_max: float, r: float, tol: float = 1e-12) -> Admissibility:
    """Both invertibility of the mode system and the step-size bound on |rho|.

    ``margin`` is the smallest ``|rho d (1 + rho d / 4)|`` over nonzero d.
    """
    reasons = []
    ds = rp.nonzero_spectrum()
    values = np.abs(rho * ds * (1.0 + rho * ds / 4.0))
    margin = float(np.min(values)) if len(values) else float("inf")
    if margin <= tol:
        worst = ds[int(np.argmin(values))]
        reasons.append(f"rho*d*(1 + rho*d/4) = {margin:.3e} vanishes for d = {worst:.6g}")
    bound = abs(lambda_max) * r**2
    if abs(rho) > bound * (1 + 1e-12) + tol:
        reasons.append(f"|rho| = {abs(rho):.6g} exceeds max|lambda| r^2 = {bound:.6g}")
    return Admissibility(not reasons, tuple(reasons), margin)


@dataclass(frozen=True)
class ModePropagators:
    l: int
    rho: float
    Z0: np.ndarray
    Z1: np.ndarray
    P_plus: np.ndarray
    P_minus: np.ndarray


def propagators_for_rho(rp: RegularizedPencil, rho: float, l: int = 0, tol: float = 1e-12) -> ModePropagators:
    """``Z0 = P+(B) P`` and ``Z1 = P-(B) P`` for one separation constant rho."""
    adm = rho_admissible(rho, rp, lambda_max=np.inf, r=1.0, tol=tol)
    if not adm.ok:
        raise InadmissibleRho("; ".join(adm.reasons))
    bs = rp.b_split
    p = bs.p
    eye_p = np.eye(p, dtype=complex)
    shifted = eye_p + 0.5 * rho * bs.C
    root = principal_sqrt(shifted @ shifted - eye_p) if p else np.zeros((0, 0), complex)
    eye_q = np.eye(bs.q, dtype=complex)
    P_plus = bs.block_function(shifted + root, eye_q)
    P_minus = bs.block_function(shifted - root, eye_q)
    return ModePropagators(l, float(rho), P_plus @ rp.P, P_minus @ rp.P, P_plus, P_minus)


def build_propagators(rp: RegularizedPencil, lambda_l: float, r: float, l: int = 0) -> ModePropagators:
    return propagators_for_rho(rp, -(r**2) * lambda_l, l)


def propagator_roots(rho: float, ds) -> np.ndarray:
    """Scalar roots 1 + rho d/2 +- sqrt((1 + rho d/2)^2 - 1), shape (len(ds), 2)."""
    ds = np.asarray(ds, dtype=complex)
    s = 1.0 + 0.5 * rho * ds
    w = np.array([principal_scalar_sqrt(z) for z in s * s - 1.0])
    return np.column_stack([s + w, s - w]) if len(ds) else np.zeros((0, 2), complex)


def solve_matrix_difference(rp: RegularizedPencil, rho: float, l1, l2, j_max: int) -> np.ndarray:
    """``G(j) = Z0^j P l1 + Z1^j P l2`` for j = 0..j_max, shape (j_max+1, m)."""
    mp = propagators_for_rho(rp, rho)
    a = rp.P @ np.asarray(l1, dtype=complex)
    b = rp.P @ np.asarray(l2, dtype=complex)
    out = np.empty((j_max + 1, rp.m), dtype=complex)
    for j in range(j_max + 1):
        out[j] = a + b
        a = mp.Z0 @ a
        b = mp.Z1 @ b
    return out


def difference_residual(E, A, rho: float, seq) -> float:
    """max_j ||E G(j+1) - (2E + rho A) G(j) + E G(j-1)|| over 1 <= j < len-1."""
    seq = np.asarray(seq)
    if len(seq) < 3:
        return 0.0
    E, A = as_matrix(E), as_matrix(A)
    res = seq[2:] @ E.T - seq[1:-1] @ (2 * E + rho * A).T + seq[:-2] @ E.T
    return float(np.max(np.linalg.norm(res, axis=1)))
