"""Dense complex linear algebra kernel.

Generalized inverses (Drazin, group, Moore-Penrose), Mitra's solvability test,
the principal matrix square root and canonically ordered spectra.  Everything
works in complex arithmetic, even for real input.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import NumericalFailure, PreconditionError

#: Relative factor for numerical rank: singular values below
#: ``RANK_TOL * max(shape) * sigma_max`` count as zero.
RANK_TOL = 1e-12

#: Relative accuracy demanded of reconstructed decompositions.
CHECK_TOL = 1e-8


def as_matrix(a, square: bool = True) -> np.ndarray:
    """Return ``a`` as a finite 2-D complex array."""
    arr = np.array(a, dtype=complex)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2:
        raise PreconditionError(f"expected a 2-D matrix, got shape {arr.shape}")
    if square and arr.shape[0] != arr.shape[1]:
        raise PreconditionError(f"expected a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise PreconditionError("matrix has non-finite entries")
    return arr


def norm1(a) -> float:
    """Induced 1-norm (maximum absolute column sum); the vector 1-norm for 1-D input."""
    return float(np.linalg.norm(a, 1)) if np.ndim(a) else abs(complex(a))


def numerical_rank(a, rank_tol: float = RANK_TOL, scale: float | None = None) -> int:
    """Count singular values above ``rank_tol * max(shape) * scale``.

    ``scale`` defaults to the largest singular value of ``a``.
    """
    a = np.atleast_2d(a)
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    ref = s[0] if scale is None else scale
    if ref == 0.0:
        return 0
    return int(np.sum(s > rank_tol * max(a.shape) * ref))


def _power_ranks(a: np.ndarray, rank_tol: float) -> list[int]:
    # rank(A^j) for j = 0..index+1, thresholds scaled by ||A||^j so that a
    # rounding-level power of a nilpotent part is not mistaken for full rank
    m = a.shape[0]
    a_norm = np.linalg.norm(a, 2)
    ranks = [m]
    power = np.eye(m, dtype=complex)
    for j in range(1, m + 2):
        power = power @ a
        ranks.append(numerical_rank(power, rank_tol, scale=a_norm**j))
        if ranks[-1] == ranks[-2]:
            break
    return ranks


def matrix_index(a, rank_tol: float = RANK_TOL) -> int:
    """Smallest k with rank(A^k) == rank(A^(k+1)); 0 for invertible A."""
    return len(_power_ranks(as_matrix(a), rank_tol)) - 2


@dataclass(frozen=True)
class CoreNilpotent:
    """Similarity ``A = T @ blockdiag(C, N) @ T_inv`` with C invertible and N nilpotent."""

    T: np.ndarray
    T_inv: np.ndarray
    C: np.ndarray
    N: np.ndarray
    index: int

    @property
    def p(self) -> int:
        return self.C.shape[0]

    @property
    def q(self) -> int:
        return self.N.shape[0]

    def core_projector(self) -> np.ndarray:
        """Oblique projector onto the core subspace along the nilpotent one."""
        return self.T[:, : self.p] @ self.T_inv[: self.p, :]

    def block_function(self, core_block: np.ndarray, nil_block: np.ndarray | None = None) -> np.ndarray:
        """Map ``blockdiag(core_block, nil_block)`` back to the original basis."""
        out = self.T[:, : self.p] @ core_block @ self.T_inv[: self.p, :]
        if nil_block is not None and self.q:
            out = out + self.T[:, self.p :] @ nil_block @ self.T_inv[self.p :, :]
        return out

    def reconstruct(self) -> np.ndarray:
        return self.block_function(self.C, self.N)


def core_nilpotent(a, rank_tol: float = RANK_TOL, check_tol: float = CHECK_TOL) -> CoreNilpotent:
    """Core-nilpotent decomposition via reordered Schur form and a Sylvester solve.

    The nilpotent dimension ``q = m - rank(A^k)`` comes from the ranks of the
    powers of A, so near-zero eigenvalue clusters produced by rounding a
    nilpotent Jordan block are still classified correctly.  The ``q``
    eigenvalues of smallest modulus are moved to the trailing Schur block,
    and the coupling block is eliminated with ``C X - X N = -R12``.

    Raises
    ------
    NumericalFailure
        If the reordering does not isolate exactly ``q`` eigenvalues or the
        reconstruction residual exceeds ``check_tol * ||A||``.
    """
    a = as_matrix(a)
    m = a.shape[0]
    ranks = _power_ranks(a, rank_tol)
    k = len(ranks) - 2
    p = ranks[-1]
    q = m - p
    eye = np.eye(m, dtype=complex)
    if k == 0:
        return CoreNilpotent(eye, eye.copy(), a.copy(), np.zeros((0, 0), complex), 0)
    if p == 0:
        return CoreNilpotent(eye, eye.copy(), np.zeros((0, 0), complex), a.copy(), k)

    moduli = np.sort(np.abs(np.linalg.eigvals(a)))
    lo, hi = moduli[q - 1], moduli[q]
    if hi <= lo:
        raise NumericalFailure("cannot separate the nilpotent eigenvalue cluster from the core")
    threshold = np.sqrt(lo * hi) if lo > 0 else 0.5 * hi
    R, Z, sdim = sla.schur(a, output="complex", sort=lambda x: abs(x) > threshold)
    if sdim != p:
        raise NumericalFailure(f"Schur reordering isolated {sdim} core eigenvalues, expected {p}")

    C, R12, N = R[:p, :p], R[:p, p:], R[p:, p:]
    X = sla.solve_sylvester(C, -N, -R12)
    S = np.block([[np.eye(p), X], [np.zeros((q, p)), np.eye(q)]])
    S_inv = np.block([[np.eye(p), -X], [np.zeros((q, p)), np.eye(q)]])
    T = Z @ S
    T_inv = S_inv @ Z.conj().T
    cn = CoreNilpotent(T, T_inv, C, N, k)

    scale = max(np.linalg.norm(a, 2), np.finfo(float).tiny)
    resid = np.linalg.norm(cn.reconstruct() - a, 2)
    if resid > check_tol * scale * max(1.0, np.linalg.cond(T)):
        raise NumericalFailure(f"core-nilpotent reconstruction residual {resid:.3e}")
    return cn


def drazin_inverse(a, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Drazin inverse ``T blockdiag(C^-1, 0) T^-1``."""
    cn = core_nilpotent(a, rank_tol)
    if cn.p == 0:
        return np.zeros_like(as_matrix(a))
    return cn.block_function(np.linalg.inv(cn.C))


def group_style_inverse(a, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Inner inverse ``T blockdiag(C^-1, 0) T^-1``, defined when the nilpotent block is zero."""
    cn = core_nilpotent(a, rank_tol)
    if cn.index > 1:
        raise PreconditionError(f"group inverse needs index <= 1, matrix has index {cn.index}")
    if cn.p == 0:
        return np.zeros_like(as_matrix(a))
    return cn.block_function(np.linalg.inv(cn.C))


def moore_penrose(a, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Pseudoinverse of a (possibly rectangular) matrix by truncated SVD."""
    a = as_matrix(a, square=False)
    if a.size == 0 or not np.any(a):
        return np.zeros(a.shape[::-1], dtype=complex)
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    keep = s > rank_tol * max(a.shape) * s[0]
    return (vh[keep].conj().T / s[keep]) @ u[:, keep].conj().T


@dataclass(frozen=True)
class MitraSolution:
    consistent: bool
    particular: np.ndarray
    null_projector: np.ndarray
    residual: float


def solve_mitra(a, ag, b, tol: float = 1e-10) -> MitraSolution:
    """Solvability of ``A x = b`` given an inner inverse ``Ag`` (``A Ag A = A``).

    ``A x = b`` is solvable iff ``A Ag b = b``; every solution is then
    ``Ag b + (I - Ag A) z``.
    """
    a = as_matrix(a, square=False)
    ag = as_matrix(ag, square=False)
    b = np.asarray(b, dtype=complex)
    a_norm = np.linalg.norm(a, 2)
    inner = np.linalg.norm(a @ ag @ a - a, 2)
    if inner > tol * max(a_norm, 1.0) * max(1.0, a_norm * np.linalg.norm(ag, 2)):
        raise PreconditionError(f"Ag is not an inner inverse of A (residual {inner:.3e})")
    x = ag @ b
    resid = float(np.linalg.norm(a @ x - b))
    scale = a_norm * np.linalg.norm(x) + np.linalg.norm(b)
    consistent = resid <= tol * max(scale, 1e-300) or resid == 0.0
    null_proj = np.eye(a.shape[1], dtype=complex) - ag @ a
    return MitraSolution(bool(consistent), x, null_proj, resid)


def principal_scalar_sqrt(z: complex, zero_tol: float = 0.0) -> complex:
    """Scalar branch used by :func:`principal_sqrt`."""
    z = complex(z)
    if abs(z) <= zero_tol:
        return 0j
    if z.real < 0 and abs(z.imag) <= 1e-14 * abs(z):
        # negative real axis: take the root on the positive imaginary axis
        return 1j * np.sqrt(-z.real)
    return complex(np.sqrt(z))


def principal_sqrt(mat, check_tol: float = CHECK_TOL) -> np.ndarray:
    """Principal square root by the complex Schur recurrence.

    Eigenvalues at (numerical) zero map to zero; eigenvalues on the negative
    real axis take the root ``+i*sqrt(|x|)``.  Raises ``NumericalFailure``
    when a defective zero eigenvalue makes the recurrence break down.
    """
    m_arr = as_matrix(mat)
    n = m_arr.shape[0]
    scale = np.linalg.norm(m_arr, 2)
    if scale == 0.0:
        return np.zeros_like(m_arr)
    R, Z = sla.schur(m_arr, output="complex")
    zero_tol = 1e-14 * scale
    S = np.zeros_like(R)
    for i in range(n):
        S[i, i] = principal_scalar_sqrt(R[i, i], zero_tol)
    for j in range(n):
        for i in range(j - 1, -1, -1):
            num = R[i, j] - S[i, i + 1 : j] @ S[i + 1 : j, j]
            den = S[i, i] + S[j, j]
            if abs(den) <= np.sqrt(zero_tol):
                if abs(num) <= 1e-10 * scale:
                    S[i, j] = 0.0
                    continue
                raise NumericalFailure("square root recurrence breaks down (defective zero eigenvalue)")
            S[i, j] = num / den
    root = Z @ S @ Z.conj().T
    resid = np.linalg.norm(root @ root - m_arr, 2)
    if resid > check_tol * scale:
        raise NumericalFailure(f"square root residual {resid:.3e} exceeds tolerance")
    return root


def polyval_matrix(coeffs, a) -> np.ndarray:
    """Evaluate ``sum(c_i * A**i)`` (coefficients in increasing degree) by Horner's rule."""
    a = as_matrix(a)
    out = np.zeros_like(a)
    eye = np.eye(a.shape[0], dtype=complex)
    for c in reversed(list(coeffs)):
        out = out @ a + c * eye
    return out


def spectrum(a) -> np.ndarray:
    """Eigenvalues with multiplicity, sorted by real then imaginary part."""
    ev = np.linalg.eigvals(as_matrix(a))
    return ev[np.lexsort((ev.imag, ev.real))]


def match_multisets(x, y, tol: float) -> tuple[bool, float]:
    """Greedily pair two multisets of complex numbers; return (matched, worst distance)."""
    x = list(np.asarray(x, dtype=complex))
    y = list(np.asarray(y, dtype=complex))
    if len(x) != len(y):
        return False, float("inf")
    worst = 0.0
    for value in sorted(x, key=lambda z: (z.real, z.imag)):
        dist = [abs(value - w) for w in y]
        idx = int(np.argmin(dist))
        worst = max(worst, dist[idx])
        y.pop(idx)
    return worst <= tol, worst
