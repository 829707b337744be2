"""Random instances with known structure, shared by the unit and acceptance tests."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from singhyp.builtin import example_spec
from singhyp.problem import BoundaryConditions, MixedProblem
from singhyp.specfile import parse_spec


def well_conditioned(rng, m: int, complex_: bool = True) -> np.ndarray:
    """Random similarity with condition number of order 10."""
    X = rng.normal(size=(m, m))
    if complex_:
        X = X + 1j * rng.normal(size=(m, m))
    q, _ = np.linalg.qr(X)
    s = np.exp(rng.uniform(-1.0, 1.0, size=m))
    return q * s[None, :]


@dataclass
class JordanInstance:
    A: np.ndarray
    drazin: np.ndarray
    index: int
    core_size: int


def jordan_matrix(rng, m: int | None = None, max_index: int = 3) -> JordanInstance:
    """A = S diag(C, N) S^-1 with C invertible and N a sum of nilpotent Jordan blocks."""
    m = int(rng.integers(1, 9)) if m is None else m
    q = int(rng.integers(0, m + 1))
    blocks = []
    left = q
    while left:
        size = int(rng.integers(1, min(max_index, left) + 1))
        blocks.append(size)
        left -= size
    p = m - q
    C = rng.normal(size=(p, p)) + 1j * rng.normal(size=(p, p)) + 2.0 * np.eye(p)
    # keep the core spectrum away from 0
    w = np.linalg.eigvals(C) if p else np.zeros(0)
    if p and np.min(np.abs(w)) < 0.3:
        C = C + (0.5 - np.min(np.abs(w))) * np.eye(p)
    nil = [np.diag(np.ones(b - 1), 1) for b in blocks]
    J = sla.block_diag(C, *nil) if (p or nil) else np.zeros((0, 0))
    S = well_conditioned(rng, m)
    Si = np.linalg.inv(S)
    A = S @ J @ Si
    D = S @ sla.block_diag(np.linalg.inv(C) if p else np.zeros((0, 0)), np.zeros((q, q))) @ Si
    return JordanInstance(A, D, max(blocks, default=0), p)


@dataclass
class PencilInstance:
    E: np.ndarray
    A: np.ndarray
    d: np.ndarray  # spectrum of Ehat^D Ahat on the core


def singular_pencil(rng, m: int | None = None, real_spectrum: bool = True) -> PencilInstance:
    """Weierstrass-form pencil: E = S diag(I, N) T, A = S diag(J, I) T, J diagonalizable."""
    m = int(rng.integers(2, 7)) if m is None else m
    q = int(rng.integers(1, m))
    p = m - q
    if real_spectrum:
        d = rng.uniform(0.2, 2.0, size=p)
    else:
        d = rng.uniform(0.2, 2.0, size=p) * np.exp(1j * rng.uniform(-0.6, 0.6, size=p))
    if p > 1 and rng.random() < 0.3:
        d[0] = 0.0
    V = well_conditioned(rng, p)
    J = V @ np.diag(d) @ np.linalg.inv(V)
    Nn = np.diag((rng.random(q - 1) < 0.5).astype(float), 1) if q > 1 else np.zeros((q, q))
    S, T = well_conditioned(rng, m), well_conditioned(rng, m)
    E = S @ sla.block_diag(np.eye(p), Nn) @ T
    A = S @ sla.block_diag(J, np.eye(q)) @ T
    return PencilInstance(E, A, d)


def example_problem(name: str, **changes) -> MixedProblem:
    raw = example_spec(name)
    raw.update(changes)
    return parse_spec(raw).problem


def coupled_bc(G_top: np.ndarray, G_bot: np.ndarray, alpha: float, beta: float) -> BoundaryConditions:
    """Boundary matrices with A1 = B1 = I whose coupling matrix is [G_top; G_bot]."""
    m = G_top.shape[0]
    eye = np.eye(m)
    return BoundaryConditions(eye, alpha * eye - G_top, eye, beta * eye - G_bot)


def sine_grid(N: int, amplitudes, modes) -> np.ndarray:
    x = np.arange(N + 1) / N
    return np.column_stack([a * np.sin(n * np.pi * x) for a, n in zip(amplitudes, modes)]).astype(complex)
