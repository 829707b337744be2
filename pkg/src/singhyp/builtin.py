"""Built-in example specifications.

``paper-4-2`` is the 3x3 singular example with eps = gamma = delta = sigma = 1,
mu = 2, eta = 1/2, A1 with the identity pattern in its left block and
b = (1, 0, 0), c = (0, 0, 0), so G(alpha, beta) has rank 1.  The value
eta = 1/2 is used instead of 1 because with alpha = 2, beta = 1 and N = 8 the
first Sturm-Liouville eigenvalue is exactly 0, which gives rho = 0 for that
mode; that choice is kept as the ``paper-4-2-eta1`` example of an
inadmissible instance.
"""

from __future__ import annotations

import copy

import numpy as np

from .specfile import encode_complex_array


def _coupled_singular(eta: float) -> dict:
    eps = gam = delta = sigma = 1.0
    mu = 2.0
    a = np.eye(3)[:, :2]
    b = np.array([1.0, 0.0, 0.0])
    c = np.zeros(3)
    E = np.array([[eps, 0, delta], [0, gam, 0], [0, 0, 0]])
    A = np.diag([0.0, delta, sigma])
    A1 = np.column_stack([a, b])
    A2 = np.column_stack([mu * a, c])
    B1 = np.eye(3)
    B2 = eta * B1
    return {
        "name": "paper-4-2" if eta == 0.5 else "paper-4-2-eta1",
        "m": 3,
        "N": 8,
        "k": 0.0625,
        "T": 1.0,
        "alpha": mu,
        "beta": eta,
        "E": encode_complex_array(E),
        "A": encode_complex_array(A),
        "A1": encode_complex_array(A1),
        "A2": encode_complex_array(A2),
        "B1": encode_complex_array(B1),
        "B2": encode_complex_array(B2),
        "F": {"generator": "sine", "amplitude": [1.0, 1.0, 0.0], "mode": [1, 2, 1], "phase": [0.0, 0.0, 0.0]},
        "G": {"generator": "sine", "amplitude": [0.5, 1.0, 0.0], "mode": [1, 3, 1], "phase": [0.0, 0.0, 0.0]},
        "options": {"gamma": "auto", "halvings": 5},
    }


def _scalar() -> dict:
    one = [[1.0]]
    return {
        "name": "scalar",
        "m": 1,
        "N": 8,
        "k": 0.0625,
        "T": 1.0,
        "alpha": 0.0,
        "beta": 0.0,
        "E": encode_complex_array(one),
        "A": encode_complex_array(one),
        "A1": encode_complex_array(one),
        "A2": encode_complex_array([[0.0]]),
        "B1": encode_complex_array(one),
        "B2": encode_complex_array([[0.0]]),
        "F": {"generator": "sine", "amplitude": [1.0], "mode": [1]},
        "G": {"generator": "sine", "amplitude": [0.5], "mode": [2]},
        "options": {"halvings": 5},
    }


def _nonsingular() -> dict:
    S = np.array([[1.0, 0.3, -0.2], [0.1, 1.0, 0.4], [-0.3, 0.2, 1.0]])
    A = S @ np.diag([0.5, 1.0, 1.5]) @ np.linalg.inv(S)
    eye = np.eye(3)
    alpha, beta = 0.05, 0.1
    return {
        "name": "nonsingular",
        "m": 3,
        "N": 8,
        "k": 0.0625,
        "T": 4.0,
        "alpha": alpha,
        "beta": beta,
        "E": encode_complex_array(eye),
        "A": encode_complex_array(A),
        "A1": encode_complex_array(eye),
        "A2": encode_complex_array(alpha * eye),
        "B1": encode_complex_array(eye),
        "B2": encode_complex_array(beta * eye),
        "F": {"generator": "sine", "amplitude": [1.0, -0.5, 0.25], "mode": [1, 2, 3]},
        "G": {"generator": "sine", "amplitude": [0.2, 0.1, -0.3], "mode": [2, 1, 1]},
    }


_EXAMPLES = {
    "paper-4-2": lambda: _coupled_singular(0.5),
    "paper-4-2-eta1": lambda: _coupled_singular(1.0),
    "scalar": _scalar,
    "nonsingular": _nonsingular,
}


def example_names() -> list[str]:
    return sorted(_EXAMPLES)


def example_spec(name: str) -> dict:
    try:
        return copy.deepcopy(_EXAMPLES[name]())
    except KeyError:
        raise KeyError(f"unknown example {name!r}; available: {', '.join(example_names())}") from None
