"""JSON problem specifications: parsing, generators for initial data, hashing and atomic output."""

from __future__ import annotations

import hashlib
import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .errors import PreconditionError, SpecError
from .problem import BoundaryConditions, MixedProblem, SolverOptions

MATRIX_KEYS = ("E", "A", "A1", "A2", "B1", "B2")
OPTION_KEYS = ("gamma", "rank_tol", "residual_tol", "eps_growth", "halvings")
GENERATORS = ("zero", "constant", "sine")


def _number(x, where: str) -> complex:
    if isinstance(x, bool):
        raise SpecError(f"{where}: booleans are not numbers")
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, (list, tuple)) and len(x) == 2 and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in x):
        return complex(x[0], x[1])
    raise SpecError(f"{where}: expected a number or a [re, im] pair, got {x!r}")


def parse_complex_array(data, shape: tuple[int, int], where: str) -> np.ndarray:
    if not isinstance(data, list) or len(data) != shape[0]:
        raise SpecError(f"{where}: expected {shape[0]} rows")
    out = np.empty(shape, dtype=complex)
    for i, row in enumerate(data):
        if not isinstance(row, list) or len(row) != shape[1]:
            raise SpecError(f"{where}[{i}]: expected {shape[1]} entries")
        for j, x in enumerate(row):
            out[i, j] = _number(x, f"{where}[{i}][{j}]")
    if not np.all(np.isfinite(out)):
        raise SpecError(f"{where}: non-finite entries")
    return out


def encode_complex_array(a) -> list:
    a = np.asarray(a, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in a]


def _per_component(value, m: int, where: str, default: float) -> np.ndarray:
    if value is None:
        return np.full(m, default, dtype=complex)
    if isinstance(value, list) and len(value) == m:
        return np.array([_number(v, f"{where}[{c}]") for c, v in enumerate(value)])
    return np.full(m, _number(value, where))


def generate(desc: dict, N: int, m: int, where: str) -> np.ndarray:
    """Sample a named generator on x_i = i/N.

    ``sine``: component c is ``amplitude[c] * sin(mode[c] * pi * x + phase[c])``.
    """
    kind = desc.get("generator")
    if kind not in GENERATORS:
        raise SpecError(f"{where}: unknown generator {kind!r} (expected one of {', '.join(GENERATORS)})")
    x = np.arange(N + 1) / N
    if kind == "zero":
        return np.zeros((N + 1, m), dtype=complex)
    if kind == "constant":
        value = _per_component(desc.get("value"), m, f"{where}.value", 0.0)
        return np.tile(value, (N + 1, 1))
    amp = _per_component(desc.get("amplitude"), m, f"{where}.amplitude", 1.0)
    mode = _per_component(desc.get("mode"), m, f"{where}.mode", 1.0).real
    phase = _per_component(desc.get("phase"), m, f"{where}.phase", 0.0).real
    return amp[None, :] * np.sin(np.pi * np.outer(x, mode) + phase[None, :])


@dataclass
class ProblemSpec:
    """A validated specification; ``raw`` keeps the document for round-tripping."""

    raw: dict
    problem: MixedProblem
    options: SolverOptions
    name: str = "spec"
    overrides: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return canonical_spec(self.raw)

    @property
    def hash(self) -> str:
        return spec_hash(self.raw)


def canonical_spec(raw: dict) -> dict:
    """Normalized copy: matrices as [re, im] pairs, numbers as floats, sorted keys on dump."""
    m, N = int(raw["m"]), int(raw["N"])
    out: dict[str, Any] = {"m": m, "N": N}
    for key in ("k", "T", "alpha", "beta"):
        out[key] = float(raw[key])
    for key in MATRIX_KEYS:
        out[key] = encode_complex_array(parse_complex_array(raw[key], (m, m), key))
    for key in ("F", "G"):
        val = raw[key]
        out[key] = dict(val) if isinstance(val, dict) else encode_complex_array(parse_complex_array(val, (N + 1, m), key))
    if raw.get("options"):
        out["options"] = dict(raw["options"])
    if raw.get("name"):
        out["name"] = raw["name"]
    return out


def spec_hash(raw: dict) -> str:
    text = json.dumps(canonical_spec(raw), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


def _options(raw_opts, overrides: dict) -> SolverOptions:
    raw_opts = dict(raw_opts or {})
    unknown = set(raw_opts) - set(OPTION_KEYS)
    if unknown:
        raise SpecError(f"unknown options: {', '.join(sorted(unknown))}")
    kwargs: dict[str, Any] = {}
    gamma = raw_opts.get("gamma", "auto")
    if gamma != "auto":
        kwargs["gamma"] = _number(gamma, "options.gamma")
    for key in ("rank_tol", "residual_tol", "eps_growth"):
        if key in raw_opts:
            v = raw_opts[key]
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise SpecError(f"options.{key} must be a number")
            kwargs[key] = float(v)
    if "halvings" in raw_opts:
        h = raw_opts["halvings"]
        if isinstance(h, bool) or not isinstance(h, int):
            raise SpecError("options.halvings must be an integer")
        kwargs["halvings"] = h
    kwargs.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return SolverOptions(**kwargs)
    except PreconditionError as exc:
        raise SpecError(str(exc)) from exc


def parse_spec(raw: Any, name: str = "spec", **overrides) -> ProblemSpec:
    if not isinstance(raw, dict):
        raise SpecError("spec must be a JSON object")
    required = ("m", "N", "k", "T", "alpha", "beta", *MATRIX_KEYS, "F", "G")
    missing = [k for k in required if k not in raw]
    if missing:
        raise SpecError(f"missing fields: {', '.join(missing)}")
    for key in ("m", "N"):
        if isinstance(raw[key], bool) or not isinstance(raw[key], int) or raw[key] < 1:
            raise SpecError(f"{key} must be a positive integer")
    for key in ("k", "T", "alpha", "beta"):
        if isinstance(raw[key], bool) or not isinstance(raw[key], (int, float)) or not math.isfinite(raw[key]):
            raise SpecError(f"{key} must be a finite real number")
    m, N = raw["m"], raw["N"]
    mats = {key: parse_complex_array(raw[key], (m, m), key) for key in MATRIX_KEYS}
    grids = {}
    for key in ("F", "G"):
        val = raw[key]
        grids[key] = generate(val, N, m, key) if isinstance(val, dict) else parse_complex_array(val, (N + 1, m), key)
    options = _options(raw.get("options"), overrides)
    try:
        bc = BoundaryConditions(mats["A1"], mats["A2"], mats["B1"], mats["B2"])
        problem = MixedProblem(mats["E"], mats["A"], bc, float(raw["alpha"]), float(raw["beta"]), N,
                               float(raw["k"]), float(raw["T"]), grids["F"], grids["G"])
    except PreconditionError as exc:
        raise SpecError(str(exc)) from exc
    if abs(problem.M * problem.k - problem.T) > 1e-9 * problem.T:
        raise SpecError(f"T/k = {problem.T / problem.k} is not an integer number of steps")
    return ProblemSpec(raw, problem, options, raw.get("name", name), overrides)


def load_spec(path: str | os.PathLike, **overrides) -> ProblemSpec:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except OSError as exc:
        raise SpecError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}: malformed JSON ({exc.msg} at line {exc.lineno})") from exc
    return parse_spec(raw, path.stem, **overrides)


def jsonable(obj):
    """Recursively replace non-finite floats and numpy scalars so the output is strict JSON."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        if math.isnan(f):
            return None
        if math.isinf(f):
            return "inf" if f > 0 else "-inf"
        return f
    if isinstance(obj, (complex, np.complexfloating)):
        return [jsonable(obj.real), jsonable(obj.imag)]
    return obj


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, indent=2) + "\n"


def write_atomic(path: str | os.PathLike, data: str | bytes) -> Path:
    """Write to a temporary file in the target directory, then rename over the target."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, mode) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def solution_csv(U: np.ndarray) -> str:
    """Rows ``i, j, u1_re, u1_im, ...`` in (i, j) order with round-trip float formatting."""
    N1, M1, m = U.shape
    header = ["i", "j"] + [f"u{c + 1}_{part}" for c in range(m) for part in ("re", "im")]
    lines = [",".join(header)]
    for i in range(N1):
        for j in range(M1):
            vals = []
            for z in U[i, j]:
                vals += [repr(float(z.real)), repr(float(z.imag))]
            lines.append(",".join([str(i), str(j), *vals]))
    return "\n".join(lines) + "\n"


def read_solution_csv(text: str) -> np.ndarray:
    rows = [line.split(",") for line in text.strip().splitlines()[1:]]
    data = np.array([[float(x) for x in r] for r in rows])
    N1, M1 = int(data[:, 0].max()) + 1, int(data[:, 1].max()) + 1
    vals = data[:, 2::2] + 1j * data[:, 3::2]
    return vals.reshape(N1, M1, -1)
