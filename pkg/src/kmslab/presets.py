"""Named operators and part maps, plus the JSON operator-spec format.

Matrix-valued fields ``P`` on ``R^n`` are flattened row-major, so entry
``P[i, j]`` sits at index ``n*i + j``.  Matrix Curl and Div act row-wise.

Operator spec JSON::

    {"n": 3, "k": 1, "dimE": 3, "dimF": 3,
     "coeffs": [{"alpha": [1, 0, 0], "matrix": [[...], ...]}, ...],
     "part_map": {"dimV": 3, "dimVtilde": 1, "matrix": [[...]]}}

``"operator": "<preset>"`` may replace the coefficient fields and
``"part_map": "<preset>"`` the part-map object.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import numpy as np

from .symbols import DiffOp, PartMap, SymbolError

OPERATOR_PRESETS = ("grad", "curl3", "matrix_curl3", "matrix_div", "sym_curl3", "laplacian", "partial1")
PART_MAP_PRESETS = ("tr", "dev", "sym", "id", "zero")


class SpecError(ValueError):
    """Malformed operator/part-map specification."""


def levi_civita() -> np.ndarray:
    eps = np.zeros((3, 3, 3))
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        eps[i, j, k] = 1.0
        eps[i, k, j] = -1.0
    return eps


def _unit(n: int, j: int, order: int = 1) -> Tuple[int, ...]:
    alpha = [0] * n
    alpha[j] = order
    return tuple(alpha)


def grad(n: int = 3) -> DiffOp:
    return DiffOp(n, 1, 1, n, {_unit(n, j): np.eye(n)[:, [j]] for j in range(n)}, name="grad")


def curl3() -> DiffOp:
    # (curl v)_i = eps_ijk d_j v_k
    eps = levi_civita()
    return DiffOp(3, 1, 3, 3, {_unit(3, j): eps[:, j, :] for j in range(3)}, name="curl")


def matrix_curl3() -> DiffOp:
    eps = levi_civita()
    return DiffOp(3, 1, 9, 9, {_unit(3, j): np.kron(np.eye(3), eps[:, j, :]) for j in range(3)},
                  name="Curl")


def matrix_div(n: int = 3) -> DiffOp:
    coeffs = {}
    for j in range(n):
        m = np.zeros((n, n * n))
        for i in range(n):
            m[i, n * i + j] = 1.0
        coeffs[_unit(n, j)] = m
    return DiffOp(n, 1, n * n, n, coeffs, name="Div")


def sym_curl3() -> DiffOp:
    return matrix_curl3().compose_left(sym_matrix(3), name="sym Curl")


def laplacian(n: int = 3) -> DiffOp:
    return DiffOp(n, 2, 1, 1, {_unit(n, j, 2): [[1.0]] for j in range(n)}, name="Laplacian")


def partial1(n: int = 3) -> DiffOp:
    return DiffOp(n, 1, 1, 1, {_unit(n, 0): [[1.0]]}, name="d1")


def trace_matrix(n: int = 3) -> np.ndarray:
    return np.eye(n).reshape(1, n * n)


def sym_matrix(n: int = 3) -> np.ndarray:
    I = np.eye(n * n)
    T = np.eye(n * n).reshape(n, n, n * n).transpose(1, 0, 2).reshape(n * n, n * n)
    return 0.5 * (I + T)


def dev_matrix(n: int = 3) -> np.ndarray:
    t = trace_matrix(n)
    return np.eye(n * n) - t.T @ t / n


def operator_preset(name: str, n: int = 3) -> DiffOp:
    builders = {
        "grad": lambda: grad(n),
        "curl3": curl3,
        "matrix_curl3": matrix_curl3,
        "matrix_div": lambda: matrix_div(n),
        "sym_curl3": sym_curl3,
        "laplacian": lambda: laplacian(n),
        "partial1": lambda: partial1(n),
    }
    if name not in builders:
        raise SpecError(f"unknown operator preset {name!r}; known: {', '.join(OPERATOR_PRESETS)}")
    return builders[name]()


def part_map_preset(name: str, dimV: int) -> PartMap:
    """Part-map preset acting on ``R^dimV``; tr/dev/sym need ``dimV`` a square."""
    if name in ("id", "zero"):
        return PartMap(np.eye(dimV) if name == "id" else np.zeros((dimV, dimV)), name=name)
    m = int(round(np.sqrt(dimV)))
    if m * m != dimV:
        raise SpecError(f"part map {name!r} needs square matrices, but dimV={dimV}")
    mats = {"tr": trace_matrix, "dev": dev_matrix, "sym": sym_matrix}
    if name not in mats:
        raise SpecError(f"unknown part-map preset {name!r}; known: {', '.join(PART_MAP_PRESETS)}")
    return PartMap(mats[name](m), name=name)


def parse_presets(text: str) -> Tuple[PartMap, DiffOp]:
    """Parse ``presets:<partmap>,<operator>``."""
    body = text.split(":", 1)[1] if text.startswith("presets:") else text
    parts = [p.strip() for p in body.split(",")]
    if len(parts) != 2 or not all(parts):
        raise SpecError(f"expected 'presets:<partmap>,<operator>', got {text!r}")
    op = operator_preset(parts[1])
    return part_map_preset(parts[0], op.dimE), op


def _require(obj: Dict[str, Any], key: str, where: str):
    if key not in obj:
        raise SpecError(f"{where}: missing field {key!r}")
    return obj[key]


def operator_from_dict(obj: Dict[str, Any]) -> DiffOp:
    if "operator" in obj:
        return operator_preset(obj["operator"], int(obj.get("n", 3)))
    try:
        n, k = int(_require(obj, "n", "operator")), int(_require(obj, "k", "operator"))
        dimE, dimF = int(_require(obj, "dimE", "operator")), int(_require(obj, "dimF", "operator"))
        raw = _require(obj, "coeffs", "operator")
        if isinstance(raw, str):
            op = operator_preset(raw, n)
            if (op.k, op.dimE, op.dimF) != (k, dimE, dimF):
                raise SpecError(f"operator: preset {raw!r} has k={op.k}, dimE={op.dimE}, dimF={op.dimF}; "
                                f"spec declares k={k}, dimE={dimE}, dimF={dimF}")
            return op
        coeffs = {}
        for idx, entry in enumerate(_require(obj, "coeffs", "operator")):
            where = f"operator.coeffs[{idx}]"
            alpha = tuple(_require(entry, "alpha", where))
            mat = np.array(_require(entry, "matrix", where), dtype=float)
            if mat.shape != (dimF, dimE):
                raise SpecError(f"{where}.matrix: shape {mat.shape}, expected ({dimF}, {dimE})")
            coeffs[alpha] = mat
        op = DiffOp(n, k, dimE, dimF, coeffs, name=str(obj.get("name", "")))
    except SymbolError as exc:
        raise SpecError(f"operator: {exc}") from exc
    except (TypeError, ValueError) as exc:
        if isinstance(exc, SpecError):
            raise
        raise SpecError(f"operator: {exc}") from exc
    if op.is_zero:
        raise SpecError("operator: all coefficient matrices are zero")
    return op


def part_map_from_dict(obj: Any, dimV: int) -> PartMap:
    if isinstance(obj, str):
        return part_map_preset(obj, dimV)
    dv = int(_require(obj, "dimV", "part_map"))
    dvt = int(_require(obj, "dimVtilde", "part_map"))
    mat = np.array(_require(obj, "matrix", "part_map"), dtype=float)
    if mat.shape != (dvt, dv):
        raise SpecError(f"part_map.matrix: shape {mat.shape}, expected ({dvt}, {dv})")
    if dv != dimV:
        raise SpecError(f"part_map.dimV={dv} does not match operator dimE={dimV}")
    return PartMap(mat, name=str(obj.get("name", "custom")))


def load_spec(source: str) -> Tuple[Optional[PartMap], DiffOp]:
    """Load a ``presets:...`` string or an operator-spec JSON file.

    A spec without ``part_map`` returns ``None`` for it.
    """
    if source.startswith("presets:"):
        return parse_presets(source)
    path = Path(source)
    try:
        obj = json.loads(path.read_text())
    except FileNotFoundError as exc:
        raise SpecError(f"{source}: no such file") from exc
    except json.JSONDecodeError as exc:
        raise SpecError(f"{source}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(obj, dict):
        raise SpecError(f"{source}: top level must be an object")
    op = operator_from_dict(obj)
    A = part_map_from_dict(obj["part_map"], op.dimE) if "part_map" in obj else None
    return A, op
