"""Linear algebra on symbols of homogeneous constant-coefficient operators.

An operator of order ``k`` on ``R^n`` from ``E = R^dimE`` to ``F = R^dimF`` is
stored as a map ``alpha -> A_alpha`` over multi-indices of order exactly ``k``.
Its (real) symbol is ``A[xi] = sum_alpha A_alpha xi^alpha``.  The factor
``i^k`` coming from the Fourier transform of ``d^alpha`` is left to
:mod:`kmslab.spectral`; it does not change kernels, images or ranks.

All numerical rank decisions share one convention: a singular value counts as
zero when it is ``<= tol * max(sigma_max, scale) * max(rows, cols)`` with
``tol = 1e-9`` by default.  ``scale`` is the operator's coefficient size, so a
symbol that is zero up to round-off (e.g. after restriction to a kernel it
annihilates) is recognised as zero rather than as a tiny full-rank matrix.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Dict, Iterable, Mapping, Optional, Tuple

import numpy as np

DEFAULT_TOL = 1e-9
#: principal-angle tolerance used when intersecting subspaces (on 1 - cos)
DEFAULT_ANGLE_TOL = 1e-10

MultiIndex = Tuple[int, ...]


class SymbolError(ValueError):
    """Raised on inconsistent shapes or invalid operator data."""


def multi_indices(n: int, order: int) -> list[MultiIndex]:
    """All multi-indices of length ``n`` and the given order, in lexicographic order."""
    if n == 1:
        return [(order,)]
    out = []
    for first in range(order, -1, -1):
        for rest in multi_indices(n - 1, order - first):
            out.append((first,) + rest)
    return out


def _check_multi_index(alpha: Iterable[int], n: int) -> MultiIndex:
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != n:
        raise SymbolError(f"multi-index {alpha} has length {len(alpha)}, expected {n}")
    if any(a < 0 for a in alpha):
        raise SymbolError(f"multi-index {alpha} has negative entries")
    return alpha


def _sign_normalize(basis: np.ndarray) -> np.ndarray:
    """Flip columns so that the first entry above 1e-12 in magnitude is positive."""
    basis = np.array(basis, dtype=float, copy=True)
    for j in range(basis.shape[1]):
        col = basis[:, j]
        nz = np.flatnonzero(np.abs(col) > 1e-12)
        if nz.size and col[nz[0]] < 0:
            basis[:, j] = -col
    return basis


def _threshold(s: np.ndarray, shape: Tuple[int, int], tol: float, scale: float = 0.0) -> float:
    smax = float(s[0]) if s.size else 0.0
    return tol * max(smax, scale) * max(shape)


@dataclass(frozen=True, eq=False)
class DiffOp:
    """Homogeneous constant-coefficient differential operator.

    Parameters
    ----------
    n : int
        Spatial dimension.
    k : int
        Order; every multi-index key must have order ``k``.
    dimE, dimF : int
        Domain and codomain dimensions.
    coeffs : mapping
        ``alpha -> (dimF, dimE)`` coefficient matrices.
    name : str, optional
        Label used in reports.
    ref_scale : float, optional
        Coefficient size used as the absolute floor of rank decisions at unit
        frequencies; defaults to the largest coefficient spectral norm.
    """

    n: int
    k: int
    dimE: int
    dimF: int
    coeffs: Mapping[MultiIndex, np.ndarray]
    name: str = ""
    ref_scale: Optional[float] = None
    _key: bytes = field(default=b"", repr=False)

    def __post_init__(self):
        if self.n < 1 or self.k < 1:
            raise SymbolError(f"need n >= 1 and k >= 1, got n={self.n}, k={self.k}")
        clean: Dict[MultiIndex, np.ndarray] = {}
        for alpha, mat in self.coeffs.items():
            alpha = _check_multi_index(alpha, self.n)
            if sum(alpha) != self.k:
                raise SymbolError(f"multi-index {alpha} has order {sum(alpha)}, operator order is {self.k}")
            mat = np.array(mat, dtype=float)
            if mat.size != self.dimF * self.dimE or (mat.ndim == 2 and mat.shape != (self.dimF, self.dimE)):
                raise SymbolError(f"coefficient for {alpha} does not have shape ({self.dimF}, {self.dimE})")
            mat = mat.reshape(self.dimF, self.dimE)
            if not np.all(np.isfinite(mat)):
                raise SymbolError(f"coefficient for {alpha} has non-finite entries")
            mat.setflags(write=False)
            if alpha in clean:
                raise SymbolError(f"duplicate multi-index {alpha}")
            clean[alpha] = mat
        clean = dict(sorted(clean.items()))
        object.__setattr__(self, "coeffs", clean)
        if self.ref_scale is None:
            norms = [np.linalg.norm(m, 2) for m in clean.values() if m.size]
            object.__setattr__(self, "ref_scale", float(max(norms, default=0.0)))
        h = hashlib.sha256(repr((self.n, self.k, self.dimE, self.dimF, self.ref_scale)).encode())
        for alpha, mat in clean.items():
            h.update(repr(alpha).encode())
            h.update(np.ascontiguousarray(mat).tobytes())
        object.__setattr__(self, "_key", h.digest())

    def __eq__(self, other):
        return isinstance(other, DiffOp) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    @property
    def is_zero(self) -> bool:
        return all(not np.any(m) for m in self.coeffs.values())

    def scaled(self, c: float) -> "DiffOp":
        return DiffOp(self.n, self.k, self.dimE, self.dimF,
                      {a: c * m for a, m in self.coeffs.items()}, name=self.name,
                      ref_scale=abs(c) * self.ref_scale)

    def compose_left(self, M: np.ndarray, name: str = "") -> "DiffOp":
        """The operator ``M o self`` for a constant matrix ``M``."""
        M = np.asarray(M, dtype=float)
        if M.shape[1] != self.dimF:
            raise SymbolError(f"cannot compose {M.shape} matrix after operator into R^{self.dimF}")
        return DiffOp(self.n, self.k, self.dimE, M.shape[0],
                      {a: M @ m for a, m in self.coeffs.items()}, name=name or self.name)


@dataclass(frozen=True)
class Subspace:
    """Subspace of ``R^ambient_dim`` given by a column-orthonormal basis."""

    ambient_dim: int
    basis: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=float).reshape(self.ambient_dim, -1)
        object.__setattr__(self, "basis", b)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, np.zeros((ambient_dim, 0)))

    @classmethod
    def full(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, np.eye(ambient_dim))


def eval_symbol(op: DiffOp, xi) -> np.ndarray:
    """Evaluate ``sum_alpha A_alpha xi^alpha`` at one frequency."""
    xi = np.asarray(xi, dtype=float)
    if xi.shape != (op.n,):
        raise SymbolError(f"xi has shape {xi.shape}, expected ({op.n},)")
    out = np.zeros((op.dimF, op.dimE))
    for alpha, mat in op.coeffs.items():
        out += np.prod(xi ** np.array(alpha)) * mat
    return out


def eval_symbol_batch(op: DiffOp, xis: np.ndarray) -> np.ndarray:
    """Vectorised :func:`eval_symbol` over the leading axes of ``xis[..., n]``."""
    xis = np.asarray(xis, dtype=float)
    if xis.shape[-1] != op.n:
        raise SymbolError(f"last axis of xis is {xis.shape[-1]}, expected {op.n}")
    out = np.zeros(xis.shape[:-1] + (op.dimF, op.dimE))
    for alpha, mat in op.coeffs.items():
        mono = np.ones(xis.shape[:-1])
        for j, a in enumerate(alpha):
            if a:
                mono = mono * xis[..., j] ** a
        out += mono[..., None, None] * mat
    return out


def numerical_rank(M: np.ndarray, tol: float = DEFAULT_TOL, scale: float = 0.0) -> int:
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(s > _threshold(s, M.shape, tol, scale)))


def kernel_projector(M: np.ndarray, tol: float = DEFAULT_TOL, scale: float = 0.0) -> np.ndarray:
    """Orthogonal projector onto the numerical kernel of ``M``.

    The zero matrix has the whole space as kernel, so its projector is the
    identity.
    """
    if tol <= 0:
        raise SymbolError("tol must be positive")
    M = np.atleast_2d(np.asarray(M, dtype=float))
    ncols = M.shape[1]
    if M.shape[0] == 0 or not np.any(M):
        return np.eye(ncols)
    _, s, vh = np.linalg.svd(M, full_matrices=True)
    rank = int(np.sum(s > _threshold(s, M.shape, tol, scale)))
    null = vh[rank:].T
    return null @ null.T


def kernel_projector_batch(Ms: np.ndarray, tol: float = DEFAULT_TOL, scale: float = 0.0) -> np.ndarray:
    """:func:`kernel_projector` applied to a stack ``Ms[..., rows, cols]``."""
    Ms = np.asarray(Ms, dtype=float)
    lead, (rows, cols) = Ms.shape[:-2], Ms.shape[-2:]
    flat = Ms.reshape(-1, rows, cols)
    out = np.empty((flat.shape[0], cols, cols))
    if rows == 0 or cols == 0:
        out[:] = np.eye(cols)
        return out.reshape(lead + (cols, cols))
    _, s, vh = np.linalg.svd(flat, full_matrices=True)
    thr = tol * np.maximum(s[:, :1], scale) * max(rows, cols)
    # singular values beyond min(rows, cols) are implicitly zero
    keep = np.zeros((flat.shape[0], cols), dtype=bool)
    keep[:, : s.shape[1]] = s > thr
    null = np.where(keep[:, :, None], 0.0, vh)
    out = np.einsum("bki,bkj->bij", null, null)
    return out.reshape(lead + (cols, cols))


def image_basis(M: np.ndarray, tol: float = DEFAULT_TOL, scale: float = 0.0) -> Subspace:
    """Orthonormal basis of the numerical image of ``M``."""
    if tol <= 0:
        raise SymbolError("tol must be positive")
    M = np.atleast_2d(np.asarray(M, dtype=float))
    rows = M.shape[0]
    if M.size == 0 or not np.any(M):
        return Subspace.zero(rows)
    u, s, _ = np.linalg.svd(M, full_matrices=False)
    rank = int(np.sum(s > _threshold(s, M.shape, tol, scale)))
    return Subspace(rows, _sign_normalize(u[:, :rank]))


def subspace_intersect(S1: Subspace, S2: Subspace, tol: float = DEFAULT_ANGLE_TOL) -> Subspace:
    """Intersection of two subspaces via principal angles.

    Principal vectors whose cosine is within ``tol`` of 1 span the
    intersection.
    """
    if S1.ambient_dim != S2.ambient_dim:
        raise SymbolError(f"ambient dimensions differ: {S1.ambient_dim} vs {S2.ambient_dim}")
    if S1.dim == 0 or S2.dim == 0:
        return Subspace.zero(S1.ambient_dim)
    u, s, _ = np.linalg.svd(S1.basis.T @ S2.basis)
    keep = s >= 1.0 - tol
    basis = S1.basis @ u[:, : s.size][:, keep]
    if basis.shape[1]:
        basis, _ = np.linalg.qr(basis)
    return Subspace(S1.ambient_dim, _sign_normalize(basis))


@dataclass(frozen=True, eq=False)
class PartMap:
    """Linear part map ``A: V -> V~`` together with its kernel data.

    ``compl_bound`` is the smallest ``c`` with
    ``|P_perp v| <= c |A v|`` where ``P_perp`` projects onto ``(ker A)^perp``.
    For a map with ``ker A = V`` it is 0 and ``degenerate`` is set.
    """

    matrix: np.ndarray
    name: str = ""
    tol: float = DEFAULT_TOL
    kernel_basis: np.ndarray = field(init=False, repr=False)
    kernel_projector: np.ndarray = field(init=False, repr=False)
    compl_bound: float = field(init=False)
    degenerate: bool = field(init=False)

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.matrix, dtype=float))
        if not np.all(np.isfinite(A)):
            raise SymbolError("part map has non-finite entries")
        A.setflags(write=False)
        object.__setattr__(self, "matrix", A)
        dimV = A.shape[1]
        if A.shape[0] == 0 or not np.any(A):
            K = np.eye(dimV)
            smin = 0.0
        else:
            _, s, vh = np.linalg.svd(A, full_matrices=True)
            rank = int(np.sum(s > _threshold(s, A.shape, self.tol)))
            K = vh[rank:].T
            smin = float(s[rank - 1])
        K = _sign_normalize(K)
        P = K @ K.T
        for arr in (K, P):
            arr.setflags(write=False)
        object.__setattr__(self, "kernel_basis", K)
        object.__setattr__(self, "kernel_projector", P)
        object.__setattr__(self, "compl_bound", 1.0 / smin if smin > 0 else 0.0)
        object.__setattr__(self, "degenerate", smin == 0.0)

    @property
    def dimV(self) -> int:
        return self.matrix.shape[1]

    @property
    def dimVtilde(self) -> int:
        return self.matrix.shape[0]

    @property
    def kernel_dim(self) -> int:
        return self.kernel_basis.shape[1]

    @property
    def complement_projector(self) -> np.ndarray:
        return np.eye(self.dimV) - self.kernel_projector

    def __eq__(self, other):
        return isinstance(other, PartMap) and self.matrix.shape == other.matrix.shape \
            and np.array_equal(self.matrix, other.matrix) and self.tol == other.tol

    def __hash__(self):
        return hash((self.matrix.shape, self.matrix.tobytes(), self.tol))


def restrict_to_kernel(op: DiffOp, A: PartMap) -> DiffOp:
    """The operator ``B`` restricted to ``ker A``, in the orthonormal kernel basis."""
    if op.dimE != A.dimV:
        raise SymbolError(f"operator acts on R^{op.dimE} but part map on R^{A.dimV}")
    K = A.kernel_basis
    return DiffOp(op.n, op.k, K.shape[1], op.dimF,
                  {a: m @ K for a, m in op.coeffs.items()},
                  name=f"{op.name}|ker {A.name}".strip(), ref_scale=op.ref_scale)


def part_map_bound(A: PartMap) -> float:
    """Sharp constant in ``|P_perp v| <= c |A v|``; 0 (flagged degenerate) if ``A = 0``."""
    return A.compl_bound


def min_positive_singular_value(M: np.ndarray, tol: float = DEFAULT_TOL,
                                scale: float = 0.0) -> Optional[float]:
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.size == 0 or not np.any(M):
        return None
    s = np.linalg.svd(M, compute_uv=False)
    pos = s[s > _threshold(s, M.shape, tol, scale)]
    return float(pos[-1]) if pos.size else None
