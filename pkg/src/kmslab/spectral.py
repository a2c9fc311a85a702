"""Fourier multipliers on the periodic box ``[0, L)^n``.

Fields are sampled on a uniform ``N^n`` grid and stored as arrays of shape
``(N,)*n + (dimV,)`` (axes row-major, component index fastest).  Every
operator here is diagonal in frequency: ``d^alpha`` becomes
``(i xi)^alpha`` with ``xi = 2 pi m / L``.  The zero frequency carries the
identity projector, and Riesz potentials drop it.

The Nyquist wavenumber ``-N/2`` has no partner ``+N/2`` on the lattice, so
it is set to 0 in every multiplier.  With that single convention the discrete
identities hold to round-off (``curl grad = 0``, ``B Pi_B = 0``, ...) and all
outputs of real fields are real.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .symbols import (
    DEFAULT_TOL,
    DiffOp,
    PartMap,
    eval_symbol_batch,
    kernel_projector_batch,
)


class FieldError(ValueError):
    """Shape or grid mismatch between fields and operators."""


class MeanDroppedWarning(RuntimeWarning):
    """A Riesz potential discarded a non-negligible zero mode."""


@dataclass(frozen=True)
class Grid:
    n: int
    N: int
    period: float = 2 * np.pi

    def __post_init__(self):
        if self.n < 1:
            raise FieldError(f"grid dimension must be >= 1, got {self.n}")
        if self.N < 8 or self.N % 2:
            raise FieldError(f"grid size must be even and >= 8, got {self.N}")
        if not self.period > 0:
            raise FieldError("period must be positive")

    @property
    def shape(self) -> tuple:
        return (self.N,) * self.n

    @property
    def spacing(self) -> float:
        return self.period / self.N

    @property
    def cell_volume(self) -> float:
        return self.spacing ** self.n

    def coordinates(self) -> np.ndarray:
        """Node coordinates, shape ``(N,)*n + (n,)``."""
        x = np.arange(self.N) * self.spacing
        return np.stack(np.meshgrid(*([x] * self.n), indexing="ij"), axis=-1)

    def wave_numbers_1d(self) -> np.ndarray:
        k = 2 * np.pi * np.fft.fftfreq(self.N, d=self.spacing)
        k[self.N // 2] = 0.0
        return k

    def wave_vectors(self) -> np.ndarray:
        """Frequencies ``2 pi m / L`` (Nyquist zeroed), shape ``(N,)*n + (n,)``."""
        k = self.wave_numbers_1d()
        return np.stack(np.meshgrid(*([k] * self.n), indexing="ij"), axis=-1)

    def summary(self) -> dict:
        return {"n": self.n, "N": self.N, "period": float(self.period)}


@dataclass(frozen=True, eq=False)
class Field:
    """A ``R^dimV``-valued grid function.

    ``compact`` marks fields known to vanish outside the centred half-box.
    ``mean_dropped`` is set by :func:`riesz_potential` when it discarded a
    non-negligible zero mode.
    """

    grid: Grid
    values: np.ndarray
    compact: bool = False
    mean_dropped: bool = False

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape == self.grid.shape:
            v = v[..., None]
        if v.shape[:-1] != self.grid.shape or v.ndim != self.grid.n + 1:
            raise FieldError(f"values of shape {v.shape} do not fit grid {self.grid.shape}")
        if not np.all(np.isfinite(v)):
            raise FieldError("field has non-finite values")
        v = v.view()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def dimV(self) -> int:
        return self.values.shape[-1]

    def flat(self) -> np.ndarray:
        """Values as an ``(N**n, dimV)`` matrix."""
        return self.values.reshape(-1, self.dimV)

    def with_values(self, values, compact: bool = False, mean_dropped: bool = False) -> "Field":
        return Field(self.grid, values, compact=compact, mean_dropped=mean_dropped)

    def __add__(self, other: "Field") -> "Field":
        _same_grid(self, other)
        return self.with_values(self.values + other.values)

    def __sub__(self, other: "Field") -> "Field":
        _same_grid(self, other)
        return self.with_values(self.values - other.values)

    def __mul__(self, c: float) -> "Field":
        return self.with_values(c * self.values, compact=self.compact)

    __rmul__ = __mul__


def _same_grid(a: Field, b: Field):
    if a.grid != b.grid or a.values.shape != b.values.shape:
        raise FieldError("fields live on different grids or have different value dimensions")


def pointwise(M: np.ndarray, f: Field) -> Field:
    """Apply a constant matrix at every grid point."""
    M = np.asarray(M, dtype=float)
    if M.shape[1] != f.dimV:
        raise FieldError(f"matrix with {M.shape[1]} columns applied to a {f.dimV}-component field")
    return Field(f.grid, f.values @ M.T, compact=f.compact)


def fft(f: Field) -> np.ndarray:
    return np.fft.fftn(f.values, axes=tuple(range(f.grid.n)))


def ifft_real(grid: Grid, spec: np.ndarray) -> np.ndarray:
    return np.fft.ifftn(spec, axes=tuple(range(grid.n))).real


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@lru_cache(maxsize=8)
def symbol_table(op: DiffOp, grid: Grid) -> np.ndarray:
    """Real symbol ``B[xi_m]`` at every lattice frequency."""
    if op.n != grid.n:
        raise FieldError(f"operator on R^{op.n} applied on a {grid.n}-dimensional grid")
    return _readonly(eval_symbol_batch(op, grid.wave_vectors()))


@lru_cache(maxsize=8)
def projector_table(op: DiffOp, grid: Grid, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Per-frequency orthogonal projector onto ``ker B[xi_m]`` (identity at 0)."""
    # homogeneity: the kernel only depends on the direction, so evaluate on unit vectors
    xis = grid.wave_vectors()
    norms = np.linalg.norm(xis, axis=-1, keepdims=True)
    unit = np.divide(xis, norms, out=np.zeros_like(xis), where=norms > 0)
    return _readonly(kernel_projector_batch(eval_symbol_batch(op, unit), tol, op.ref_scale))


@lru_cache(maxsize=8)
def restricted_projector_table(op: DiffOp, A: PartMap, grid: Grid, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Per-frequency projector onto ``ker B[xi] ∩ ker A``, embedded in ``V``."""
    K = A.kernel_basis
    xis = grid.wave_vectors()
    norms = np.linalg.norm(xis, axis=-1, keepdims=True)
    unit = np.divide(xis, norms, out=np.zeros_like(xis), where=norms > 0)
    sym = eval_symbol_batch(op, unit) @ K
    inner = kernel_projector_batch(sym, tol, op.ref_scale)
    return _readonly(np.einsum("ia,...ab,jb->...ij", K, inner, K))


def _check_op_field(op: DiffOp, f: Field):
    if f.dimV != op.dimE:
        raise FieldError(f"{op.name or 'operator'} acts on R^{op.dimE}, field has {f.dimV} components")
    if op.n != f.grid.n:
        raise FieldError(f"operator on R^{op.n} applied on a {f.grid.n}-dimensional grid")


def apply_multiplier(f: Field, table: np.ndarray, phase: complex = 1.0) -> Field:
    """Apply ``phase * table[m]`` (shape ``(..., out, in)``) to the spectrum of ``f``."""
    spec = fft(f)
    out = np.einsum("...ij,...j->...i", table, spec)
    if phase != 1.0:
        out *= phase
    return Field(f.grid, ifft_real(f.grid, out))


def apply_diffop(op: DiffOp, f: Field) -> Field:
    """Spectral ``B f``: spectrum ``i^k B[xi] f^``."""
    _check_op_field(op, f)
    return apply_multiplier(f, symbol_table(op, f.grid), phase=1j ** op.k)


def project_symbol_kernel(op: DiffOp, f: Field, tol: float = DEFAULT_TOL) -> Field:
    """``Pi_B f``: per-frequency projection onto ``ker B[xi]``."""
    _check_op_field(op, f)
    return apply_multiplier(f, projector_table(op, f.grid, tol))


def kms_correction(op: DiffOp, A: PartMap, f: Field, tol: float = DEFAULT_TOL,
                   mode: str = "full") -> Field:
    """The correction ``Pi_B Pi_{ker A} f``.

    ``mode="full"`` projects onto ``ker B[xi]`` in all of ``V`` (the multiplier
    form of the explicit trace/Curl formula).  ``mode="restricted"`` projects
    onto ``ker B[xi] ∩ ker A`` instead; both agree whenever
    ``ker A ⊆ ker B[xi]``.
    """
    _check_op_field(op, f)
    if A.dimV != f.dimV:
        raise FieldError(f"part map acts on R^{A.dimV}, field has {f.dimV} components")
    if mode == "full":
        return project_symbol_kernel(op, pointwise(A.kernel_projector, f), tol)
    if mode == "restricted":
        return apply_multiplier(f, restricted_projector_table(op, A, f.grid, tol))
    raise ValueError(f"unknown correction mode {mode!r}")


def riesz_potential(f: Field, s: float, mean_tol: float = 1e-10) -> Field:
    """Multiply the spectrum by ``|xi|^-s`` and drop the zero mode.

    Warns with :class:`MeanDroppedWarning` and sets ``mean_dropped`` when the
    discarded mean exceeds ``mean_tol`` relative to the field norm.
    """
    if s < 0:
        raise ValueError("order s must be nonnegative")
    spec = fft(f)
    zero = (0,) * f.grid.n
    total = np.sqrt(np.sum(np.abs(spec) ** 2))
    dropped = bool(total > 0 and np.linalg.norm(spec[zero]) > mean_tol * total)
    if dropped:
        warnings.warn("riesz_potential: non-zero mean dropped", MeanDroppedWarning, stacklevel=2)
    xi = np.linalg.norm(f.grid.wave_vectors(), axis=-1)
    mult = np.zeros_like(xi)
    np.power(xi, -float(s), out=mult, where=xi > 0)
    spec *= mult[..., None]
    return Field(f.grid, ifft_real(f.grid, spec), mean_dropped=dropped)


def derivative(f: Field, alpha: Sequence[int]) -> Field:
    """Spectral ``d^alpha f``."""
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != f.grid.n or any(a < 0 for a in alpha):
        raise FieldError(f"bad multi-index {alpha} for a {f.grid.n}-dimensional grid")
    if not any(alpha):
        return f
    k = f.grid.wave_numbers_1d()
    spec = fft(f)
    for axis, a in enumerate(alpha):
        if a:
            shape = [1] * (f.grid.n + 1)
            shape[axis] = f.grid.N
            spec = spec * ((1j * k) ** a).reshape(shape)
    return Field(f.grid, ifft_real(f.grid, spec))
