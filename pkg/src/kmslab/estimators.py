"""scikit-learn style wrappers.

A field on an ``N^n`` grid is seen as a sample matrix ``X`` of shape
``(N**n, dimV)``: one row per grid point, one column per component.  The grid
itself is a hyper-parameter, so these transformers compose with
:class:`sklearn.pipeline.Pipeline` and support ``get_params``/``set_params``.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .lab import EnsembleConfig, Scenario, estimate_constant, kms_sides
from .presets import operator_preset, part_map_preset
from .spectral import Field, Grid, kms_correction, project_symbol_kernel, projector_table
from .symbols import DEFAULT_TOL, DiffOp, PartMap


def _resolve_operator(operator) -> DiffOp:
    return operator_preset(operator) if isinstance(operator, str) else operator


def _resolve_part_map(part_map, dimV: int) -> PartMap:
    if part_map is None:
        return part_map_preset("zero", dimV)
    return part_map_preset(part_map, dimV) if isinstance(part_map, str) else part_map


class _GridTransformer(TransformerMixin, BaseEstimator):
    def _grid(self) -> Grid:
        return Grid(self.n_dims, self.n_points, self.period)

    def _validate(self, X, reset: bool) -> np.ndarray:
        X = check_array(X, dtype=np.float64, ensure_min_samples=1)
        grid = self._grid()
        if X.shape[0] != grid.N ** grid.n:
            raise ValueError(f"X has {X.shape[0]} rows, grid {grid.shape} needs {grid.N ** grid.n}")
        if reset:
            self.n_features_in_ = X.shape[1]
        elif X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, fitted with {self.n_features_in_}")
        return X

    def _field(self, X) -> Field:
        grid = self._grid()
        return Field(grid, X.reshape(grid.shape + (X.shape[1],)))


class SymbolKernelProjector(_GridTransformer):
    """``X -> Pi_B X``, the Fourier projection onto ``ker B[xi]``.

    Parameters
    ----------
    operator : str or DiffOp
        Operator or preset name.
    n_points : int
        Grid points per axis.
    period : float
        Box length.
    tol : float
        Relative rank tolerance.
    """

    def __init__(self, operator="curl3", n_points=32, period=2 * np.pi, tol=DEFAULT_TOL):
        self.operator = operator
        self.n_points = n_points
        self.period = period
        self.tol = tol

    @property
    def n_dims(self) -> int:
        return _resolve_operator(self.operator).n

    def fit(self, X, y=None):
        X = self._validate(X, reset=True)
        self.operator_ = _resolve_operator(self.operator)
        if X.shape[1] != self.operator_.dimE:
            raise ValueError(f"operator acts on R^{self.operator_.dimE}, X has {X.shape[1]} features")
        projector_table(self.operator_, self._grid(), self.tol)  # warm the multiplier cache
        return self

    def transform(self, X):
        check_is_fitted(self, "operator_")
        X = self._validate(X, reset=False)
        return project_symbol_kernel(self.operator_, self._field(X), self.tol).flat().copy()


class KMSResidual(_GridTransformer):
    """``X -> X - Pi_B Pi_{ker A} X`` (or the correction itself with ``residual=False``)."""

    def __init__(self, operator="matrix_curl3", part_map="tr", n_points=32, period=2 * np.pi,
                 tol=DEFAULT_TOL, mode="full", residual=True):
        self.operator = operator
        self.part_map = part_map
        self.n_points = n_points
        self.period = period
        self.tol = tol
        self.mode = mode
        self.residual = residual

    @property
    def n_dims(self) -> int:
        return _resolve_operator(self.operator).n

    def fit(self, X, y=None):
        X = self._validate(X, reset=True)
        self.operator_ = _resolve_operator(self.operator)
        self.part_map_ = _resolve_part_map(self.part_map, self.operator_.dimE)
        if X.shape[1] != self.operator_.dimE:
            raise ValueError(f"operator acts on R^{self.operator_.dimE}, X has {X.shape[1]} features")
        return self

    def transform(self, X):
        check_is_fitted(self, "operator_")
        X = self._validate(X, reset=False)
        f = self._field(X)
        corr = kms_correction(self.operator_, self.part_map_, f, self.tol, self.mode)
        return (f - corr).flat().copy() if self.residual else corr.flat().copy()


class KMSConstantEstimator(BaseEstimator):
    """Lower estimate of the inequality constant for one scenario.

    ``fit(X)`` takes a stack of fields ``X`` of shape ``(n_fields, N**n, dimV)``;
    ``fit()`` without data draws the deterministic ensemble described by
    ``count``, ``max_frequency``, ``seed`` and ``field_kind``.

    Attributes
    ----------
    constant_ : float
        Largest non-degenerate ratio observed.
    ratios_ : ndarray
        All non-degenerate ratios.
    """

    def __init__(self, operator="matrix_curl3", part_map="tr", p=1.0, n_points=32, period=2 * np.pi,
                 count=200, max_frequency=4, seed=0, field_kind="generic", rhs_floor=1e-12):
        self.operator = operator
        self.part_map = part_map
        self.p = p
        self.n_points = n_points
        self.period = period
        self.count = count
        self.max_frequency = max_frequency
        self.seed = seed
        self.field_kind = field_kind
        self.rhs_floor = rhs_floor

    def _scenario(self) -> Scenario:
        op = _resolve_operator(self.operator)
        return Scenario(_resolve_part_map(self.part_map, op.dimE), op, float(self.p))

    def fit(self, X=None, y=None):
        sc = self._scenario()
        grid = Grid(sc.n, self.n_points, self.period)
        if X is None:
            cfg = EnsembleConfig(self.count, self.max_frequency, self.seed, self.field_kind, self.rhs_floor)
            summary = estimate_constant(sc, grid, cfg)
            self.ratios_ = np.array(summary.ratios)
            self.constant_ = summary.max_ratio
            self.argmax_ = summary.argmax_index
            return self
        X = np.asarray(X, dtype=float)
        if X.ndim != 3 or X.shape[1] != grid.N ** grid.n or X.shape[2] != sc.A.dimV:
            raise ValueError(f"X must have shape (n_fields, {grid.N ** grid.n}, {sc.A.dimV}), got {X.shape}")
        ratios, idx = [], []
        for i, rows in enumerate(X):
            rep = kms_sides(sc, Field(grid, rows.reshape(grid.shape + (sc.A.dimV,))), self.rhs_floor)
            if not rep.degenerate:
                ratios.append(rep.ratio)
                idx.append(i)
        if not ratios:
            raise ValueError("every field in X is degenerate")
        self.ratios_ = np.array(ratios)
        best = int(np.argmax(self.ratios_))
        self.constant_ = float(self.ratios_[best])
        self.argmax_ = idx[best]
        return self
