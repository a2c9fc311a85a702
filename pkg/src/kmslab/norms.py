"""Grid norms: L^p, homogeneous Sobolev, and Riesz-realised negative order.

Integrals use the periodic trapezoidal rule.  For ``q != 2`` the homogeneous
Sobolev norm is the plain l^q combination over multi-indices of order ``s``
(no multinomial weights), and ``||g||_{W^{-k,q}}`` is ``||I_k g||_{L^q}``,
which is exact at ``q = 2`` and an equivalent norm otherwise.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .spectral import Field, derivative, riesz_potential
from .symbols import multi_indices


@dataclass(frozen=True)
class NormSpec:
    kind: str  # "Lp", "HomSobolev" or "NegSobolev"
    order: int
    exponent: float

    def __post_init__(self):
        if self.kind not in ("Lp", "HomSobolev", "NegSobolev"):
            raise ValueError(f"unknown norm kind {self.kind!r}")
        if not (np.isfinite(self.exponent) and self.exponent >= 1):
            raise ValueError("exponent must be finite and >= 1")
        if self.kind == "HomSobolev" and self.order < 0:
            raise ValueError("HomSobolev order must be >= 0")
        if self.kind == "NegSobolev" and self.order < 1:
            raise ValueError("NegSobolev order must be >= 1")

    def __call__(self, f: Field) -> float:
        if self.kind == "Lp":
            return lp_norm(f, self.exponent)
        if self.kind == "HomSobolev":
            return hom_sobolev_norm(f, self.order, self.exponent)
        return neg_sobolev_norm(f, self.order, self.exponent)


def lp_norm(f: Field, p: float) -> float:
    """``(sum |f(x)|^p h^n)^(1/p)`` with the Euclidean norm on values."""
    if p < 1:
        raise ValueError("p must be >= 1")
    mag = np.linalg.norm(f.values, axis=-1)
    if p == 1:
        return float(mag.sum() * f.grid.cell_volume)
    return float((np.sum(mag ** p) * f.grid.cell_volume) ** (1.0 / p))


def hom_sobolev_norm(f: Field, s: int, q: float) -> float:
    if s < 0:
        raise ValueError("order s must be >= 0")
    if s == 0:
        return lp_norm(f, q)
    total = sum(lp_norm(derivative(f, alpha), q) ** q for alpha in multi_indices(f.grid.n, s))
    return float(total ** (1.0 / q))


def neg_sobolev_norm(f: Field, k: int, q: float, return_flag: bool = False):
    """Riesz-realised ``||f||_{W^{-k,q}}``; optionally also return the mean-drop flag."""
    if k < 1:
        raise ValueError("k must be >= 1")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        pot = riesz_potential(f, k)
    if pot.mean_dropped and not return_flag:
        warnings.warn("neg_sobolev_norm: field mean was dropped", RuntimeWarning, stacklevel=2)
    value = lp_norm(pot, q)
    return (value, pot.mean_dropped) if return_flag else value


def sobolev_conjugate(p: float, n: int) -> float:
    """``p* = np / (n - p)`` for ``1 <= p < n``."""
    if not 1 <= p < n:
        raise ValueError(f"need 1 <= p < n, got p={p}, n={n}")
    return n * p / (n - p)
