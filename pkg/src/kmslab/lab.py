"""Numerical checks of corrected Korn-Maxwell-Sobolev inequalities.

For a scenario ``(A, B, p)`` the main inequality compares

    lhs = ||P - Pi_B Pi_{ker A} P||_{W^{k-1,p*}}
    rhs = ||A[P]||_{W^{k-1,p*}} + ||B P||_{L^p}

over test fields ``P``.  Every ratio observed here is a lower bound for the
best constant on the discretisation used; nothing in this module certifies an
upper bound.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Dict, List, Optional, Union

import numpy as np

from .norms import hom_sobolev_norm, lp_norm, neg_sobolev_norm, sobolev_conjugate
from .presets import SpecError, operator_from_dict, operator_preset, part_map_from_dict
from .spectral import (
    Field,
    Grid,
    apply_diffop,
    derivative,
    ifft_real,
    kms_correction,
    pointwise,
    riesz_potential,
)
from .symbols import DEFAULT_TOL, DiffOp, PartMap

FIELD_KINDS = ("generic", "kernelValued", "gradientType", "divFreeGradient")


class LabError(ValueError):
    pass


@dataclass(frozen=True)
class Scenario:
    A: PartMap
    B: DiffOp
    p: float
    label: str = ""

    def __post_init__(self):
        if self.A.dimV != self.B.dimE:
            raise LabError(f"{self.label}: part map on R^{self.A.dimV}, operator on R^{self.B.dimE}")
        sobolev_conjugate(self.p, self.B.n)  # validates 1 <= p < n

    @property
    def n(self) -> int:
        return self.B.n

    @property
    def k(self) -> int:
        return self.B.k

    @property
    def q_star(self) -> float:
        return sobolev_conjugate(self.p, self.n)

    def with_p(self, p: float) -> "Scenario":
        return Scenario(self.A, self.B, p, self.label)

    def summary(self) -> dict:
        return {"label": self.label, "part_map": self.A.name, "operator": self.B.name,
                "n": self.n, "k": self.k, "p": float(self.p), "q_star": float(self.q_star)}


def load_catalog(path: Union[str, Path, None] = None) -> Dict[str, Scenario]:
    """Read a scenario catalog; ``None`` loads the bundled one."""
    if path is None:
        text = resources.files("kmslab").joinpath("data/catalog.json").read_text()
        where = "bundled catalog"
    else:
        where = str(path)
        try:
            text = Path(path).read_text()
        except FileNotFoundError as exc:
            raise SpecError(f"{where}: no such file") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"{where}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    out = {}
    for i, entry in enumerate(obj.get("scenarios", [])):
        try:
            label = entry["label"]
            spec = entry["operator"]
            op = operator_preset(spec, int(entry.get("n", 3))) if isinstance(spec, str) \
                else operator_from_dict(spec)
            A = part_map_from_dict(entry["part_map"], op.dimE)
            out[label] = Scenario(A, op, float(entry["p"]), label)
        except KeyError as exc:
            raise SpecError(f"{where}: scenarios[{i}] missing field {exc.args[0]!r}") from exc
        except (ValueError, TypeError) as exc:
            raise SpecError(f"{where}: scenarios[{i}]: {exc}") from exc
    if not out:
        raise SpecError(f"{where}: no scenarios")
    return out


@dataclass
class RatioReport:
    lhs: float
    rhs: float
    ratio: float
    degenerate: bool
    seed: Optional[int] = None
    index: Optional[int] = None
    grid: Optional[dict] = None
    field_kind: str = "external"
    extra: Dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = {"lhs": self.lhs, "rhs": self.rhs, "ratio": self.ratio, "degenerate": self.degenerate,
             "seed": self.seed, "index": self.index, "grid": self.grid, "field_kind": self.field_kind}
        d.update(self.extra)
        return d


@dataclass(frozen=True)
class EnsembleConfig:
    count: int = 200
    max_frequency: int = 4
    seed: int = 0
    field_kind: str = "generic"
    rhs_floor: float = 1e-12

    def check(self, grid: Grid) -> None:
        if self.count < 1:
            raise LabError("count must be >= 1")
        if self.field_kind not in FIELD_KINDS:
            raise LabError(f"unknown field kind {self.field_kind!r}")
        if not 0 <= self.max_frequency < grid.N // 2:
            raise LabError(f"max_frequency {self.max_frequency} aliases on N={grid.N} (need < {grid.N // 2})")


def _ratio(lhs: float, rhs: float, scale: float, floor: float):
    cut = floor * scale
    degenerate = rhs <= cut
    denom = rhs if not degenerate else cut
    ratio = lhs / denom if denom > 0 else 0.0
    return float(ratio), bool(degenerate)


# ---------------------------------------------------------------- test fields

def _smoothstep(u: np.ndarray) -> np.ndarray:
    """C-infinity step: 0 for u <= 0, 1 for u >= 1."""
    u = np.clip(u, 0.0, 1.0)
    a = np.where(u > 0, np.exp(-1.0 / np.where(u > 0, u, 1.0)), 0.0)
    b = np.where(u < 1, np.exp(-1.0 / np.where(u < 1, 1.0 - u, 1.0)), 0.0)
    return a / (a + b)


def cutoff(grid: Grid) -> np.ndarray:
    """Tensorised smooth bump, supported in the centred half-box ``[L/4, 3L/4]^n``."""
    L = grid.period
    x = np.arange(grid.N) * grid.spacing
    w = L / 8
    prof = _smoothstep((x - L / 4) / w) * _smoothstep((3 * L / 4 - x) / w)
    out = np.ones(grid.shape)
    for axis in range(grid.n):
        shape = [1] * grid.n
        shape[axis] = grid.N
        out = out * prof.reshape(shape)
    return out


def random_coefficients(rng: np.random.Generator, n: int, dimV: int, K: int) -> np.ndarray:
    """Complex coefficients for frequencies in ``[-K, K]^n``, shape ``(2K+1,)*n + (dimV,)``."""
    shape = (2 * K + 1,) * n + (dimV,)
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2 * (2 * K + 1) ** n)


def trig_values(grid: Grid, coeffs: np.ndarray) -> np.ndarray:
    """Grid samples of ``Re sum_m c_m exp(i 2 pi m.x / L)``; independent of ``N`` as a function."""
    K = (coeffs.shape[0] - 1) // 2
    if K >= grid.N // 2:
        raise LabError(f"frequency {K} aliases on N={grid.N}")
    spec = np.zeros(grid.shape + (coeffs.shape[-1],), dtype=complex)
    idx = np.arange(-K, K + 1) % grid.N
    spec[np.ix_(*([idx] * grid.n))] = coeffs
    return ifft_real(grid, spec) * grid.N ** grid.n


def _gradient(u: Field) -> Field:
    """Spectral ``Du`` of a vector field, flattened row-major: ``P[i, j] = d_j u_i``."""
    n = u.grid.n
    cols = [derivative(u, tuple(int(a == j) for a in range(n))).values for j in range(n)]
    P = np.stack(cols, axis=-1).reshape(u.grid.shape + (u.dimV * n,))
    return Field(u.grid, P)


def _divergence_free(W: Field) -> Field:
    """``u_i = sum_j d_j W_ij`` for antisymmetric ``W``; divergence-free spectrally."""
    n = W.grid.n
    Wm = W.values.reshape(W.grid.shape + (n, n))
    skew = Field(W.grid, (Wm - np.swapaxes(Wm, -1, -2)).reshape(W.grid.shape + (n * n,)))
    u = np.zeros(W.grid.shape + (n,))
    for j in range(n):
        d = derivative(skew, tuple(int(a == j) for a in range(n))).values.reshape(W.grid.shape + (n, n))
        u += d[..., :, j]
    return Field(W.grid, u)


def gen_field(scenario: Scenario, grid: Grid, cfg: EnsembleConfig, index: int,
              kind: Optional[str] = None) -> Field:
    """Deterministic test field number ``index`` for ``(cfg.seed, kind)``."""
    cfg.check(grid)
    kind = kind or cfg.field_kind
    if kind not in FIELD_KINDS:
        raise LabError(f"unknown field kind {kind!r}")
    if grid.n != scenario.n:
        raise LabError(f"scenario lives in R^{scenario.n}, grid in R^{grid.n}")
    rng = np.random.default_rng([cfg.seed, index])
    n, dimV, K = grid.n, scenario.A.dimV, cfg.max_frequency
    chi = cutoff(grid)[..., None]
    if kind in ("gradientType", "divFreeGradient") and dimV != n * n:
        raise LabError(f"{kind} fields need V = R^(n x n), but dimV={dimV}")
    if kind == "generic":
        return Field(grid, chi * trig_values(grid, random_coefficients(rng, n, dimV, K)), compact=True)
    if kind == "kernelValued":
        T = chi * trig_values(grid, random_coefficients(rng, n, dimV, K))
        return Field(grid, T @ scenario.A.kernel_projector.T, compact=True)
    if kind == "gradientType":
        u = Field(grid, chi * trig_values(grid, random_coefficients(rng, n, n, K)))
        return _gradient(u)
    W = Field(grid, chi * trig_values(grid, random_coefficients(rng, n, n * n, K)))
    return _gradient(_divergence_free(W))


# ---------------------------------------------------------------- inequality sides

def kms_sides(scenario: Scenario, f: Field, rhs_floor: float = 1e-12, tol: float = DEFAULT_TOL,
              mode: str = "full") -> RatioReport:
    """Both sides of the corrected inequality for one field."""
    A, B = scenario.A, scenario.B
    s, q = scenario.k - 1, scenario.q_star
    residual = f - kms_correction(B, A, f, tol, mode)
    lhs = hom_sobolev_norm(residual, s, q)
    rhs = hom_sobolev_norm(pointwise(A.matrix, f), s, q) + lp_norm(apply_diffop(B, f), scenario.p)
    ratio, degenerate = _ratio(lhs, rhs, lp_norm(f, 2), rhs_floor)
    return RatioReport(lhs, rhs, ratio, degenerate, grid=f.grid.summary())


def lemma_sides(scenario: Scenario, f: Field, q: float, rhs_floor: float = 1e-12,
                tol: float = DEFAULT_TOL, mode: str = "full") -> RatioReport:
    """Sides of the L^q estimate with the Riesz-realised negative norm of ``B f``."""
    A, B = scenario.A, scenario.B
    residual = f - kms_correction(B, A, f, tol, mode)
    lhs = lp_norm(residual, q)
    rhs = lp_norm(pointwise(A.matrix, f), q) + neg_sobolev_norm(apply_diffop(B, f), B.k, q)
    ratio, degenerate = _ratio(lhs, rhs, lp_norm(f, 2), rhs_floor)
    return RatioReport(lhs, rhs, ratio, degenerate, grid=f.grid.summary())


@dataclass
class EnsembleSummary:
    scenario: dict
    grid: dict
    config: dict
    max_ratio: float
    argmax_index: int
    quantiles: Dict[str, float]
    evaluated: int
    degenerate: int
    ratios: List[float] = field(repr=False, default_factory=list)

    def to_dict(self, include_ratios: bool = False) -> dict:
        d = {"scenario": self.scenario, "grid": self.grid, "config": self.config,
             "max_ratio": self.max_ratio, "argmax_index": self.argmax_index,
             "quantiles": self.quantiles, "evaluated": self.evaluated,
             "degenerate": self.degenerate, "bound_kind": "lower"}
        if include_ratios:
            d["ratios"] = list(self.ratios)
        return d


def estimate_constant(scenario: Scenario, grid: Grid, cfg: EnsembleConfig,
                      q: Optional[float] = None) -> EnsembleSummary:
    """Largest observed ratio over a deterministic ensemble (a lower bound for the constant).

    With ``q`` given, the ratios are those of :func:`lemma_sides` instead of
    the main inequality.
    """
    cfg.check(grid)
    ratios, indices, degenerate = [], [], 0
    for i in range(cfg.count):
        f = gen_field(scenario, grid, cfg, i)
        rep = kms_sides(scenario, f, cfg.rhs_floor) if q is None else lemma_sides(scenario, f, q, cfg.rhs_floor)
        if rep.degenerate:
            degenerate += 1
            continue
        ratios.append(rep.ratio)
        indices.append(i)
    if not ratios:
        raise LabError(f"all {cfg.count} ensemble members are degenerate")
    arr = np.array(ratios)
    best = int(np.argmax(arr))
    qs = {f"{q:g}": float(np.quantile(arr, q)) for q in (0.5, 0.9, 0.99)}
    summary = scenario.summary()
    summary["inequality"] = "main" if q is None else f"lemma L^{q:g}"
    return EnsembleSummary(
        scenario=summary, grid=grid.summary(),
        config={"count": cfg.count, "max_frequency": cfg.max_frequency, "seed": cfg.seed,
                "field_kind": cfg.field_kind, "rhs_floor": cfg.rhs_floor},
        max_ratio=float(arr[best]), argmax_index=indices[best], quantiles=qs,
        evaluated=len(ratios), degenerate=degenerate, ratios=[float(r) for r in ratios])


# ---------------------------------------------------------------- adversarial search

@dataclass
class SearchResult:
    best_ratio: float
    best_field: Field
    initial_ratio: float
    best_iteration: int
    history: List[float]
    iters: int
    seed: int

    def to_dict(self) -> dict:
        return {"best_ratio": self.best_ratio, "initial_ratio": self.initial_ratio,
                "best_iteration": self.best_iteration, "improved": self.best_ratio > self.initial_ratio,
                "iters": self.iters, "seed": self.seed, "bound_kind": "lower"}


def adversarial_search(scenario: Scenario, grid: Grid, iters: int = 500, seed: int = 0,
                       max_frequency: int = 4, a0: float = 0.1, c0: float = 0.1,
                       rhs_floor: float = 1e-12) -> SearchResult:
    """SPSA ascent of ``lhs / rhs`` over cutoff-windowed Fourier coefficients.

    Iteration 0 evaluates the ensemble's first generic field; each further
    iteration spends two ratio evaluations on a simultaneous-perturbation
    gradient estimate, takes a normalised step of relative length
    ``a0 / (1 + t)^0.602`` and rescales so that ``rhs = 1``.
    """
    if iters < 1:
        raise LabError("iters must be >= 1")
    cfg = EnsembleConfig(count=1, max_frequency=max_frequency, seed=seed)
    cfg.check(grid)
    n, dimV, K = grid.n, scenario.A.dimV, max_frequency
    chi = cutoff(grid)[..., None]
    cshape = (2 * K + 1,) * n + (dimV,)

    def build(theta):
        c = theta[: theta.size // 2] + 1j * theta[theta.size // 2:]
        return Field(grid, chi * trig_values(grid, c.reshape(cshape)), compact=True)

    def evaluate(theta):
        rep = kms_sides(scenario, build(theta), rhs_floor)
        return rep.ratio, rep.rhs

    c_init = random_coefficients(np.random.default_rng([seed, 0]), n, dimV, K).ravel()
    theta = np.concatenate([c_init.real, c_init.imag])
    J, rhs = evaluate(theta)
    if rhs > 0:
        theta = theta / rhs
    initial, best, best_theta, best_it = J, J, theta.copy(), 0
    history = [J]
    rng = np.random.default_rng([seed, 1])
    for t in range(1, iters):
        a_t = a0 / (1 + t) ** 0.602
        c_t = c0 / (1 + t) ** 0.101
        scale = np.linalg.norm(theta) / np.sqrt(theta.size)
        delta = rng.choice((-1.0, 1.0), size=theta.size)
        jp, _ = evaluate(theta + c_t * scale * delta)
        jm, _ = evaluate(theta - c_t * scale * delta)
        g = (jp - jm) / (2 * c_t * scale) * delta
        gn = np.linalg.norm(g)
        if gn > 0:
            theta = theta + a_t * np.linalg.norm(theta) * g / gn
        J, rhs = evaluate(theta)
        if rhs > 0:
            theta = theta / rhs
        history.append(J)
        if J > best:
            best, best_theta, best_it = J, theta.copy(), t
    return SearchResult(best, build(best_theta), initial, best_it, history, iters, seed)


# ---------------------------------------------------------------- demonstrations

def null_family_demo(grid: Grid, j: int = 0, seed: int = 0, max_frequency: int = 4,
                     rhs_floor: float = 1e-12, scenario: Optional[Scenario] = None) -> RatioReport:
    """Divergence-free gradients ``P = Du`` in the trace/Curl scenario.

    ``tr P = div u`` and ``Curl Du`` vanish, so without the correction the
    ratio is only limited by the floor; with it, ``P`` is absorbed and the
    corrected quotient is 0/0.
    """
    if scenario is None:
        scenario = load_catalog()["tr-Curl-3d"]
    if grid.n != 3 or scenario.n != 3:
        raise LabError("the null-family demo lives in three dimensions")
    cfg = EnsembleConfig(count=1, max_frequency=max_frequency, seed=seed, field_kind="divFreeGradient")
    P = gen_field(scenario, grid, cfg, j)
    q = scenario.q_star
    norm_p = lp_norm(P, q)
    rhs = lp_norm(pointwise(scenario.A.matrix, P), q) + lp_norm(apply_diffop(scenario.B, P), scenario.p)
    ratio, degenerate = _ratio(norm_p, rhs, lp_norm(P, 2), rhs_floor)
    corrected = kms_sides(scenario, P, rhs_floor)
    return RatioReport(
        lhs=norm_p, rhs=rhs, ratio=ratio, degenerate=degenerate, seed=seed, index=j,
        grid=grid.summary(), field_kind="divFreeGradient",
        extra={"field_norm_l2": lp_norm(P, 2), "corrected_lhs": corrected.lhs,
               "corrected_rhs": corrected.rhs, "corrected_ratio": corrected.ratio,
               "corrected_degenerate": corrected.degenerate})


def concentration_probe(scenario: Scenario, grid: Grid, widths) -> List[float]:
    """Ratios for ``P = I_k(g_w) e_1`` with ``g_w`` a positive Gaussian bump of width ``w``.

    For operators that fail cancellation the ratio grows as ``w`` shrinks.
    """
    x = grid.coordinates() - grid.period / 2
    r2 = np.sum(x ** 2, axis=-1)
    out = []
    for w in widths:
        g = np.exp(-r2 / (2 * w ** 2))
        vals = np.zeros(grid.shape + (scenario.A.dimV,))
        vals[..., 0] = g
        pot = riesz_potential(Field(grid, vals - vals.mean(axis=tuple(range(grid.n)))), scenario.k)
        out.append(kms_sides(scenario, pot).ratio)
    return out
