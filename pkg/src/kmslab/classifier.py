"""Sampled decision of ellipticity, constant rank and cancellation.

Quantifiers over all ``xi != 0`` are replaced by a fixed direction set: the
signed axes, every normalised ``(+-1, ..., +-1)`` diagonal, and a seeded batch
of uniform random unit vectors.  Verdicts are therefore "sampled" verdicts.
"""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from .symbols import (
    DEFAULT_ANGLE_TOL,
    DEFAULT_TOL,
    DiffOp,
    PartMap,
    Subspace,
    SymbolError,
    eval_symbol,
    image_basis,
    restrict_to_kernel,
    subspace_intersect,
)

#: directions to keep folding after the running intersection reaches {0}
EARLY_EXIT_STREAK = 3
#: a constant-rank verdict requires sigma_min^+ / sigma_max above this many tolerances
RANK_GAP_FACTOR = 10.0


@dataclass(frozen=True)
class DirectionSet:
    n: int
    points: np.ndarray
    seed: int
    extra: int

    @classmethod
    def default(cls, n: int, seed: int = 0, extra: int = 64) -> "DirectionSet":
        axes = np.vstack([np.eye(n), -np.eye(n)])
        diags = np.array(list(itertools.product((1.0, -1.0), repeat=n))) / np.sqrt(n)
        rng = np.random.default_rng(seed)
        rand = rng.standard_normal((extra, n))
        rand /= np.linalg.norm(rand, axis=1, keepdims=True)
        return cls(n, np.vstack([axes, diags, rand]), seed, extra)

    def __len__(self):
        return len(self.points)


@dataclass
class ClassificationReport:
    """Sampled verdicts for one operator (or one restriction ``B|ker A``)."""

    operator: str
    dimE: int
    ranks: Dict[int, int]
    constant_rank: bool
    rank: Optional[int]
    elliptic: bool
    cancelling: bool
    residual_intersection_dim: int
    min_positive_singular_value: Optional[float]
    intersection_trace: List[int] = field(default_factory=list)
    seed: int = 0
    tol: float = DEFAULT_TOL
    n_directions: int = 0
    degenerate: bool = False
    reduced: bool = False
    verdicts: str = "sampled"

    def to_dict(self) -> dict:
        return {
            "operator": self.operator,
            "dimE": self.dimE,
            "ranks": {str(r): c for r, c in sorted(self.ranks.items())},
            "constant_rank": self.constant_rank,
            "rank": self.rank,
            "elliptic": self.elliptic,
            "cancelling": self.cancelling,
            "residual_intersection_dim": self.residual_intersection_dim,
            "min_positive_singular_value": self.min_positive_singular_value,
            "intersection_trace": list(self.intersection_trace),
            "seed": self.seed,
            "tol": self.tol,
            "n_directions": self.n_directions,
            "degenerate": self.degenerate,
            "reduced": self.reduced,
            "verdicts": self.verdicts,
        }


def classify(op: DiffOp, dirs: Optional[DirectionSet] = None, tol: float = DEFAULT_TOL,
             angle_tol: float = DEFAULT_ANGLE_TOL) -> ClassificationReport:
    if dirs is None:
        dirs = DirectionSet.default(op.n)
    if dirs.n != op.n:
        raise SymbolError(f"direction set lives in R^{dirs.n}, operator in R^{op.n}")
    if len(dirs) == 0:
        raise SymbolError("empty direction set")

    ranks: List[int] = []
    min_pos = np.inf
    min_rel_gap = np.inf
    running = Subspace.full(op.dimF)
    trace = [running.dim]
    streak = 0
    for xi in dirs.points:
        M = eval_symbol(op, xi)
        if M.size and np.any(M):
            s = np.linalg.svd(M, compute_uv=False)
            thr = tol * max(s[0], op.ref_scale) * max(M.shape)
            pos = s[s > thr]
            ranks.append(int(pos.size))
            if pos.size:
                min_pos = min(min_pos, float(pos[-1]))
                min_rel_gap = min(min_rel_gap, float(pos[-1] / s[0]))
        else:
            ranks.append(0)
        if streak < EARLY_EXIT_STREAK:
            running = subspace_intersect(running, image_basis(M, tol, op.ref_scale), angle_tol)
            trace.append(running.dim)
            if running.dim == 0:
                streak += 1

    counts = Counter(ranks)
    same = len(counts) == 1
    gap_ok = not np.isfinite(min_rel_gap) or min_rel_gap > RANK_GAP_FACTOR * tol * max(op.dimE, op.dimF)
    constant = same and gap_ok
    rank = ranks[0] if constant else None
    return ClassificationReport(
        operator=op.name,
        dimE=op.dimE,
        ranks=dict(sorted(counts.items())),
        constant_rank=constant,
        rank=rank,
        elliptic=all(r == op.dimE for r in ranks) and gap_ok,
        cancelling=running.dim == 0,
        residual_intersection_dim=running.dim,
        min_positive_singular_value=float(min_pos) if np.isfinite(min_pos) else None,
        intersection_trace=trace,
        seed=dirs.seed,
        tol=tol,
        n_directions=len(dirs),
    )


def reduced_classify(op: DiffOp, A: PartMap, dirs: Optional[DirectionSet] = None,
                     tol: float = DEFAULT_TOL) -> ClassificationReport:
    """Classify ``B[xi]`` restricted to ``ker A``.

    "Reduced elliptic" is reported in ``elliptic`` (maximal rank of the
    restriction); reduced cancellation is the triviality of the intersection of
    the images ``B[xi](ker A)``.
    """
    restricted = restrict_to_kernel(op, A)
    if dirs is None:
        dirs = DirectionSet.default(op.n)
    if restricted.dimE == 0:
        return ClassificationReport(
            operator=restricted.name, dimE=0, ranks={0: len(dirs)}, constant_rank=True, rank=0,
            elliptic=True, cancelling=True, residual_intersection_dim=0,
            min_positive_singular_value=None, intersection_trace=[0], seed=dirs.seed, tol=tol,
            n_directions=len(dirs), degenerate=True, reduced=True)
    report = classify(restricted, dirs, tol)
    report.reduced = True
    return report
