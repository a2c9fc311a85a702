"""Symbol classification, Fourier-multiplier projections and numerical checks
of corrected Korn-Maxwell-Sobolev inequalities."""
from .classifier import ClassificationReport, DirectionSet, classify, reduced_classify
from .lab import (
    EnsembleConfig,
    RatioReport,
    Scenario,
    adversarial_search,
    estimate_constant,
    gen_field,
    kms_sides,
    lemma_sides,
    load_catalog,
    null_family_demo,
)
from .norms import hom_sobolev_norm, lp_norm, neg_sobolev_norm, sobolev_conjugate
from .spectral import (
    Field,
    Grid,
    apply_diffop,
    derivative,
    kms_correction,
    project_symbol_kernel,
    riesz_potential,
)
from .symbols import (
    DiffOp,
    PartMap,
    Subspace,
    eval_symbol,
    image_basis,
    kernel_projector,
    part_map_bound,
    restrict_to_kernel,
    subspace_intersect,
)

__version__ = "0.1.0"

__all__ = [
    "ClassificationReport",
    "DiffOp",
    "DirectionSet",
    "EnsembleConfig",
    "Field",
    "Grid",
    "PartMap",
    "RatioReport",
    "Scenario",
    "Subspace",
    "adversarial_search",
    "apply_diffop",
    "classify",
    "derivative",
    "estimate_constant",
    "eval_symbol",
    "gen_field",
    "hom_sobolev_norm",
    "image_basis",
    "kernel_projector",
    "kms_correction",
    "kms_sides",
    "lemma_sides",
    "load_catalog",
    "lp_norm",
    "neg_sobolev_norm",
    "null_family_demo",
    "part_map_bound",
    "project_symbol_kernel",
    "reduced_classify",
    "restrict_to_kernel",
    "riesz_potential",
    "sobolev_conjugate",
    "subspace_intersect",
    "__version__",
]
