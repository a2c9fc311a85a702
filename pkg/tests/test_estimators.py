import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline

from kmslab.estimators import KMSConstantEstimator, KMSResidual, SymbolKernelProjector
from kmslab.lab import EnsembleConfig, gen_field, load_catalog
from kmslab.presets import curl3
from kmslab.spectral import Field, Grid, kms_correction, project_symbol_kernel

N = 12


@pytest.fixture(scope="module")
def sample():
    sc = load_catalog()["tr-Curl-3d"]
    f = gen_field(sc, Grid(3, N), EnsembleConfig(max_frequency=3), 0)
    return sc, f


def test_params_round_trip():
    est = KMSResidual(part_map="sym", n_points=N)
    assert est.get_params()["part_map"] == "sym"
    est.set_params(mode="restricted")
    assert clone(est).mode == "restricted"


def test_projector_matches_function(rng):
    g = Grid(3, N)
    X = rng.standard_normal((N ** 3, 3))
    out = SymbolKernelProjector(n_points=N).fit_transform(X)
    expected = project_symbol_kernel(curl3(), Field(g, X.reshape(g.shape + (3,)))).flat()
    np.testing.assert_allclose(out, expected, atol=1e-13)


def test_residual_matches_correction(sample):
    sc, f = sample
    X = f.flat()
    est = KMSResidual(n_points=N).fit(X)
    corr = kms_correction(sc.B, sc.A, f).flat()
    np.testing.assert_allclose(est.transform(X), X - corr, atol=1e-13)
    np.testing.assert_allclose(est.set_params(residual=False).transform(X), corr, atol=1e-13)


def test_pipeline_and_errors(sample, rng):
    _, f = sample
    pipe = make_pipeline(KMSResidual(part_map="zero", n_points=N, mode="restricted"),
                         KMSResidual(part_map="zero", n_points=N, mode="restricted"))
    once = KMSResidual(part_map="zero", n_points=N, mode="restricted").fit_transform(f.flat())
    np.testing.assert_allclose(pipe.fit_transform(f.flat()), once, atol=1e-12)
    with pytest.raises(NotFittedError):
        KMSResidual(n_points=N).transform(f.flat())
    with pytest.raises(ValueError):
        KMSResidual(n_points=N).fit(rng.standard_normal((10, 9)))
    with pytest.raises(ValueError):
        KMSResidual(n_points=N).fit(rng.standard_normal((N ** 3, 4)))


def test_constant_estimator(sample):
    sc, f = sample
    est = KMSConstantEstimator(n_points=N, count=3, max_frequency=3).fit()
    assert est.constant_ == est.ratios_.max() and est.ratios_.size == 3
    stacked = KMSConstantEstimator(n_points=N).fit(f.flat()[None])
    assert stacked.argmax_ == 0 and stacked.constant_ > 0
    with pytest.raises(ValueError):
        KMSConstantEstimator(n_points=N).fit(f.flat())
