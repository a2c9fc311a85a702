import numpy as np
import pytest

from kmslab.classifier import DirectionSet, classify, reduced_classify
from kmslab.presets import operator_preset, part_map_preset
from kmslab.symbols import SymbolError


def reduced(A, B):
    op = operator_preset(B)
    return reduced_classify(op, part_map_preset(A, op.dimE))


def test_direction_set_contents():
    d = DirectionSet.default(3, seed=4, extra=10)
    assert len(d) == 6 + 8 + 10
    np.testing.assert_allclose(np.linalg.norm(d.points, axis=1), 1.0, atol=1e-14)
    np.testing.assert_array_equal(d.points[:3], np.eye(3))
    np.testing.assert_array_equal(d.points[3:6], -np.eye(3))


def test_matrix_curl_constant_rank_cancelling():
    r = classify(operator_preset("matrix_curl3"))
    assert r.constant_rank and r.rank == 6
    assert not r.elliptic
    assert r.cancelling and r.residual_intersection_dim == 0


def test_grad_elliptic_cancelling():
    r = classify(operator_preset("grad"))
    assert r.elliptic and r.constant_rank and r.rank == 1 and r.cancelling


def test_partial_derivative_not_constant_rank():
    r = classify(operator_preset("partial1"))
    assert not r.constant_rank and r.rank is None
    assert set(r.ranks) == {0, 1}


def test_laplacian_elliptic_not_cancelling():
    r = classify(operator_preset("laplacian"))
    assert r.elliptic and not r.cancelling and r.residual_intersection_dim == 1


def test_sym_curl_reduced_elliptic_cancelling():
    r = reduced("sym", "matrix_curl3")
    assert r.reduced and r.elliptic and r.cancelling


def test_tr_curl_reduced_constant_rank_not_elliptic():
    r = reduced("tr", "matrix_curl3")
    assert r.dimE == 8
    assert not r.elliptic
    assert r.constant_rank and r.rank == 6
    assert r.cancelling


def test_dev_div_reduced_elliptic_cancelling():
    r = reduced("dev", "matrix_div")
    assert r.elliptic and r.cancelling


def test_dev_sym_curl_restricted_symbol_vanishes():
    r = reduced("dev", "sym_curl3")
    assert r.constant_rank and r.rank == 0
    assert r.min_positive_singular_value is None


def test_trivial_kernel_is_degenerate():
    r = reduced("id", "matrix_curl3")
    assert r.degenerate and r.elliptic and r.cancelling


@pytest.mark.parametrize("name", ["grad", "curl3", "matrix_curl3", "matrix_div", "sym_curl3", "partial1"])
@pytest.mark.parametrize("c", [-3.0, 1e-3, 250.0])
def test_scale_invariance(name, c):
    op = operator_preset(name)
    a, b = classify(op), classify(op.scaled(c))
    for key in ("ranks", "constant_rank", "rank", "elliptic", "cancelling", "residual_intersection_dim"):
        assert getattr(a, key) == getattr(b, key)


@pytest.mark.parametrize("name", ["curl3", "matrix_curl3", "sym_curl3", "laplacian"])
def test_trace_nonincreasing(name):
    trace = classify(operator_preset(name)).intersection_trace
    assert all(a >= b for a, b in zip(trace, trace[1:]))


def test_determinism():
    op = operator_preset("sym_curl3")
    d = DirectionSet.default(3, seed=11)
    assert classify(op, d).to_dict() == classify(op, DirectionSet.default(3, seed=11)).to_dict()


def test_report_invariants():
    for name in ("grad", "curl3", "matrix_div", "partial1", "laplacian"):
        r = classify(operator_preset(name))
        if r.elliptic:
            assert r.constant_rank and r.rank == r.dimE
        if not r.constant_rank:
            assert len(r.ranks) >= 2
        assert r.cancelling == (r.residual_intersection_dim == 0)


def test_errors():
    with pytest.raises(SymbolError):
        classify(operator_preset("curl3"), DirectionSet.default(2))
    empty = DirectionSet(3, np.zeros((0, 3)), 0, 0)
    with pytest.raises(SymbolError):
        classify(operator_preset("curl3"), empty)
