"""Acceptance criteria, one test each.

Every test records a single ``PASS``/``FAIL`` line (printed immediately and
repeated in the terminal summary) before asserting.
"""
import json
import time

import numpy as np
import pytest

from kmslab.classifier import DirectionSet, classify, reduced_classify
from kmslab.cli import main
from kmslab.lab import (
    EnsembleConfig,
    Scenario,
    adversarial_search,
    estimate_constant,
    gen_field,
    lemma_sides,
    load_catalog,
    null_family_demo,
    random_coefficients,
    trig_values,
)
from kmslab.norms import lp_norm
from kmslab.presets import curl3, grad, matrix_curl3, matrix_div, part_map_preset, sym_curl3
from kmslab.spectral import Field, Grid, pointwise, project_symbol_kernel
from kmslab.symbols import eval_symbol_batch, kernel_projector_batch, part_map_bound

RESULTS = []


def record(number, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS.append(line)
    print(line)
    return ok


def band_limited(g: Grid, dimV: int, seed: int, index: int, K: int = 4) -> Field:
    """Random trigonometric polynomial with frequencies in ``[-K, K]^n`` and no mean."""
    c = random_coefficients(np.random.default_rng([seed, index]), g.n, dimV, K)
    c[(K,) * g.n] = 0.0
    return Field(g, trig_values(g, c))


def test_projector_laws():
    t0 = time.perf_counter()
    rng = np.random.default_rng(1)
    worst = 0.0
    for op in (grad(3), curl3(), matrix_curl3(), matrix_div(3), sym_curl3()):
        xi = rng.standard_normal((200, 3))
        xi /= np.linalg.norm(xi, axis=1, keepdims=True)
        Ms = eval_symbol_batch(op, xi)
        P = kernel_projector_batch(Ms, scale=op.ref_scale)
        scale = np.maximum(1.0, np.linalg.norm(Ms, 2, axis=(1, 2)))
        errs = np.stack([
            np.abs(P @ P - P).max(axis=(1, 2)),
            np.abs(P - P.transpose(0, 2, 1)).max(axis=(1, 2)),
            np.abs(Ms @ P).max(axis=(1, 2)),
        ]) / scale
        worst = max(worst, float(errs.max()))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-10 and elapsed < 5
    assert record(1, ok, f"max relative error {worst:.2e}, {elapsed:.2f} s")


def test_classification_catalog():
    t0 = time.perf_counter()
    dirs = DirectionSet.default(3)
    checks = {}
    mc = classify(matrix_curl3(), dirs)
    checks["matrix Curl constant rank + cancelling"] = mc.constant_rank and mc.cancelling
    sym = reduced_classify(matrix_curl3(), part_map_preset("sym", 9), dirs)
    checks["(sym, Curl) reduced elliptic"] = sym.elliptic
    dev = reduced_classify(matrix_div(3), part_map_preset("dev", 9), dirs)
    checks["(dev, Div) reduced elliptic"] = dev.elliptic
    tr = reduced_classify(matrix_curl3(), part_map_preset("tr", 9), dirs)
    checks["(tr, Curl) reduced constant rank 6, not elliptic, cancelling"] = (
        tr.constant_rank and tr.rank == 6 and not tr.elliptic and tr.cancelling)
    ds = reduced_classify(sym_curl3(), part_map_preset("dev", 9), dirs)
    checks["(dev, sym Curl) restricted symbol zero"] = ds.constant_rank and ds.rank == 0
    elapsed = time.perf_counter() - t0
    failed = [k for k, v in checks.items() if not v]
    ok = not failed and elapsed < 10
    assert record(2, ok, f"{len(checks) - len(failed)}/{len(checks)} verdicts, {elapsed:.2f} s"
                  + (f", failed: {failed}" if failed else ""))


def test_ellipticity_projection():
    # band-limited fields: the pure-Nyquist modes, where every discrete derivative vanishes,
    # behave like the zero mode and are excluded together with it
    t0 = time.perf_counter()
    g = Grid(3, 32)
    worst_grad = 0.0
    for i in range(50):
        f = band_limited(g, 1, 3, i)
        worst_grad = max(worst_grad, lp_norm(project_symbol_kernel(grad(3), f), 2) / lp_norm(f, 2))
    best_curl = 0.0
    for i in range(50):
        f = band_limited(g, 3, 3, i)
        best_curl = max(best_curl, lp_norm(project_symbol_kernel(curl3(), f), 2) / lp_norm(f, 2))
    elapsed = time.perf_counter() - t0
    ok = worst_grad <= 1e-10 and best_curl >= 0.1 and elapsed < 30
    assert record(3, ok, f"grad max |Pi f|/|f| {worst_grad:.2e}, curl3 max {best_curl:.3f}, {elapsed:.1f} s")


def test_lemma_plancherel():
    t0 = time.perf_counter()
    g = Grid(3, 32)
    sc = Scenario(part_map_preset("zero", 3), curl3(), 1.0)
    worst = 0.0
    for i in range(100):
        f = band_limited(g, 3, 7, i)
        worst = max(worst, lemma_sides(sc, f, 2.0).ratio)
    elapsed = time.perf_counter() - t0
    ok = worst <= 1 + 1e-6 and elapsed < 60
    assert record(4, ok, f"max ratio {worst:.12f}, {elapsed:.1f} s")


@pytest.mark.slow
def test_main_inequality_tr_curl():
    t0 = time.perf_counter()
    sc = load_catalog()["tr-Curl-3d"]
    cfg = EnsembleConfig(count=200, max_frequency=4, seed=0)
    m32 = estimate_constant(sc, Grid(3, 32), cfg).max_ratio
    m48 = estimate_constant(sc, Grid(3, 48), cfg).max_ratio
    search = adversarial_search(sc, Grid(3, 32), iters=500, seed=0).best_ratio
    elapsed = time.perf_counter() - t0
    rel = abs(m48 - m32) / m32
    ok = (np.isfinite(m32) and np.isfinite(m48) and rel <= 0.1 and search <= 10 * m32
          and elapsed < 600)
    assert record(5, ok, f"max ratio N=32 {m32:.5f}, N=48 {m48:.5f} (diff {100 * rel:.2f}%), "
                  f"search best {search:.5f} ({search / m32:.2f}x), {elapsed:.0f} s")


def test_null_family_demo():
    t0 = time.perf_counter()
    rep = null_family_demo(Grid(3, 32))
    corr = rep.extra["corrected_lhs"] / rep.extra["field_norm_l2"]
    elapsed = time.perf_counter() - t0
    ok = rep.ratio >= 1e6 and corr <= 1e-8 and elapsed < 30
    assert record(6, ok, f"uncorrected ratio {rep.ratio:.2e}, corrected lhs / |P| {corr:.2e}, {elapsed:.1f} s")


def test_pointwise_part_map_bound():
    t0 = time.perf_counter()
    g = Grid(3, 16)
    sc = load_catalog()["tr-Curl-3d"]
    cfg = EnsembleConfig(count=100, max_frequency=4, seed=11)
    fields = [gen_field(sc, g, cfg, i) for i in range(100)]
    worst = 0.0
    for name in ("tr", "dev", "sym"):
        A = part_map_preset(name, 9)
        c = part_map_bound(A)
        for f in fields:
            perp, af = pointwise(A.complement_projector, f), pointwise(A.matrix, f)
            for q in (1.0, 1.5, 2.0):
                worst = max(worst, lp_norm(perp, q) / (c * lp_norm(af, q)))
    tr_bound = part_map_bound(part_map_preset("tr", 9))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1 + 1e-10 and abs(tr_bound - 1 / np.sqrt(3)) <= 1e-10 and elapsed < 30
    assert record(7, ok, f"max lhs/(c rhs) {worst:.12f}, bound(tr) - 1/sqrt3 = "
                  f"{tr_bound - 1 / np.sqrt(3):.1e}, {elapsed:.1f} s")


def test_verify_determinism(tmp_path, capsys):
    argv = ["verify", "--count", "20", "--seed", "4"]
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    codes = [main(argv + ["-o", str(p)]) for p in paths]
    a, b = (p.read_bytes() for p in paths)
    ok = codes == [0, 0] and a == b and len(json.loads(a)["verify"]) == len(load_catalog())
    assert record(8, ok, f"{len(a)} bytes, identical={a == b}")
