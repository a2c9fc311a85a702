import struct

import numpy as np
import pytest

from kmslab import kmsf
from kmslab.spectral import Field, Grid


def _field(rng, n=3, N=8, dimV=2, period=2 * np.pi):
    g = Grid(n, N, period)
    return Field(g, rng.standard_normal(g.shape + (dimV,)))


def test_round_trip(rng, tmp_path):
    f = _field(rng, period=3.5)
    path = tmp_path / "f.kmsf"
    kmsf.write(path, f)
    g = kmsf.read(path)
    assert g.grid.n == 3 and g.grid.N == 8 and g.grid.period == 3.5 and g.dimV == 2
    np.testing.assert_array_equal(g.values, f.values)


def test_layout_component_fastest(rng):
    f = _field(rng, n=2, N=8, dimV=3)
    data = kmsf.dumps(f)
    assert data[:4] == b"KMSF"
    assert struct.unpack_from("<IIII", data, 4) == (1, 2, 8, 3)
    body = np.frombuffer(data[28:], dtype="<f8")
    assert body.size == 8 * 8 * 3
    # second value is component 1 of point (0, 0); fourth is component 0 of point (0, 1)
    assert body[1] == f.values[0, 0, 1] and body[3] == f.values[0, 1, 0]


@pytest.mark.parametrize("mutate, message", [
    (lambda d: b"KMSX" + d[4:], "magic"),
    (lambda d: d[:4] + struct.pack("<I", 2) + d[8:], "version"),
    (lambda d: d[:-8], "expected"),
    (lambda d: d[:10], "short"),
])
def test_corrupt_files(rng, mutate, message):
    data = kmsf.dumps(_field(rng))
    with pytest.raises(kmsf.KMSFError, match=message):
        kmsf.loads(mutate(data))
