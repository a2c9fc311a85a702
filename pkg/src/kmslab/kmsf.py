"""KMSF v1 binary field files.

Layout (little-endian)::

    b"KMSF" | u32 version=1 | u32 n | u32 N | u32 dimV | f64 period |
    N**n * dimV float64 values (axes row-major, component fastest)
"""
from __future__ import annotations

import struct
from pathlib import Path
from typing import Union

import numpy as np

from .spectral import Field, Grid

MAGIC = b"KMSF"
VERSION = 1
_HEADER = struct.Struct("<4sIIIId")


class KMSFError(ValueError):
    pass


def dumps(f: Field) -> bytes:
    head = _HEADER.pack(MAGIC, VERSION, f.grid.n, f.grid.N, f.dimV, float(f.grid.period))
    return head + np.ascontiguousarray(f.values, dtype="<f8").tobytes()


def loads(data: bytes) -> Field:
    if len(data) < _HEADER.size:
        raise KMSFError("file too short for a KMSF header")
    magic, version, n, N, dimV, period = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise KMSFError(f"bad magic {magic!r}")
    if version != VERSION:
        raise KMSFError(f"unsupported KMSF version {version}")
    count = N ** n * dimV
    body = data[_HEADER.size:]
    if len(body) != 8 * count:
        raise KMSFError(f"expected {count} values, found {len(body) / 8:g}")
    values = np.frombuffer(body, dtype="<f8").astype(float).reshape((N,) * n + (dimV,))
    return Field(Grid(n, N, period), values)


def write(path: Union[str, Path], f: Field) -> None:
    Path(path).write_bytes(dumps(f))


def read(path: Union[str, Path]) -> Field:
    return loads(Path(path).read_bytes())
