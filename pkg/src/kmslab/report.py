"""Canonical JSON and plain-text rendering of reports."""
from __future__ import annotations

import json
import math
import sys
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np


def _encode(obj: Any) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        # non-finite values are not representable; the floor policy keeps them out of ratios
        return format(x, ".17g") if math.isfinite(x) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        items = sorted((str(k), v) for k, v in obj.items())
        return "{" + ",".join(f"{_encode(k)}:{_encode(v)}" for k, v in items) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ",".join(_encode(v) for v in obj) + "]"
    if hasattr(obj, "to_dict"):
        return _encode(obj.to_dict())
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def canonical_json(obj: Any) -> str:
    """Sorted keys, no whitespace, floats with 17 significant digits."""
    return _encode(obj) + "\n"


def _text_lines(obj: Any, indent: int = 0) -> list:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        width = max((len(str(k)) for k in obj), default=0)
        for key in sorted(obj, key=str):
            val = obj[key]
            if isinstance(val, (dict, list)) and val and any(isinstance(v, (dict, list)) for v in
                                                             (val.values() if isinstance(val, dict) else val)):
                lines.append(f"{pad}{key}:")
                lines.extend(_text_lines(val, indent + 1))
            elif isinstance(val, dict):
                lines.append(f"{pad}{str(key).ljust(width)}  " + ", ".join(f"{k}={_fmt(v)}" for k, v in sorted(val.items())))
            else:
                lines.append(f"{pad}{str(key).ljust(width)}  {_fmt(val)}")
    elif isinstance(obj, list):
        for i, val in enumerate(obj):
            lines.append(f"{pad}[{i}]")
            lines.extend(_text_lines(val, indent + 1))
    else:
        lines.append(pad + _fmt(obj))
    return lines


def _fmt(v: Any) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, list):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    return str(v)


def render(report: Any, fmt: str = "json") -> str:
    obj = report.to_dict() if hasattr(report, "to_dict") else report
    if fmt == "json":
        return canonical_json(obj)
    if fmt == "text":
        return "\n".join(_text_lines(obj)) + "\n"
    raise ValueError(f"unknown report format {fmt!r}")


def write_report(report: Any, fmt: str = "json", path: Optional[Union[str, Path]] = None) -> None:
    """Write to ``path`` or stdout.  Raises ``OSError`` for unwritable paths."""
    text = render(report, fmt)
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)
