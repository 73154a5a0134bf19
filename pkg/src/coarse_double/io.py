"""JSON interchange for spaces and doubles, plus atomic file writes."""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .labels import (
    Anon, FreeWord, Lattice, Planar, RayParam, SeqIndex,
    label_from_json, label_to_json,
)
from .metric import DoubleMetric, FiniteMetricSpace, validate_double, validate_space


def label_text(p) -> str:
    """Compact one-token rendering used in CSV and text reports."""
    if isinstance(p, FreeWord):
        return str(p)
    if isinstance(p, Lattice):
        return "(" + " ".join(map(str, p.coords)) + ")"
    if isinstance(p, RayParam):
        return "O" if p.is_origin else f"r{p.ray}:{p.t:g}"
    if isinstance(p, SeqIndex):
        return f"n{p.n}"
    if isinstance(p, Planar):
        return f"({p.x!r} {p.y!r})"
    if isinstance(p, Anon):
        return f"#{p.id}"
    return str(p)


def _matrix(m: np.ndarray) -> list[list[float]]:
    # float repr is the shortest string that round-trips (at most 17 digits)
    return [[float(v) for v in row] for row in m]


def space_to_json(X: FiniteMetricSpace) -> dict:
    return {
        "name": X.name,
        "points": [label_to_json(p) for p in X.points],
        "dist": _matrix(X.dist),
    }


def double_to_json(d: DoubleMetric) -> dict:
    doc = space_to_json(d.base)
    doc["name"] = d.name or d.base.name
    doc["cross"] = _matrix(d.cross)
    if d.provenance:
        doc["provenance"] = list(d.provenance)
    return doc


def from_json(doc: dict, *, validate: bool = True, exhaustive: bool | None = None):
    """Rebuild a space (no ``cross`` key) or a double from a JSON document."""
    points = tuple(label_from_json(p) for p in doc["points"])
    dist = np.array(doc["dist"], dtype=np.float64).reshape(len(points), len(points))
    name = doc.get("name", "")
    if validate:
        X = validate_space(dist, points, name, exhaustive=exhaustive)
    else:
        X = FiniteMetricSpace(points, dist, name)
    if "cross" not in doc:
        return X
    cross = np.array(doc["cross"], dtype=np.float64).reshape(len(points), len(points))
    prov = tuple(doc.get("provenance", ()))
    if validate:
        return validate_double(X, cross, name, exhaustive=exhaustive, provenance=prov)
    return DoubleMetric(X, cross, name, prov)


def dumps(obj) -> str:
    if isinstance(obj, DoubleMetric):
        obj = double_to_json(obj)
    elif isinstance(obj, FiniteMetricSpace):
        obj = space_to_json(obj)
    return json.dumps(obj, indent=None, separators=(",", ":")) + "\n"


def load(path, **kw):
    with open(path) as fh:
        return from_json(json.load(fh), **kw)


def write_atomic(path, text: str) -> None:
    """Write via a temporary file in the target directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
