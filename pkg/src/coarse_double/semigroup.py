"""Semigroup algebra on doubles: min-plus composition, adjoint, representatives."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import errors
from .kernels import minplus
from .metric import DoubleMetric, FiniteMetricSpace, ScaleFamily, validate_double


def _require_same_base(outer: DoubleMetric, inner: DoubleMetric):
    if not outer.base.same_as(inner.base):
        raise errors.BaseMismatch(
            f"bases differ: {outer.name or outer.base.name!r} ({len(outer)} points) "
            f"vs {inner.name or inner.base.name!r} ({len(inner)} points)"
        )


def compose(outer: DoubleMetric, inner: DoubleMetric, *, threads: int | None = 1) -> DoubleMetric:
    """The product ``outer · inner``: apply ``inner`` first.

    ``cross(x, z) = min_y inner.cross(x, y) + outer.cross(y, z)``.
    """
    _require_same_base(outer, inner)
    cross = minplus(inner.cross, outer.cross, threads=threads)
    step = {"op": "compose", "outer": outer.name, "inner": inner.name}
    name = f"{outer.name}*{inner.name}" if outer.name and inner.name else ""
    return DoubleMetric(inner.base, cross, name, inner.provenance + outer.provenance + (step,))


def adjoint(d: DoubleMetric) -> DoubleMetric:
    name = d.name[:-1] if d.name.endswith("'") else (d.name + "'" if d.name else "")
    return DoubleMetric(d.base, d.cross.T, name, d.provenance + ({"op": "adjoint"},))


def unit_rep(X: FiniteMetricSpace, gap: float = 1.0) -> DoubleMetric:
    """Representative of the unit: ``cross = d_X + gap``."""
    return DoubleMetric(X, X.dist + gap, "1", ({"op": "unit", "gap": gap},))


def _point_index(X: FiniteMetricSpace, p) -> int:
    if isinstance(p, (int, np.integer)):
        if not 0 <= p < len(X):
            raise errors.BaseMismatch(f"basepoint index {p} out of range")
        return int(p)
    return int(X.indices_of([p])[0])


def zero_rep(X: FiniteMetricSpace, basepoint=0, gap: float = 1.0) -> DoubleMetric:
    """Representative of the zero: distances routed through a basepoint ``p``,
    ``cross(x, y) = d(x, p) + gap + d(p, y)``."""
    p = _point_index(X, basepoint)
    col = X.dist[:, p]
    cross = (col[:, None] + gap) + col[None, :]
    return DoubleMetric(X, cross, "0", ({"op": "zero", "basepoint": p, "gap": gap},))


def link_metric(X: FiniteMetricSpace, A: Sequence[int], gap: float = 1.0) -> DoubleMetric:
    """``cross(x, y) = min_{u in A} d(x, u) + gap + d(u, y)``: selfadjoint idempotent on A."""
    A = np.unique(np.asarray(A, dtype=np.intp))
    if A.size == 0:
        raise errors.EmptySubset("link metric needs a nonempty subset")
    cross = minplus(X.dist[:, A], X.dist[A, :]) + gap
    return DoubleMetric(X, cross, "link", ({"op": "link", "size": int(A.size), "gap": gap},))


def relation_metric(X: FiniteMetricSpace, W: np.ndarray, **validate_kw) -> DoubleMetric:
    """``cross = d_X ⊗ W ⊗ d_X`` (min-plus) for a weighted relation ``W``.

    Finite entries must satisfy ``W[u, v] >= d(u, v)`` and be positive; ``inf``
    marks absent pairs. The result is validated.
    """
    W = np.asarray(W, dtype=np.float64)
    finite = np.isfinite(W)
    if not finite.any():
        raise errors.EmptySubset("relation has no pairs")
    if (W[finite] <= 0).any() or (W[finite] < X.dist[finite] - 1e-12).any():
        raise errors.ValidationFailed("relation weights must be positive and dominate d_X")
    cross = minplus(minplus(X.dist, W), X.dist)
    return validate_double(X, cross, "relation", provenance=({"op": "relation"},), **validate_kw)


@dataclass(frozen=True, eq=False)
class ImageMap:
    """A map ``f`` on X described by distances of its images.

    ``to_space[u, y] = d(f(u), y)`` and ``pairwise[u, v] = d(f(u), f(v))``.
    Images may lie outside the truncation as long as these are true distances.
    """

    to_space: np.ndarray
    pairwise: np.ndarray

    @classmethod
    def from_indices(cls, X: FiniteMetricSpace, f) -> "ImageMap":
        f = np.asarray(f, dtype=np.intp)
        return cls(X.dist[f, :], X.dist[np.ix_(f, f)])

    def displacement(self) -> np.ndarray:
        """``d(x, f(x))`` for each point."""
        return np.diag(self.to_space).copy()


def as_image_map(X: FiniteMetricSpace, f) -> ImageMap:
    return f if isinstance(f, ImageMap) else ImageMap.from_indices(X, f)


def distortion(X: FiniteMetricSpace, f) -> tuple[float, tuple[int, int]]:
    f = as_image_map(X, f)
    dev = np.abs(f.pairwise - X.dist)
    u, v = np.unravel_index(int(np.argmax(dev)), dev.shape)
    return float(dev[u, v]), (int(u), int(v))


def graph_metric(
    X: FiniteMetricSpace, f, C: float, *, exhaustive: bool | None = None
) -> DoubleMetric:
    """``cross(x, y) = min_u d(x, u) + C + d(f(u), y)`` for a map of distortion < C."""
    f = as_image_map(X, f)
    dist, (u, v) = distortion(X, f)
    if not dist < C:
        raise errors.DistortionExceedsC(u, v, dist, C)
    cross = minplus(X.dist, C + f.to_space)
    return validate_double(
        X, cross, "graph", exhaustive=exhaustive,
        provenance=({"op": "graph", "C": C, "distortion": dist},),
    )


def vn_pair(s: DoubleMetric, *, threads: int | None = 1) -> tuple[DoubleMetric, DoubleMetric]:
    """The source and range idempotents ``(s*s, ss*)`` of ``s``."""
    st = adjoint(s)
    e = compose(st, s, threads=threads)
    f = compose(s, st, threads=threads)
    return e, f


def leq(s: DoubleMetric, t: DoubleMetric, family: ScaleFamily):
    """Natural partial order ``s <= t``, tested as ``s ~ t s* s`` coarsely.

    ``t s* s`` (apply s, then s*, then t) equals ``s s* t`` whenever either
    expresses the order, so the coarse comparison decides ``s <= t``.
    """
    from .coarse import coarse_equal

    _require_same_base(s, t)
    product = compose(t, compose(adjoint(s), s))
    return coarse_equal(s, product, family)


@dataclass(frozen=True, eq=False)
class SemigroupElement:
    """A class ``[d]`` carried by one representative and optional scale data.

    ``s * t`` is the product in the usual order (``t`` applied first).
    """

    rep: DoubleMetric
    family: ScaleFamily | None = None

    def __mul__(self, other: "SemigroupElement") -> "SemigroupElement":
        return SemigroupElement(compose(self.rep, other.rep), self.family or other.family)

    @property
    def star(self) -> "SemigroupElement":
        return SemigroupElement(adjoint(self.rep), self.family)

    @property
    def provenance(self) -> list:
        return list(self.rep.provenance)
