"""Finite metric spaces, metrics on the double X ⊔ X', and scale families."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, NamedTuple, Sequence

import numpy as np

from . import errors
from .kernels import minplus
from .labels import Anon, PointLabel

TAU = 1e-9
EXHAUSTIVE_LIMIT = 1500
SAMPLE_TRIPLES = 10_000_000
_SAMPLE_CHUNK = 1_000_000


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=np.float64, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    """Points with a pairwise distance matrix.

    Direct construction trusts its input; use :func:`validate_space` to check
    the metric axioms.
    """

    points: tuple[PointLabel, ...]
    dist: np.ndarray
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        object.__setattr__(self, "dist", _frozen(self.dist))
        n = len(self.points)
        if self.dist.shape != (n, n):
            raise errors.ShapeMismatch(
                f"{n} labels but distance matrix of shape {self.dist.shape}"
            )

    def __len__(self) -> int:
        return len(self.points)

    @cached_property
    def index(self) -> dict[PointLabel, int]:
        return {p: i for i, p in enumerate(self.points)}

    def indices_of(self, labels: Sequence[PointLabel]) -> np.ndarray:
        try:
            return np.array([self.index[p] for p in labels], dtype=np.intp)
        except KeyError as exc:
            raise errors.BaseMismatch(f"point {exc.args[0]} not in {self.name!r}") from None

    def same_as(self, other: "FiniteMetricSpace") -> bool:
        return self is other or (
            self.points == other.points and np.array_equal(self.dist, other.dist)
        )

    def subspace(self, idx) -> "FiniteMetricSpace":
        idx = np.asarray(idx, dtype=np.intp)
        return FiniteMetricSpace(
            tuple(self.points[i] for i in idx), self.dist[np.ix_(idx, idx)], self.name
        )

    def dist_to_set(self, subset) -> np.ndarray:
        """Distance from every point to the subset given by indices."""
        return self.dist[:, np.asarray(subset, dtype=np.intp)].min(axis=1)


@dataclass(frozen=True, eq=False)
class DoubleMetric:
    """A metric on X ⊔ X': base metric on both copies plus ``cross[i, j] = d(x_i, x'_j)``."""

    base: FiniteMetricSpace
    cross: np.ndarray
    name: str = ""
    provenance: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "cross", _frozen(self.cross))
        n = len(self.base)
        if self.cross.shape != (n, n):
            raise errors.ShapeMismatch(
                f"cross block {self.cross.shape} does not match {n} base points"
            )

    def __len__(self) -> int:
        return len(self.base)

    @property
    def floor(self) -> float:
        return float(self.cross.min())

    def with_step(self, step: dict, name: str | None = None) -> "DoubleMetric":
        return DoubleMetric(
            self.base, self.cross, self.name if name is None else name,
            self.provenance + (step,),
        )


class Profile(NamedTuple):
    """``a(x) = d(x, X')``, ``b(x) = d(x, x')``, ``c(x) = d(x', X)``."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray


# ---------------------------------------------------------------------------
# validation


def _check_square_finite(m: np.ndarray, what: str):
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise errors.NotSquare(f"{what} must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        i, j = np.argwhere(~np.isfinite(m))[0]
        raise errors.NonFinite(f"{what}[{i},{j}] = {m[i, j]!r}")


def _first_true(mask: np.ndarray):
    hits = np.flatnonzero(mask.ravel())
    if hits.size == 0:
        return None
    return np.unravel_index(hits[0], mask.shape)


def _locate(slack_of_row: Callable[[int], np.ndarray], rows) -> tuple[int, int, int, float] | None:
    # lexicographically first (i, j, k) whose slack exceeds TAU
    for i in rows:
        s = slack_of_row(int(i))
        hit = _first_true(s > TAU)
        if hit is not None:
            j, k = hit
            return int(i), int(j), int(k), float(s[j, k])
    return None


def _use_sampling(n: int, exhaustive: bool | None) -> bool:
    if exhaustive is None:
        return n > EXHAUSTIVE_LIMIT
    return not exhaustive


def _sampled_first(n, slack_fns, seed, samples):
    """Sampled triple check; ``slack_fns`` map index arrays (i,j,k) to slacks."""
    rng = np.random.default_rng(seed)
    best: dict[int, tuple] = {}
    left = samples
    while left > 0:
        m = min(left, _SAMPLE_CHUNK)
        left -= m
        i, j, k = rng.integers(0, n, size=(3, m))
        for kind, fn in enumerate(slack_fns, start=1):
            s = fn(i, j, k)
            bad = np.flatnonzero(s > TAU)
            if bad.size:
                order = np.lexsort((k[bad], j[bad], i[bad]))
                b = bad[order[0]]
                cand = (int(i[b]), int(j[b]), int(k[b]), float(s[b]))
                if kind not in best or cand[:3] < best[kind][:3]:
                    best[kind] = cand
    if not best:
        return None
    kind = min(best)
    return (kind,) + best[kind]


def validate_space(
    dist,
    points: Sequence[PointLabel] | None = None,
    name: str = "",
    *,
    exhaustive: bool | None = None,
    seed: int = 0,
) -> FiniteMetricSpace:
    """Check the metric axioms and return the space, or raise the first violation.

    Triangle violations are reported as the lexicographically first triple
    ``(i, j, k)`` with ``dist[i,k] > dist[i,j] + dist[j,k] + TAU``. Above
    ``EXHAUSTIVE_LIMIT`` points the triangle check samples ``SAMPLE_TRIPLES``
    triples unless ``exhaustive=True``.
    """
    d = np.asarray(dist, dtype=np.float64)
    _check_square_finite(d, "dist")
    n = d.shape[0]
    if points is None:
        points = [Anon(i) for i in range(n)]
    if len(points) != n:
        raise errors.ShapeMismatch(f"{len(points)} labels for {n} points")
    diag = np.flatnonzero(np.diag(d) != 0)
    if diag.size:
        raise errors.NonZeroDiagonal(int(diag[0]))
    asym = np.abs(d - d.T)
    hit = _first_true(asym > TAU)
    if hit is not None:
        i, j = hit
        raise errors.NotSymmetric(int(i), int(j), float(asym[i, j]))
    off = d + np.eye(n)
    hit = _first_true(np.triu(off <= 0, 1) | np.tril(off <= 0, -1))
    if hit is not None:
        raise errors.ZeroOffDiagonal(int(hit[0]), int(hit[1]))

    if _use_sampling(n, exhaustive):
        found = _sampled_first(
            n, [lambda i, j, k: d[i, k] - (d[i, j] + d[j, k])], seed, SAMPLE_TRIPLES
        )
        if found is not None:
            _, i, j, k, s = found
            raise errors.TriangleViolation(i, j, k, s)
    else:
        bad_rows = np.flatnonzero(((d - minplus(d, d)) > TAU).any(axis=1))
        found = _locate(lambda i: d[i][None, :] - (d[i][:, None] + d), bad_rows)
        if found is not None:
            raise errors.TriangleViolation(*found)
    return FiniteMetricSpace(tuple(points), d, name)


def mixed_slacks(base: np.ndarray, cross: np.ndarray):
    """Per-triple slack functions for the four mixed-triangle families."""
    X, D = base, cross
    return [
        lambda i, j, k: D[i, j] - (X[i, k] + D[k, j]),
        lambda i, j, k: D[i, j] - (D[i, k] + X[k, j]),
        lambda i, j, k: X[i, k] - (D[i, j] + D[k, j]),
        lambda i, j, k: X[j, k] - (D[i, j] + D[i, k]),
    ]


def validate_double(
    base: FiniteMetricSpace,
    cross,
    name: str = "",
    *,
    exhaustive: bool | None = None,
    seed: int = 0,
    provenance: tuple = (),
) -> DoubleMetric:
    """Check that (base, base, cross) is a metric on the double with positive floor."""
    D = np.asarray(cross, dtype=np.float64)
    _check_square_finite(D, "cross")
    X = base.dist
    n = len(base)
    if D.shape != (n, n):
        raise errors.ShapeMismatch(f"cross {D.shape} vs {n} base points")
    hit = _first_true(D <= 0)
    if hit is not None:
        i, j = hit
        raise errors.NonPositiveCross(int(i), int(j), float(D[i, j]))

    if _use_sampling(n, exhaustive):
        found = _sampled_first(n, mixed_slacks(X, D), seed, SAMPLE_TRIPLES)
        if found is not None:
            kind, i, j, k, s = found
            raise errors.MixedTriangleViolation(kind, (i, j, k), s)
        return DoubleMetric(base, D, name, provenance)

    DT = np.ascontiguousarray(D.T)
    rows_fns = [
        # family 1: cross(i,j) <= base(i,k) + cross(k,j)
        (D - minplus(X, D), lambda i: D[i][:, None] - (X[i][None, :] + D.T)),
        # family 2: cross(i,j) <= cross(i,k) + base(k,j)
        (D - minplus(D, X), lambda i: D[i][:, None] - (D[i][None, :] + X)),
        # family 3: base(i,k) <= cross(i,j) + cross(k,j)
        (X - minplus(D, DT), lambda i: X[i][None, :] - (D[i][:, None] + D.T)),
    ]
    for kind, (excess, slack_of_row) in enumerate(rows_fns, start=1):
        rows = np.flatnonzero((excess > TAU).any(axis=1))
        found = _locate(slack_of_row, rows)
        if found is not None:
            i, j, k, s = found
            raise errors.MixedTriangleViolation(kind, (i, j, k), s)
    # family 4: base(j,k) <= cross(i,j) + cross(i,k); minimiser runs over i
    if ((X - minplus(DT, D)) > TAU).any():
        found = _locate(lambda i: X - (D[i][:, None] + D[i][None, :]), range(n))
        if found is not None:
            i, j, k, s = found
            raise errors.MixedTriangleViolation(4, (i, j, k), s)
    return DoubleMetric(base, D, name, provenance)


# ---------------------------------------------------------------------------
# elementary operations


def restrict(d: DoubleMetric, subset) -> DoubleMetric:
    idx = np.asarray(subset, dtype=np.intp)
    if idx.size == 0:
        raise errors.EmptySubset("cannot restrict to an empty subset")
    return DoubleMetric(
        d.base.subspace(idx),
        d.cross[np.ix_(idx, idx)],
        d.name,
        d.provenance + ({"op": "restrict", "size": int(idx.size)},),
    )


def diag_profile(d: DoubleMetric) -> Profile:
    return Profile(d.cross.min(axis=1), np.diag(d.cross).copy(), d.cross.min(axis=0))


def profile_to_csv(d: DoubleMetric) -> str:
    a, b, c = diag_profile(d)
    from .io import label_text

    rows = ["point,a,b,c"]
    for p, *vals in zip(d.base.points, a, b, c):
        rows.append(",".join([label_text(p)] + [repr(float(v)) for v in vals]))
    return "\n".join(rows) + "\n"


# ---------------------------------------------------------------------------
# scale families


@dataclass(frozen=True, eq=False)
class ScaleFamily:
    """Increasing truncations of one ambient space.

    ``snapshots[i]`` is the double at truncation parameter ``levels[i]``;
    point sets are nested and values agree on common points.
    """

    levels: tuple[float, ...]
    snapshots: tuple[DoubleMetric, ...]
    name: str = ""
    generator: Callable[[float], DoubleMetric] | None = None

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(float(x) for x in self.levels))
        object.__setattr__(self, "snapshots", tuple(self.snapshots))
        if len(self.levels) != len(self.snapshots):
            raise errors.ShapeMismatch("one snapshot per level required")
        if any(b <= a for a, b in zip(self.levels, self.levels[1:])):
            raise ValueError("levels must be strictly increasing")
        for small, big in zip(self.snapshots, self.snapshots[1:]):
            missing = set(small.base.points) - set(big.base.index)
            if missing:
                raise errors.ValidationFailed(
                    f"point sets are not nested: {sorted(map(str, missing))[:3]}"
                )
        defect = self.coherence_defect()
        if defect > 0:
            raise errors.ValidationFailed(f"snapshots disagree on common points by {defect}")

    @classmethod
    def from_generator(cls, rule: Callable[[float], DoubleMetric], levels, name: str = ""):
        return cls(tuple(levels), tuple(rule(R) for R in levels), name, rule)

    @classmethod
    def from_windows(cls, d: DoubleMetric, windows: Sequence, levels=None, name: str = ""):
        """Family of restrictions of one double to nested index windows."""
        if levels is None:
            levels = [len(w) for w in windows]
        return cls(tuple(levels), tuple(restrict(d, w) for w in windows), name or d.name)

    def __len__(self) -> int:
        return len(self.levels)

    @property
    def top(self) -> DoubleMetric:
        return self.snapshots[-1]

    def coherence_defect(self) -> float:
        worst = 0.0
        for small, big in zip(self.snapshots, self.snapshots[1:]):
            idx = big.base.indices_of(small.base.points)
            worst = max(
                worst,
                float(np.abs(big.base.dist[np.ix_(idx, idx)] - small.base.dist).max()),
                float(np.abs(big.cross[np.ix_(idx, idx)] - small.cross).max()),
            )
        return worst

    def windows_in(self, space: FiniteMetricSpace) -> list[np.ndarray]:
        """Index arrays locating each level's points inside ``space``."""
        return [space.indices_of(s.base.points) for s in self.snapshots]

    def restrictions(self, d: DoubleMetric) -> list[DoubleMetric]:
        return [restrict(d, w) for w in self.windows_in(d.base)]
