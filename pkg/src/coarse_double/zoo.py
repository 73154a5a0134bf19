"""Generators for the concrete spaces and metrics studied here.

Each returns validated :mod:`coarse_double.metric` objects plus whatever
auxiliary data (subsets, maps, witnesses) its construction needs.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import errors, freegroup
from .kernels import minplus
from .labels import FreeWord, Lattice, ORIGIN, Planar, RayParam, SeqIndex
from .metric import (
    DoubleMetric, FiniteMetricSpace, ScaleFamily, validate_double, validate_space,
)
from .semigroup import ImageMap, link_metric

# ---------------------------------------------------------------------------
# free group


@dataclass(frozen=True, eq=False)
class PropertyIData:
    """Partition ``X = Y ⊔ Z`` of an F2 ball with ``g = ab``, ``h = a^2``.

    ``f`` multiplies on the left by ``g`` on ``Y`` and by ``h`` on ``Z``;
    ``image`` gives the image distances (images may leave the ball).
    """

    Y: np.ndarray
    Z: np.ndarray
    g: tuple[int, ...]
    h: tuple[int, ...]
    images: tuple[tuple[int, ...], ...]
    image: ImageMap
    C_bound: float = 2.0

    def f(self, word):
        return freegroup.multiply(self.g if word[:1] in ((1,), (-1,)) else self.h, word)


def f2_ball(radius: int) -> tuple[FiniteMetricSpace, PropertyIData]:
    if not 1 <= radius <= 7:
        raise errors.RadiusTooLarge(f"radius must be in 1..7, got {radius}")
    words = freegroup.ball(radius)
    dist = freegroup.distance_matrix(words)
    X = validate_space(dist, [FreeWord(w) for w in words], f"F2-ball-{radius}")
    in_Y = np.array([bool(w) and abs(w[0]) == 1 for w in words])
    g, h = (1, 2), (1, 1)
    images = tuple(freegroup.multiply(g if y else h, w) for w, y in zip(words, in_Y))
    image = ImageMap(
        freegroup.distance_matrix(list(images), words),
        freegroup.distance_matrix(list(images)),
    )
    data = PropertyIData(np.flatnonzero(in_Y), np.flatnonzero(~in_Y), g, h, images, image)
    return X, data


def word_length(X: FiniteMetricSpace) -> np.ndarray:
    return np.array([len(p.word) for p in X.points])


def inner_ball(X: FiniteMetricSpace, radius: int) -> np.ndarray:
    return np.flatnonzero(word_length(X) <= radius)


# ---------------------------------------------------------------------------
# lattices


def zn_ball(dim: int, p: float, radius: int) -> FiniteMetricSpace:
    """Lattice points of ``[-radius, radius]^dim`` with the l_p metric (p in {1, 2, inf})."""
    if p not in (1, 2, math.inf):
        raise ValueError("p must be 1, 2 or inf")
    if dim * (2 * radius + 1) ** dim > 10**6:
        raise errors.TooManyPoints(f"{(2 * radius + 1) ** dim} points in dimension {dim}")
    pts = np.array(list(itertools.product(range(-radius, radius + 1), repeat=dim)))
    diff = np.abs(pts[:, None, :] - pts[None, :, :]).astype(np.float64)
    if p == 1:
        dist = diff.sum(axis=2)
    elif p == 2:
        dist = np.sqrt((diff**2).sum(axis=2))
    else:
        dist = diff.max(axis=2)
    labels = [Lattice(tuple(int(c) for c in q)) for q in pts]
    return validate_space(dist, labels, f"Z{dim}-l{p}-{radius}")


def integer_interval(lo: int, hi: int) -> FiniteMetricSpace:
    pts = np.arange(lo, hi + 1, dtype=np.float64)
    dist = np.abs(pts[:, None] - pts[None, :])
    return FiniteMetricSpace(tuple(Lattice((int(v),)) for v in pts), dist, f"Z[{lo},{hi}]")


# ---------------------------------------------------------------------------
# ray bouquet in l^1


@dataclass(frozen=True, eq=False)
class RayBouquet:
    space: FiniteMetricSpace
    d: DoubleMetric
    e: DoubleMetric
    f: DoubleMetric
    ray: np.ndarray
    t: np.ndarray


def ray_bouquet(num_rays: int, t_grid: Sequence[float], *, exhaustive: bool | None = None) -> RayBouquet:
    """Rays ``X_n = {t e_n}`` glued at a single origin.

    Cross distances (``x = (n, t)``, ``y = (m, s)``), each ``|s-t|+1`` on the
    matching pairs below and ``s+t+1`` otherwise:

    * d: ``m = n + 1`` (a shift along ray indices),
    * e: ``m = n``,
    * f: ``m = n >= 2``.

    The origin sits at ``t = 0`` on every ray, where both branches agree.
    """
    grid = np.asarray(t_grid, dtype=np.float64)
    if num_rays < 3 or grid.size == 0:
        raise ValueError("need at least 3 rays and a nonempty grid")
    if grid[0] <= 0 or np.any(np.diff(grid) <= 0):
        raise ValueError("t_grid must be increasing and start after 0")
    ray = np.concatenate([[0], np.repeat(np.arange(1, num_rays + 1), grid.size)])
    t = np.concatenate([[0.0], np.tile(grid, num_rays)])
    labels = [ORIGIN] + [RayParam(int(n), float(s)) for n, s in zip(ray[1:], t[1:])]
    same = ray[:, None] == ray[None, :]
    near = np.abs(t[:, None] - t[None, :])
    far = t[:, None] + t[None, :]
    base = np.where(same, near, far)
    X = validate_space(base, labels, f"rays-{num_rays}", exhaustive=exhaustive)

    def cross(match):
        return np.where(match, near + 1, far + 1)

    n, m = ray[:, None], ray[None, :]
    on_ray = (n > 0) & (m > 0)
    kw = dict(exhaustive=exhaustive)
    d = validate_double(X, cross(on_ray & (m == n + 1)), "d", **kw)
    e = validate_double(X, cross(on_ray & (m == n)), "e", **kw)
    f = validate_double(X, cross(on_ray & (m == n) & (n >= 2)), "f", **kw)
    return RayBouquet(X, d, e, f, ray, t)


# ---------------------------------------------------------------------------
# log sequence in l^inf


def log_sequence_vectors(N: int, coord_cut: int | None = None):
    """Rows ``x_n = (log 2, ..., log(n+1), 0, ...)`` and the doubled ``x'_n``."""
    cut = 2 * N if coord_cut is None else coord_cut
    if cut < 2 * N:
        raise ValueError("coord_cut must be at least 2N")
    pos = np.arange(1, cut + 1)
    n = np.arange(1, N + 1)[:, None]
    x = np.where(pos[None, :] <= n, np.log(pos + 1.0)[None, :], 0.0)
    half = np.log(np.ceil(pos / 2) + 1.0)
    xp = np.where(pos[None, :] <= 2 * n, half[None, :], 0.0)
    return x, xp


def sup_distance(P: np.ndarray, Q: np.ndarray, chunk: int = 16) -> np.ndarray:
    out = np.empty((P.shape[0], Q.shape[0]))
    for s in range(0, P.shape[0], chunk):
        out[s : s + chunk] = np.abs(P[s : s + chunk, None, :] - Q[None, :, :]).max(axis=2)
    return out


def log_sequence_space(N: int, coord_cut: int | None = None) -> DoubleMetric:
    x, xp = log_sequence_vectors(N, coord_cut)
    base = sup_distance(x, x)
    X = validate_space(base, [SeqIndex(i) for i in range(1, N + 1)], f"logseq-{N}")
    return validate_double(X, sup_distance(x, xp), "logseq")


def log_sequence_double(
    N: int, coord_cut: int | None = None, levels: Sequence[int] | None = None
) -> tuple[ScaleFamily, list[DoubleMetric]]:
    """Doubles of ``{x_1..x_R}`` at levels ``R`` (default ``N/16, N/4, N``).

    Divergence here is logarithmic, so levels grow by a factor 4: doubling
    would add only log 2 per level, below the stabilisation slack.
    """
    if N < 16:
        raise ValueError("N must be at least 16")
    levels = list(levels) if levels is not None else [N // 16, N // 4, N]
    if max(levels) > N:
        raise ValueError("levels cannot exceed N")
    fam = ScaleFamily.from_generator(
        lambda R: log_sequence_space(int(R), coord_cut), levels, "logseq"
    )
    return fam, list(fam.snapshots)


def log_sequence_restriction_defect(N: int) -> float:
    """``max |d(x_n, x_m) - d(x'_n, x'_m)|``, zero when the copies agree."""
    x, xp = log_sequence_vectors(N)
    return float(np.abs(sup_distance(x, x) - sup_distance(xp, xp)).max())


def folner_boundary(X: FiniteMetricSpace, n: int, r: float) -> int:
    """``|N_r(F_n) - F_n|`` for ``F_n`` the first ``n`` points."""
    near = (X.dist[:n, n:] <= r).any(axis=0)
    return int(near.sum())


def ball_sizes(X: FiniteMetricSpace, r: float) -> np.ndarray:
    return (X.dist <= r).sum(axis=1)


# ---------------------------------------------------------------------------
# exponential sequences on the line


def y_sequence(n: int) -> int:
    """``y_n = s(n) 4^floor(n/2)`` with ``s(n) = (-1)^floor((n-1)/2)``."""
    return (-1) ** ((n - 1) // 2) * 4 ** (n // 2)


@dataclass(frozen=True, eq=False)
class ExpSpaces:
    y: tuple[int, ...]
    b_X: FiniteMetricSpace
    d_X: FiniteMetricSpace
    involution: DoubleMetric
    e_plus: DoubleMetric
    f_minus: DoubleMetric
    squares: FiniteMetricSpace
    A_plus: np.ndarray
    A_minus: np.ndarray


def exp_spaces(N: int) -> ExpSpaces:
    """``b_X(n,m) = |2^n - 2^m|``, ``d_X(n,m) = |y_n - y_m|`` on ``1..N``.

    The involution double places ``X`` at ``(y_n, 0)`` and ``X'`` at
    ``(-y_n, 1)`` in the plane. ``squares`` is ``{n^2}`` on the line.
    """
    if N > 40:
        raise errors.IndexTooLarge("N <= 40 keeps 4^(N/2) exact in floating point")
    if N < 2:
        raise ValueError("N must be at least 2")
    idx = list(range(1, N + 1))
    labels = [SeqIndex(n) for n in idx]
    y = tuple(y_sequence(n) for n in idx)
    yf = np.array(y, dtype=np.float64)
    pw = np.array([2.0**n for n in idx])
    b_X = validate_space(np.abs(pw[:, None] - pw[None, :]), labels, "b_X")
    d_X = validate_space(np.abs(yf[:, None] - yf[None, :]), labels, "d_X")
    squares = squares_space(N)
    inv = np.sqrt((yf[:, None] + yf[None, :]) ** 2 + 1.0)
    involution = validate_double(d_X, inv, "s")
    A_plus = np.flatnonzero(yf > 0)
    A_minus = np.flatnonzero(yf < 0)
    e_plus = link_metric(d_X, A_plus, 1.0)
    f_minus = link_metric(d_X, A_minus, 1.0)
    e_plus = DoubleMetric(d_X, e_plus.cross, "e+", e_plus.provenance)
    f_minus = DoubleMetric(d_X, f_minus.cross, "f-", f_minus.provenance)
    return ExpSpaces(y, b_X, d_X, involution, e_plus, f_minus, squares, A_plus, A_minus)


def squares_space(N: int) -> FiniteMetricSpace:
    """``{n^2 : 1 <= n <= N}`` with the metric of the line."""
    sq = np.array([float(n * n) for n in range(1, N + 1)])
    labels = [SeqIndex(n) for n in range(1, N + 1)]
    return validate_space(np.abs(sq[:, None] - sq[None, :]), labels, "squares")


# ---------------------------------------------------------------------------
# spirals


def spiral_radius(kind: str, phi):
    if kind == "log":
        return np.exp(phi)
    if kind == "archimedean":
        return np.asarray(phi, dtype=np.float64)
    raise ValueError(f"unknown spiral kind {kind!r}")


def spiral_points(kind: str, phis, *, origin: bool = False) -> FiniteMetricSpace:
    phis = np.asarray(phis, dtype=np.float64)
    r = spiral_radius(kind, phis)
    xy = np.stack([r * np.cos(phis), r * np.sin(phis)], axis=1)
    if origin:
        xy = np.vstack([[0.0, 0.0], xy])
    dist = np.sqrt(((xy[:, None, :] - xy[None, :, :]) ** 2).sum(axis=2))
    labels = [Planar(float(a), float(b)) for a, b in xy]
    return validate_space(dist, labels, f"{kind}-spiral")


def spiral_sample(kind: str, phi_max: float, step: float, phi_min: float = 0.0) -> FiniteMetricSpace:
    """Points ``(r(φ) cos φ, r(φ) sin φ)`` for ``φ`` on a grid, chord metric."""
    if step <= 0:
        raise ValueError("step must be positive")
    count = int(math.floor((phi_max - phi_min) / step + 1e-9)) + 1
    return spiral_points(kind, phi_min + step * np.arange(count))


def ring_bound(R: float, width: float = 1.0) -> float:
    """Ring chord estimate ``(log(R+w) - log R)(R+w)`` plus ``w`` for finite R."""
    return (math.log(R + width) - math.log(R)) * (R + width) + width


@dataclass(frozen=True, eq=False)
class RingProbe:
    levels: list[FiniteMetricSpace]
    radii: list[float]
    xs: list
    ys: list


def spiral_ring_probe(
    radii: Sequence[float] = (10.0, 100.0, 1000.0), per_ring: int = 8,
    width: float = 1.0, seed: int = 0,
) -> RingProbe:
    """Random pairs of log-spiral points in the rings ``R <= r <= R + width``.

    Both sequences start at the origin; level ``i`` holds the origin and the
    rings up to ``radii[i]``.
    """
    rng = np.random.default_rng(seed)
    phis = []
    for R in radii:
        phis.append(rng.uniform(math.log(R), math.log(R + width), size=2 * per_ring))
    top = spiral_points("log", np.concatenate(phis), origin=True)
    pts = top.points
    xs, ys, levels = [pts[0]], [pts[0]], []
    for i in range(len(radii)):
        off = 1 + 2 * per_ring * i
        xs += pts[off : off + per_ring]
        ys += pts[off + per_ring : off + 2 * per_ring]
        levels.append(top.subspace(range(off + 2 * per_ring)))
    return RingProbe(levels, list(radii), xs, ys)


# ---------------------------------------------------------------------------
# non-rigid witnesses and the non-commuting pair


@dataclass(frozen=True)
class NonRWitness:
    xs: tuple[int, ...]
    ys: tuple[int, ...]
    C: float
    separation: bool = False


def check_witness(X: FiniteMetricSpace, w: NonRWitness) -> NonRWitness:
    """Verify the witness conditions on the truncation; returns it with ``separation`` set."""
    xs, ys = np.asarray(w.xs), np.asarray(w.ys)
    if len(xs) != len(ys) or len(xs) == 0:
        raise errors.WitnessInvalid("length", "sequences must be nonempty and equal length")
    D = X.dist
    near = np.abs(D[np.ix_(xs, xs)] - D[np.ix_(ys, ys)])
    if (near >= w.C).any():
        n, m = np.argwhere(near >= w.C)[0]
        raise errors.WitnessInvalid("near", f"n={n + 1}, m={m + 1}")
    k = np.arange(1, len(xs) + 1)[:, None]
    sep = D[np.ix_(xs, ys)] > k
    if not sep.all():
        a, b = np.argwhere(~sep)[0]
        raise errors.WitnessInvalid("separation", f"d(x_{a + 1}, y_{b + 1}) <= {a + 1}")
    disp = D[xs, ys]
    if np.any(np.diff(disp) <= 0):
        raise errors.WitnessInvalid("growth", "d(x_n, y_n) must increase strictly")
    return NonRWitness(w.xs, w.ys, w.C, True)


def reflection_witness(X: FiniteMetricSpace, count: int, C: float = 1.0) -> NonRWitness:
    """``x_n = n``, ``y_n = -n`` inside an integer interval."""
    xs = X.indices_of([Lattice((n,)) for n in range(1, count + 1)])
    ys = X.indices_of([Lattice((-n,)) for n in range(1, count + 1)])
    return NonRWitness(tuple(int(i) for i in xs), tuple(int(i) for i in ys), C)


def noncommuting_pair(
    X: FiniteMetricSpace, w: NonRWitness, *, exhaustive: bool | None = None
) -> tuple[DoubleMetric, DoubleMetric]:
    """``d1(x, y') = min_n d(x, x_n) + C + d(y_n, y)`` and ``d2`` with the roles swapped."""
    w = check_witness(X, w)
    xs, ys = np.asarray(w.xs), np.asarray(w.ys)
    D = X.dist
    d1 = minplus(D[:, xs], w.C + D[ys, :])
    d2 = minplus(D[:, ys], w.C + D[xs, :])
    kw = dict(exhaustive=exhaustive)
    return (
        validate_double(X, d1, "d1", provenance=({"op": "d1", "C": w.C},), **kw),
        validate_double(X, d2, "d2", provenance=({"op": "d2", "C": w.C},), **kw),
    )


GENERATORS = {
    "f2_ball": f2_ball,
    "zn_ball": zn_ball,
    "ray_bouquet": ray_bouquet,
    "log_sequence_double": log_sequence_double,
    "exp_spaces": exp_spaces,
    "squares_space": squares_space,
    "spiral_sample": spiral_sample,
    "integer_interval": integer_interval,
}
