"""Coarse decisions at finite scale, each backed by explicit evidence.

A function ``a`` is dominated by ``b`` (``a ⪯ b``) when ``a <= φ(b)`` for some
increasing unbounded ``φ``. On a nested family of truncations this is judged
by stabilisation across levels:

* an affine certificate ``a <= α·b + β_L`` whose offset ``β_L`` stops growing
  (last two levels within ``slack``) gives ``Dominated``;
* a level-by-level witness (points with ``b <= C`` whose ``a`` values rise by
  more than ``growth`` at every level, over at least three levels) gives
  ``NotDominated``;
* a reparametrisation table ``M(C, L) = max{a : b <= C}`` in which every ``C``
  has stabilised also gives ``Dominated``;
* anything else is ``Inconclusive``.

Verdicts are evidence, not proofs.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import errors
from .metric import DoubleMetric, FiniteMetricSpace, ScaleFamily
from .semigroup import adjoint, as_image_map, zero_rep

C_GRID = (1.0, 2.0, 4.0, 8.0, 16.0, 32.0)
SLACK = 1.0
GROWTH = 1.0
ALPHAS = (1.0, 2.0, 4.0)
MIN_LEVELS = 3


class Kind(str, enum.Enum):
    DOMINATED = "Dominated"
    NOT_DOMINATED = "NotDominated"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class WitnessPoint:
    level: float
    point: str
    a: float
    b: float

    def to_json(self) -> dict:
        return {"level": self.level, "point": self.point, "a": self.a, "b": self.b}


@dataclass
class ComparisonVerdict:
    kind: Kind
    C: float | None = None
    witness: list[WitnessPoint] = field(default_factory=list)
    evidence_table: list[dict] = field(default_factory=list)
    reason: str = ""
    certificate: dict | None = None

    @property
    def holds(self) -> bool:
        return self.kind is Kind.DOMINATED

    @property
    def refuted(self) -> bool:
        return self.kind is Kind.NOT_DOMINATED

    def to_json(self) -> dict:
        doc = {
            "kind": self.kind.value,
            "C": self.C,
            "witness": [w.to_json() for w in self.witness],
            "evidence_table": self.evidence_table,
        }
        if self.certificate is not None:
            doc["certificate"] = self.certificate
        if self.reason:
            doc["reason"] = self.reason
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "ComparisonVerdict":
        return cls(
            Kind(doc["kind"]),
            doc.get("C"),
            [WitnessPoint(**w) for w in doc.get("witness", [])],
            list(doc.get("evidence_table", [])),
            doc.get("reason", ""),
            doc.get("certificate"),
        )


def evidence_csv(v: ComparisonVerdict) -> str:
    cols = ["level", "C", "M", "count"]
    rows = [",".join(cols)]
    for r in v.evidence_table:
        rows.append(",".join("" if r.get(c) is None else repr(r[c]) for c in cols))
    return "\n".join(rows) + "\n"


def _stable(values: Sequence[float], slack: float) -> bool:
    return values[-1] - values[-2] <= slack


def dominates(
    a: Sequence[np.ndarray],
    b: Sequence[np.ndarray],
    C_grid: Sequence[float] = C_GRID,
    *,
    levels: Sequence[float] | None = None,
    names: Sequence[Callable[[int], str]] | None = None,
    slack: float = SLACK,
    growth: float = GROWTH,
) -> ComparisonVerdict:
    """Decide ``a ⪯ b`` from samples on nested levels (one array pair per level)."""
    if len(C_grid) == 0:
        raise errors.GridEmpty("C_grid is empty")
    if len(a) < MIN_LEVELS or len(a) != len(b):
        raise errors.LevelsTooFew(f"need >= {MIN_LEVELS} levels, got {len(a)}")
    A = [np.asarray(x, dtype=np.float64).ravel() for x in a]
    B = [np.asarray(x, dtype=np.float64).ravel() for x in b]
    if any(x.shape != y.shape for x, y in zip(A, B)):
        raise errors.ShapeMismatch("a and b must be sampled on identical index sets")
    levels = list(levels) if levels is not None else list(range(1, len(A) + 1))

    table = []
    M: dict[float, list] = {}
    for C in C_grid:
        M[C] = []
        for L, x, y in zip(levels, A, B):
            mask = y <= C
            m = float(x[mask].max()) if mask.any() else None
            M[C].append(m)
            table.append({"level": L, "C": C, "M": m, "count": int(mask.sum())})

    for alpha in ALPHAS:
        beta = [float((x - alpha * y).max()) for x, y in zip(A, B)]
        if _stable(beta, slack):
            cert = {"alpha": alpha, "beta": beta}
            return ComparisonVerdict(Kind.DOMINATED, evidence_table=table, certificate=cert)

    for C in C_grid:
        ms = M[C]
        if any(m is None for m in ms):
            continue
        if all(hi > lo + growth for lo, hi in zip(ms, ms[1:])):
            wit = []
            for li, (L, x, y) in enumerate(zip(levels, A, B)):
                cand = np.flatnonzero(y <= C)
                t = int(cand[np.argmax(x[cand])])
                label = names[li](t) if names is not None else str(t)
                wit.append(WitnessPoint(L, label, float(x[t]), float(y[t])))
            return ComparisonVerdict(Kind.NOT_DOMINATED, C, wit, table)

    settled = [C for C in C_grid if M[C][-1] is not None]
    if settled and all(
        M[C][-2] is not None and _stable(M[C], slack) for C in settled
    ):
        return ComparisonVerdict(Kind.DOMINATED, evidence_table=table)
    return ComparisonVerdict(
        Kind.INCONCLUSIVE, evidence_table=table,
        reason="no stable bound and no witness growing at every level",
    )


def _pair_names(space: FiniteMetricSpace, window: np.ndarray):
    from .io import label_text

    n = len(window)

    def name(t: int) -> str:
        i, j = divmod(t, n)
        return f"{label_text(space.points[window[i]])}|{label_text(space.points[window[j]])}'"

    return name


def _point_names(space: FiniteMetricSpace, window: np.ndarray):
    from .io import label_text

    return lambda t: label_text(space.points[window[t]])


def _windows(d: DoubleMetric, family: ScaleFamily):
    windows = family.windows_in(d.base)
    if len(windows) < MIN_LEVELS:
        raise errors.LevelsTooFew(f"family has {len(windows)} levels")
    return windows


def coarse_equal(
    d: DoubleMetric, rho: DoubleMetric, family: ScaleFamily, C_grid=C_GRID
) -> ComparisonVerdict:
    """Mutual domination of the cross functions on each level's X × X'."""
    if not d.base.same_as(rho.base):
        raise errors.BaseMismatch("coarse_equal needs a common base")
    windows = _windows(d, family)
    A = [d.cross[np.ix_(w, w)] for w in windows]
    B = [rho.cross[np.ix_(w, w)] for w in windows]
    names = [_pair_names(d.base, w) for w in windows]
    fwd = dominates(A, B, C_grid, levels=family.levels, names=names)
    back = dominates(B, A, C_grid, levels=family.levels, names=names)
    table = [dict(r, direction="d<=rho") for r in fwd.evidence_table] + [
        dict(r, direction="rho<=d") for r in back.evidence_table
    ]
    cert = {"d<=rho": fwd.certificate, "rho<=d": back.certificate}
    if fwd.holds and back.holds:
        return ComparisonVerdict(Kind.DOMINATED, evidence_table=table, certificate=cert)
    for v, direction in ((fwd, "d"), (back, "rho")):
        if v.refuted:
            return ComparisonVerdict(
                Kind.NOT_DOMINATED, v.C, v.witness, table,
                reason=f"{direction} diverges where the other stays bounded",
            )
    return ComparisonVerdict(Kind.INCONCLUSIVE, evidence_table=table, reason="no decision")


def is_selfadjoint(d: DoubleMetric, family: ScaleFamily) -> ComparisonVerdict:
    return coarse_equal(d, adjoint(d), family)


def _profiles(d: DoubleMetric, family: ScaleFamily):
    windows = _windows(d, family)
    profs = [diag_profile_window(d, w) for w in windows]
    names = [_point_names(d.base, w) for w in windows]
    return profs, names


def diag_profile_window(d: DoubleMetric, w: np.ndarray):
    sub = d.cross[np.ix_(w, w)]
    return sub.min(axis=1), np.diag(sub).copy(), sub.min(axis=0)


def is_idempotent(d: DoubleMetric, family: ScaleFamily) -> ComparisonVerdict:
    """For selfadjoint ``[d]``: idempotent iff ``d(x, x') ⪯ d(x, X')``."""
    sa = is_selfadjoint(d, family)
    if not sa.holds:
        raise errors.NotSelfadjoint(sa)
    profs, names = _profiles(d, family)
    return dominates(
        [p[1] for p in profs], [p[0] for p in profs], levels=family.levels, names=names
    )


class Label(str, enum.Enum):
    UNIT = "Unit"
    ZERO = "Zero"
    PROPER_IDEMPOTENT = "ProperIdempotent"
    SELFADJOINT_NON_IDEMPOTENT = "SelfadjointNonIdempotent"
    GENERAL = "General"


@dataclass
class ClassLabel:
    label: Label
    evidence: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        ev = {
            k: (v.to_json() if isinstance(v, ComparisonVerdict) else v)
            for k, v in self.evidence.items()
        }
        return {"label": self.label.value, "evidence": ev}


def diagonal_bounds(d: DoubleMetric, family: ScaleFamily) -> list[float]:
    return [float(np.diag(d.cross[np.ix_(w, w)]).max()) for w in _windows(d, family)]


def classify(d: DoubleMetric, family: ScaleFamily) -> ClassLabel:
    """Decision tree: Unit, Zero, ProperIdempotent, SelfadjointNonIdempotent, General.

    ``[d] = 1`` exactly when the diagonal ``d(x, x')`` is bounded, since then
    ``|d(x, y') - d_X(x, y)| <= sup d(z, z')``.
    """
    bounds = diagonal_bounds(d, family)
    ev: dict = {"diagonal_max": bounds}
    if _stable(bounds, SLACK):
        return ClassLabel(Label.UNIT, ev)
    basepoint = family.snapshots[0].base.points[0]
    z = coarse_equal(d, zero_rep(d.base, basepoint), family)
    ev["zero"] = z
    if z.holds:
        return ClassLabel(Label.ZERO, ev)
    if z.kind is Kind.INCONCLUSIVE:
        return ClassLabel(Label.GENERAL, ev)
    sa = is_selfadjoint(d, family)
    ev["selfadjoint"] = sa
    if sa.kind is Kind.INCONCLUSIVE:
        return ClassLabel(Label.GENERAL, ev)
    if not sa.holds:
        return ClassLabel(Label.GENERAL, ev)
    idem = is_idempotent(d, family)
    ev["idempotent"] = idem
    if idem.holds:
        return ClassLabel(Label.PROPER_IDEMPOTENT, ev)
    if idem.refuted:
        return ClassLabel(Label.SELFADJOINT_NON_IDEMPOTENT, ev)
    return ClassLabel(Label.GENERAL, ev)


def _level_spaces(X) -> tuple[list[FiniteMetricSpace], list[float]]:
    if isinstance(X, ScaleFamily):
        return [s.base for s in X.snapshots], list(X.levels)
    spaces = list(X)
    return spaces, list(range(1, len(spaces) + 1))


def r_space_probe(X, xs: Sequence, ys: Sequence, C: float) -> ComparisonVerdict:
    """Probe rigidity: do sequences with ``|d(x_n,x_m) - d(y_n,y_m)| < C`` stay
    at bounded displacement ``d(x_n, y_n)``?

    ``X`` is a family (or list) of nested spaces; level ``L`` sees the terms
    whose points both lie in it. Points are labels of the top space.
    """
    if len(xs) != len(ys):
        raise ValueError("sequences must have equal length")
    spaces, levels = _level_spaces(X)
    top = spaces[-1]
    ix, iy = top.indices_of(xs), top.indices_of(ys)
    near = np.abs(top.dist[np.ix_(ix, ix)] - top.dist[np.ix_(iy, iy)])
    bad = np.argwhere(near >= C)
    if bad.size:
        n, m = bad[0]
        raise errors.NearConditionViolated(int(n), int(m), float(near[n, m] - C))
    disp = top.dist[ix, iy]
    vals, zeros, names, kept = [], [], [], []
    for L, S in zip(levels, spaces):
        inside = np.array([p in S.index and q in S.index for p, q in zip(xs, ys)])
        terms = np.flatnonzero(inside)
        if terms.size == 0:  # level too small to hold any term
            continue
        kept.append(L)
        vals.append(disp[terms])
        zeros.append(np.zeros(terms.size))
        names.append(lambda t, terms=terms: f"n={int(terms[t]) + 1}")
    return dominates(vals, zeros, (1.0,), levels=kept, names=names)


@dataclass
class DefectTable:
    levels: list[float]
    distortion: list[float]
    codensity: list[float]
    displacement: list[float]

    def to_json(self) -> dict:
        return {
            "levels": self.levels, "distortion": self.distortion,
            "codensity": self.codensity, "displacement": self.displacement,
        }


def almost_isometry_defect(f, X) -> DefectTable:
    """Per level: ``sup |d(fx,fy) - d(x,y)|``, ``sup_y d(y, f(X))``, ``sup d(x, fx)``.

    ``f`` is a callable taking a level's space and returning an index map or
    :class:`~coarse_double.semigroup.ImageMap` for it.
    """
    spaces, levels = _level_spaces(X)
    out = DefectTable(levels, [], [], [])
    for S in spaces:
        g = as_image_map(S, f(S))
        out.distortion.append(float(np.abs(g.pairwise - S.dist).max()))
        out.codensity.append(float(g.to_space.min(axis=0).max()))
        out.displacement.append(float(g.displacement().max()))
    return out
