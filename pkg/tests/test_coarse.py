import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from coarse_double import errors
from coarse_double.coarse import (
    ComparisonVerdict, Kind, Label, almost_isometry_defect, classify, coarse_equal,
    diagonal_bounds, dominates, evidence_csv, is_idempotent, is_selfadjoint, r_space_probe,
)
from coarse_double.labels import Lattice
from coarse_double.metric import ScaleFamily, validate_double, validate_space
from coarse_double.semigroup import compose, link_metric, unit_rep, zero_rep
from coarse_double import zoo


def line(n):
    i = np.arange(n, dtype=float)
    return validate_space(np.abs(i[:, None] - i[None, :]))


def prefixes(d, sizes):
    return ScaleFamily.from_windows(d, [np.arange(s) for s in sizes])


def levels(fn, sizes):
    return [fn(np.arange(1, s + 1, dtype=float)) for s in sizes]


class TestDominates:
    sizes = (10, 100, 1000)

    def test_identity_is_dominated(self):
        a = levels(lambda t: t, self.sizes)
        v = dominates(a, a)
        assert v.kind is Kind.DOMINATED and v.certificate["alpha"] == 1.0

    def test_log_is_dominated_by_identity_but_not_conversely(self):
        log = levels(np.log, self.sizes)
        lin = levels(lambda t: t, self.sizes)
        assert dominates(log, lin).holds
        assert not dominates(lin, log).holds

    def test_bounded_against_divergent(self):
        zero = levels(np.zeros_like, self.sizes)
        lin = levels(lambda t: t, self.sizes)
        v = dominates(lin, zero, (1.0,), levels=self.sizes)
        assert v.refuted and v.C == 1.0
        assert [w.a for w in v.witness] == [10.0, 100.0, 1000.0]
        assert [w.level for w in v.witness] == list(self.sizes)

    def test_reparametrised_bound(self):
        a = levels(lambda t: np.sqrt(t), self.sizes)
        b = levels(lambda t: t, self.sizes)
        # sqrt never exceeds the identity: affine certificate
        assert dominates(a, b).holds

    def test_errors(self):
        one = [np.zeros(3)] * 3
        with pytest.raises(errors.GridEmpty):
            dominates(one, one, ())
        with pytest.raises(errors.LevelsTooFew):
            dominates(one[:2], one[:2])
        with pytest.raises(errors.ShapeMismatch):
            dominates(one, [np.zeros(2)] * 3)

    @settings(max_examples=40, deadline=None)
    @given(st.floats(0.5, 3.0), st.floats(-5, 5))
    def test_affine_images_are_coarsely_equal(self, slope, shift):
        b = levels(lambda t: t, self.sizes)
        a = [slope * x + shift for x in b]
        assert dominates(a, b).holds and dominates(b, a).holds

    def test_json_round_trip(self):
        zero = levels(np.zeros_like, self.sizes)
        lin = levels(lambda t: t, self.sizes)
        v = dominates(lin, zero, (1.0,), levels=self.sizes)
        doc = json.loads(json.dumps(v.to_json()))
        back = ComparisonVerdict.from_json(doc)
        assert back.kind is v.kind and back.witness == v.witness and back.C == v.C
        assert evidence_csv(v).splitlines()[0].startswith("level,C,M")


class TestClassify:
    sizes = (25, 50, 100)

    def test_unit_zero_idempotent(self):
        X = line(100)
        assert classify(unit_rep(X), prefixes(unit_rep(X), self.sizes)).label is Label.UNIT
        z = zero_rep(X)
        assert classify(z, prefixes(z, self.sizes)).label is Label.ZERO
        e = link_metric(X, np.arange(0, 100, 2))  # every other point: still the unit
        assert classify(e, prefixes(e, self.sizes)).label is Label.UNIT

    def test_proper_idempotent_on_a_star(self):
        B = zoo.ray_bouquet(4, np.arange(1.0, 41.0))
        half = np.flatnonzero(B.ray <= 2)
        e = link_metric(B.space, half)
        fam = ScaleFamily.from_windows(e, [np.flatnonzero(B.t <= T) for T in (10, 20, 40)])
        label = classify(e, fam)
        assert label.label is Label.PROPER_IDEMPOTENT
        assert label.to_json()["label"] == "ProperIdempotent"

    def test_bounded_shift_is_the_unit(self):
        # cross(x_n, x'_m) = |n + 1 - m| + 1 has diagonal 2 everywhere
        n = 200
        X = line(n)
        i = np.arange(n)
        cross = np.abs(i[:, None] + 1 - i[None, :]) + 1.0
        d = validate_double(X, cross)
        fam = prefixes(d, (12, 50, 200))
        assert diagonal_bounds(d, fam) == [2.0, 2.0, 2.0]
        assert classify(d, fam).label is Label.UNIT

    def test_is_idempotent_requires_selfadjoint(self):
        B = zoo.ray_bouquet(5, np.arange(1.0, 21.0))
        fam = ScaleFamily.from_windows(B.d, [np.flatnonzero(B.t <= T) for T in (5, 10, 20)])
        assert not is_selfadjoint(B.d, fam).holds
        with pytest.raises(errors.NotSelfadjoint):
            is_idempotent(B.d, fam)

    def test_coarse_equal_needs_common_base(self):
        d1, d2 = unit_rep(line(10)), unit_rep(line(11))
        with pytest.raises(errors.BaseMismatch):
            coarse_equal(d1, d2, prefixes(d1, (3, 6, 10)))

    def test_compose_of_link_metrics_is_link_of_intersection(self):
        # link metrics over nested subsets multiply to the smaller one, coarsely
        X = line(120)
        big, small = link_metric(X, range(0, 120, 2)), link_metric(X, range(0, 60))
        prod = compose(big, small)
        fam = prefixes(prod, (30, 60, 120))
        assert coarse_equal(prod, small, fam).holds


def test_r_space_probe_line_reflection_diverges():
    Z = zoo.integer_interval(-300, 300)
    spaces = [Z.subspace(np.flatnonzero(np.abs(Z.dist[300]) <= L)) for L in (3, 30, 300)]
    xs = [Lattice((n,)) for n in range(1, 301)]
    ys = [Lattice((-n,)) for n in range(1, 301)]
    v = r_space_probe(spaces, xs, ys, 1.0)
    assert v.refuted
    with pytest.raises(errors.NearConditionViolated):
        r_space_probe(spaces, xs[:150], [Lattice((2 * n,)) for n in range(1, 151)], 1.0)


def test_almost_isometry_defect_reports_per_level():
    spaces = [line(n) for n in (5, 10, 20)]
    table = almost_isometry_defect(lambda S: np.arange(len(S))[::-1], spaces)
    assert table.distortion == [0.0, 0.0, 0.0]
    assert table.codensity == [0.0, 0.0, 0.0]
    assert table.displacement == [4.0, 9.0, 19.0]
