import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from coarse_double import errors, freegroup, zoo
from coarse_double.labels import FreeWord, Lattice
from coarse_double.semigroup import compose, vn_pair

words = st.lists(st.sampled_from(freegroup.ALPHABET), max_size=8).map(freegroup.reduce)


class TestFreeGroup:
    def test_sphere_sizes(self):
        # 1, 4, 12, 36, ...: each reduced word extends in three ways
        assert freegroup.sphere_sizes(4) == [1, 4, 12, 36, 108]
        assert len(freegroup.ball(3)) == 1 + 4 + 12 + 36

    def test_ball_order_is_shortlex(self):
        assert [str(FreeWord(w)) for w in freegroup.ball(1)] == ["e", "a", "A", "b", "B"]

    @settings(max_examples=200)
    @given(words, words)
    def test_multiply_inverse_and_distance(self, u, v):
        assert freegroup.multiply(u, freegroup.inverse(u)) == ()
        assert freegroup.word_distance(u, v) == len(freegroup.multiply(freegroup.inverse(u), v))

    def test_distance_matrix_matches_word_oracle(self):
        ball = freegroup.ball(3)
        D = freegroup.distance_matrix(ball)
        for i in range(0, len(ball), 7):
            for j in range(len(ball)):
                assert D[i, j] == freegroup.word_distance(ball[i], ball[j])

    def test_ball_radius_guard(self):
        with pytest.raises(errors.RadiusTooLarge):
            zoo.f2_ball(8)

    def test_property_I_maps(self):
        X, P = zoo.f2_ball(4)
        for i, w in enumerate(p.word for p in X.points):
            image = P.images[i]
            assert image and abs(image[0]) == 1  # both g Y and h Z land in Y
            assert tuple(image) == P.f(w)


class TestRayBouquet:
    def test_formulas(self):
        B = zoo.ray_bouquet(4, [1.0, 2.0, 3.0])
        X = B.space
        assert len(X) == 13
        i, j = X.index[B.space.points[1]], X.index[B.space.points[5]]  # (1,1) and (2,2)
        assert X.dist[i, j] == 3.0
        assert B.d.cross[i, j] == 2.0  # matching pair m = n + 1: |2 - 1| + 1
        assert B.d.cross[j, i] == 4.0

    def test_interior_unit_and_boundary(self):
        B = zoo.ray_bouquet(5, np.arange(1.0, 11.0))
        e, f = vn_pair(B.d)
        inner = B.ray < 5
        assert np.array_equal(np.diag(e.cross)[inner], np.full(inner.sum(), 2.0))
        last = B.ray == 5
        assert np.array_equal(np.diag(e.cross)[last], 2 * (B.t[last] + 1))
        assert np.array_equal(np.diag(f.cross)[B.ray == 1], 2 * (B.t[B.ray == 1] + 1))

    def test_rejects_bad_grid(self):
        with pytest.raises(ValueError):
            zoo.ray_bouquet(2, [1.0])
        with pytest.raises(ValueError):
            zoo.ray_bouquet(3, [0.0, 1.0])


class TestLogSequence:
    def test_closed_form_and_copies(self):
        d = zoo.log_sequence_space(40)
        n = np.arange(1, 41)
        off = n[:, None] != n[None, :]
        want = np.log(np.maximum(n[:, None], n[None, :]) + 1.0) * off
        assert np.max(np.abs(d.base.dist - want)) <= 1e-12
        assert zoo.log_sequence_restriction_defect(40) == 0.0

    def test_family_levels(self):
        fam, snaps = zoo.log_sequence_double(64)
        assert fam.levels == (4.0, 16.0, 64.0) and fam.coherence_defect() == 0.0
        with pytest.raises(ValueError):
            zoo.log_sequence_double(8)

    def test_bounded_geometry(self):
        X = zoo.log_sequence_space(60).base
        for m in range(2, 12):
            assert zoo.ball_sizes(X, math.log(m)).max() <= m


class TestExpSpaces:
    def test_sequence(self):
        assert [zoo.y_sequence(n) for n in range(1, 9)] == [1, 4, -4, -16, 16, 64, -64, -256]

    def test_ratio_extremes_exact(self):
        ys = [zoo.y_sequence(n) for n in range(1, 41)]
        r = [
            Fraction(abs(ys[n] - ys[m]), 2 ** (m + 1) - 2 ** (n + 1))
            for n in range(40) for m in range(n + 1, 40)
        ]
        assert min(r) == Fraction(3, 7) and max(r) <= 12

    def test_involution_square_bounded(self):
        E = zoo.exp_spaces(21)
        ss = compose(E.involution, E.involution)
        assert np.diag(ss.cross).max() <= 2 * math.sqrt(5) + 1e-9
        assert np.argmax(np.diag(ss.cross)) == 0  # y_1 = 1 has no negation partner
        # cutting at 20 strands y_20, whose partner y_21 lies outside
        cut = zoo.exp_spaces(20)
        diag = np.diag(compose(cut.involution, cut.involution).cross)
        assert diag[:-1].max() <= 2 * math.sqrt(5) + 1e-9 and diag[-1] > 1e6
        with pytest.raises(errors.IndexTooLarge):
            zoo.exp_spaces(41)

    def test_squares(self):
        S = zoo.squares_space(10)
        assert S.dist[0, 9] == 99.0


class TestSpiralsAndWitnesses:
    def test_spiral_sample_and_ring_bound(self):
        S = zoo.spiral_sample("log", 2.0, 0.5)
        assert len(S) == 5
        assert zoo.ring_bound(10.0) == pytest.approx((math.log(11) - math.log(10)) * 11 + 1)
        with pytest.raises(ValueError):
            zoo.spiral_radius("hyperbolic", 1.0)

    def test_ring_probe_is_deterministic(self):
        a = zoo.spiral_ring_probe(seed=4)
        b = zoo.spiral_ring_probe(seed=4)
        assert a.xs == b.xs and len(a.levels) == 3

    def test_witness_checks(self):
        Z = zoo.integer_interval(-30, 30)
        w = zoo.check_witness(Z, zoo.reflection_witness(Z, 30))
        assert w.separation
        bad = zoo.NonRWitness(w.xs[:3], w.ys[:2], 1.0)
        with pytest.raises(errors.WitnessInvalid):
            zoo.check_witness(Z, bad)
        same = zoo.NonRWitness(w.xs, w.xs, 1.0)
        with pytest.raises(errors.WitnessInvalid):
            zoo.check_witness(Z, same)

    def test_noncommuting_pair_small(self):
        Z = zoo.integer_interval(-40, 40)
        w = zoo.reflection_witness(Z, 40)
        d1, d2 = zoo.noncommuting_pair(Z, w, exhaustive=True)
        at = lambda n: Z.index[Lattice((n,))]
        for k in (1, 5, 20):
            assert compose(d2, d1).cross[at(k), at(k)] == 2.0
            assert compose(d1, d2).cross[at(k), at(k)] == 2 * k + 4


def test_zn_ball_guard_and_metric():
    B = zoo.zn_ball(2, 1, 2)
    assert len(B) == 25 and B.dist.max() == 8
    assert zoo.zn_ball(2, math.inf, 2).dist.max() == 4
    with pytest.raises(errors.TooManyPoints):
        zoo.zn_ball(3, 1, 40)
