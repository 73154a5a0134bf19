"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Criteria 1-6 run the experiments at their manifest defaults and read the named
checks; the numbers inside those checks were cross-checked against brute-force
oracles in the unit tests. Criteria 7-9 are computed here directly.
"""

import time

import numpy as np

from coarse_double import errors, zoo
from coarse_double.coarse import is_idempotent, is_selfadjoint
from coarse_double.experiments import run_experiment
from coarse_double.metric import ScaleFamily, validate_double
from coarse_double.semigroup import adjoint, compose, graph_metric, link_metric, relation_metric

from _oracles import random_space


def checks_by_name(report):
    return {c.name: c for c in report.checks}


def timed_run(name, params=None):
    t0 = time.perf_counter()
    r = run_experiment(name, params)
    return r, time.perf_counter() - t0


def pick(report, names):
    by = checks_by_name(report)
    return {n: by[n].passed for n in names}


def test_criterion_1_rays_infinite_unit(acceptance):
    r, dt = timed_run("rays-infinite-unit")
    assert r.parameters["rays"] == 20 and r.parameters["t_max"] == 100
    sub = pick(r, [
        "d*d diagonal = 2 (origin and rays 1..N-1)",
        "dd* diagonal on ray 1 = 2(t+1)",
        "classify(d*d)",
        "classify(dd*)",
    ])
    assert acceptance(1, "rays-infinite-unit", sub, dt, 30)


def test_criterion_2_amenable_nonfinite(acceptance):
    r, dt = timed_run("amenable-nonfinite")
    assert r.parameters["N"] == 100
    by = checks_by_name(r)
    sub = pick(r, [
        "d(x_2k, X') <= log 2 for k <= N/2",
        "d(x_2k-1, X') = log(k+1) for 2 <= k <= N/2",
        "Folner: |N_r(F_n) - F_n| = 0 when log(n+1) > r",
    ])
    # tolerances as stated: log 2 + 1e-12 and 1e-12
    sub["even tolerance"] = by["d(x_2k, X') <= log 2 for k <= N/2"].measured <= np.log(2) + 1e-12
    sub["odd tolerance"] = by["d(x_2k-1, X') = log(k+1) for 2 <= k <= N/2"].measured <= 1e-12
    assert acceptance(2, "amenable-nonfinite", sub, dt, 10)


def test_criterion_3_free_group_property_I(acceptance):
    r, dt = timed_run("free-group-property-I")
    assert r.parameters["radius"] == 5 and r.parameters["C"] == 3.0
    by = checks_by_name(r)
    sub = pick(r, [
        "d(f(y), f(z)) - d(y, z) = 2 on inner Y x Z",
        "d*d diagonal = 2C on the inner ball",
        "dd*(b^k, b^k') = 2k + 2C + 4 for k <= 2",
    ])
    sub["diagonal is exactly 6"] = by["d*d diagonal = 2C on the inner ball"].measured == [6.0]
    rows = by["dd*(b^k, b^k') = 2k + 2C + 4 for k <= 2"].measured
    sub["2k+10 at k = 1, 2"] = [(k, v) for k, v, _ in rows] == [(1, 12.0), (2, 14.0)]
    assert acceptance(3, "free-group-property-I", sub, dt, 120)


def test_criterion_4_qi_noninvariance(acceptance):
    r, dt = timed_run("qi-noninvariance")
    assert r.parameters["N_ratio"] == 40 and r.parameters["N_comp"] == 25
    by = checks_by_name(r)
    sub = pick(r, [
        "min d/b = 3/7",
        "max d/b <= 12",
        "involution cross is symmetric to the bit",
        "(s s) diagonal <= 2 sqrt 5",
        "classify(es) = Zero",
        "se coarsely equal to f-",
    ])
    sub["se equality evidence spans 3 levels"] = len(r.parameters["levels"]) == 3
    assert by["min d/b = 3/7"].measured == "3/7"
    assert acceptance(4, "qi-noninvariance", sub, dt, 30)


def test_criterion_5_coarse_noninvariance(acceptance):
    r, dt = timed_run("coarse-noninvariance")
    assert r.parameters["N"] == 50
    sub = pick(r, [
        "d <= b for n != m",
        "b <= 2 exp(2d) for n < m",
        "b <= 2 exp(d) fails at (1, 10)",
    ])
    assert acceptance(5, "coarse-noninvariance", sub, dt, 1)


def test_criterion_6_noncommuting_construction(acceptance):
    r, dt = timed_run("noncommuting-construction")
    assert r.parameters["half_width"] == 600 and r.parameters["k_max"] == 200
    sub = pick(r, [
        "d1, d2 pass exhaustive mixed-triangle validation",
        "(d2 d1)(k, k') = 2C for all k",
        "(d1 d2)(k, k') != 2k + 2 + 2C: count",
    ])
    sub["C = 1 so the values are 2 and 2k + 4"] = r.parameters["C"] == 1.0
    assert acceptance(6, "noncommuting-construction", sub, dt, 60)


def _doubles_on(rng, X, count):
    """Valid doubles on ``X``: ``d_X`` plus positive integer weights on random pairs
    of a random subset, closed up by the link (min-plus sandwich) construction."""
    n = len(X)
    out = []
    for _ in range(count):
        A = rng.choice(n, size=rng.integers(2, n // 3), replace=False)
        W = np.full((n, n), np.inf)
        pairs = rng.random((A.size, A.size)) < 0.3
        np.fill_diagonal(pairs, True)
        u, v = np.nonzero(pairs)
        W[A[u], A[v]] = X.dist[A[u], A[v]] + rng.integers(1, 6, size=u.size)
        out.append(relation_metric(X, W))
    return out


def test_criterion_7_kernel_properties(acceptance):
    t0 = time.perf_counter()
    sub = {"associativity": True, "anti-homomorphism": True, "closure": True, "floor": True}
    for seed in range(100):
        rng = np.random.default_rng(seed)
        X = random_space(rng, 64, p=0.08)
        a, b, c = _doubles_on(rng, X, 3)
        ba = compose(b, a)
        sub["associativity"] &= np.array_equal(
            compose(c, ba).cross, compose(compose(c, b), a).cross
        )
        sub["anti-homomorphism"] &= np.array_equal(
            adjoint(ba).cross, compose(adjoint(a), adjoint(b)).cross
        )
        try:
            validate_double(X, ba.cross, exhaustive=True)
        except errors.ValidationFailed:
            sub["closure"] = False
        sub["floor"] &= ba.floor >= a.floor + b.floor
    assert acceptance(7, "kernel properties", sub, time.perf_counter() - t0, 60)


def _link_families():
    """Five zoo spaces, each with a three-level window family."""
    F2, _ = zoo.f2_ball(4)
    wl = zoo.word_length(F2)
    Z = zoo.integer_interval(-200, 200)
    zc = np.abs(Z.dist[200])
    L = zoo.zn_ball(2, 1, 10)
    lc = L.dist[len(L) // 2]  # distance to the centre point (0, 0)
    B = zoo.ray_bouquet(6, np.arange(1.0, 41.0))
    S = zoo.log_sequence_space(256).base
    return [
        (F2, [np.flatnonzero(wl <= r) for r in (2, 3, 4)]),
        (Z, [np.flatnonzero(zc <= r) for r in (50, 100, 200)]),
        (L, [np.flatnonzero(lc <= r) for r in (5, 10, 20)]),
        (B.space, [np.flatnonzero(B.t <= T) for T in (10, 20, 40)]),
        (S, [np.arange(k) for k in (16, 64, 256)]),
    ]


def test_criterion_8_idempotent_criterion_suite(acceptance):
    t0 = time.perf_counter()
    sub = {}
    rng = np.random.default_rng(2024)
    for X, windows in _link_families():
        for trial in range(4):
            A = np.flatnonzero(rng.random(len(X)) < rng.uniform(0.05, 0.6))
            A = A if A.size else np.array([0])
            e = link_metric(X, A)
            fam = ScaleFamily.from_windows(e, windows)
            sub[f"link on {X.name} #{trial}"] = is_idempotent(e, fam).holds
    B = zoo.ray_bouquet(20, np.arange(1.0, 101.0))
    fam = ScaleFamily.from_windows(B.d, [np.flatnonzero(B.t <= T) for T in (25, 50, 100)])
    try:
        is_idempotent(B.d, fam)
        sub["ray bouquet raw d raises NotSelfadjoint"] = False
    except errors.NotSelfadjoint:
        sub["ray bouquet raw d raises NotSelfadjoint"] = True
    d = zoo.log_sequence_space(512)
    fam = ScaleFamily.from_windows(d, [np.arange(k) for k in (16, 64, 256)])
    v = is_selfadjoint(d, fam)
    sub["log sequence NotEqual with witness >= 3"] = v.refuted and len(v.witness) >= 3
    assert len(sub) == 22
    assert acceptance(8, "idempotent criterion suite", sub, time.perf_counter() - t0, 30)


def test_criterion_9_performance_smoke(acceptance):
    X, P = zoo.f2_ball(6)
    assert len(X) == 1457
    d = graph_metric(X, P.image, 3.0, exhaustive=False)
    compose(d, d)  # compile outside the timed region
    t0 = time.perf_counter()
    seq = compose(d, d, threads=1)
    dt = time.perf_counter() - t0
    par = compose(d, d, threads=4)
    sub = {
        "sequential within 60 s": dt < 60,
        "parallel bit-identical": bool(np.array_equal(seq.cross, par.cross)),
    }
    assert acceptance(9, "performance smoke", sub, dt, 60)
