from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings

from conftest import random_fuzzy, random_space, space_and_sets
from fuzzhyper.errors import DomainError, NoWitness
from fuzzhyper.fuzzy import (
    Reparam,
    StepFuzzySet,
    canonical_partition,
    d_end,
    d_inf,
    d_send,
    d_skorokhod,
    end_distance_values,
    fuzzy_max,
    fuzzy_scale,
    level,
    make_xi_k,
    path_sample,
    perturb_in_ball,
    reparam_apply,
)
from fuzzhyper.metric_core import FiniteMetricSpace, discrete_space, hausdorff
from oracles import all_grid_memberships, graph_distance_oracle

H = Fraction(1, 2)


def fs(space, **values):
    return StepFuzzySet.from_membership(space, values)


def chi(space, *labels):
    return StepFuzzySet.characteristic(space, labels)


def test_canonical_form_merges_equal_levels(ab):
    u = StepFuzzySet.from_levels(ab, ["1/4", "1/2", "1"], [["a", "b"], ["a", "b"], ["a"]])
    assert u.breakpoints == (H, 1)
    assert u.levels == (ab.full, ab.subset("a"))
    assert u.normal


def test_from_levels_validation(ab):
    with pytest.raises(DomainError):
        StepFuzzySet.from_levels(ab, ["1/2", "1"], [["a"], ["a", "b"]])
    with pytest.raises(DomainError):
        StepFuzzySet.from_levels(ab, ["1", "1/2"], [["a"], ["a"]])
    with pytest.raises(DomainError):
        StepFuzzySet.from_levels(ab, ["1/2"], [["a"]], require_normal=True)
    with pytest.raises(DomainError):
        StepFuzzySet.from_levels(ab, ["1/2", "1"], [["a"], []])
    sub = StepFuzzySet.from_levels(ab, ["1/2"], [["a"]])
    assert not sub.normal
    with pytest.raises(DomainError):
        d_end(sub, sub)


def test_level_examples(ab):
    assert level(chi(ab, "a"), 1) == ab.subset("a")
    u = fs(ab, a=1, b=H)
    assert level(u, H) == ab.full
    assert level(u, Fraction(3, 5)) == ab.subset("a")
    assert level(u, "0.6") == ab.subset("a")
    with pytest.raises(DomainError):
        level(u, Fraction(3, 2))


def test_level_zero_is_union(rng):
    for _ in range(20):
        X = random_space(rng, rng.randint(1, 5))
        u = random_fuzzy(rng, X)
        union = 0
        for lev in u.levels:
            union |= lev
        pointwise = sum(1 << i for i, m in enumerate(u.membership) if m > 0)
        assert level(u, 0) == union == pointwise


def test_d_inf_examples(ab, rng):
    u = fs(ab, a=1, b=H)
    assert d_inf(u, u) == 0
    assert d_inf(u, chi(ab, "a", "b")) == 1
    for _ in range(30):
        X = random_space(rng, rng.randint(1, 4))
        K = rng.randint(1, X.full)
        L = rng.randint(1, X.full)
        assert d_inf(chi(X, *X.members(K)), chi(X, *X.members(L))) == hausdorff(X, K, L)


def test_d_end_examples(ab):
    X3 = discrete_space("ab", 3)
    assert d_end(chi(X3, "a", "b"), chi(X3, "a")) == 1
    assert hausdorff(X3, X3.full, X3.subset("a")) == 3
    u = fs(ab, a=1, b=H)
    assert d_end(u, chi(ab, "a", "b")) == H
    assert d_send(u, chi(ab, "a", "b")) == H
    assert d_send(u, u) == 0


@pytest.mark.parametrize("k", [3, 4, 5, 8, 16])
def test_d_end_perturbed_pair(k):
    X = FiniteMetricSpace("xy", [[0, 1], [1, 0]])
    u = fs(X, x=1, y=H)
    uk = fs(X, x=1, y=H - Fraction(1, k))
    assert d_end(u, uk) == Fraction(1, k)


def test_d_send_from_singleton(rng):
    for _ in range(30):
        X = random_space(rng, rng.randint(1, 4))
        u = random_fuzzy(rng, X)
        x = rng.randrange(X.size)
        expected = max(X.dist[x][y] for y in range(X.size) if u.membership[y] > 0)
        assert d_send(chi(X, X.labels[x]), u) == expected


def test_d_skorokhod_examples(ab):
    u = fs(ab, a=1, b=H)
    K = ab.full
    assert d_skorokhod(chi(ab, "a", "b"), u) == 1
    assert d_skorokhod(u, u) == 0
    expected = max(hausdorff(ab, K, level(u, 0)), hausdorff(ab, K, level(u, 1)))
    assert d_skorokhod(chi(ab, "a", "b"), u) == expected == d_inf(chi(ab, "a", "b"), u)
    k = 8
    chain = [fs(ab, a=1, b=H + Fraction(j, k)) for j in range(k // 2)]
    for s, t in zip(chain, chain[1:]):
        assert d_skorokhod(s, t) == Fraction(1, k)


def test_skorokhod_of_characteristic_function(rng):
    for _ in range(40):
        X = random_space(rng, rng.randint(1, 4))
        K = rng.randint(1, X.full)
        u = random_fuzzy(rng, X)
        chiK = chi(X, *X.members(K))
        expected = max(hausdorff(X, K, level(u, 0)), hausdorff(X, K, level(u, 1)))
        assert d_skorokhod(chiK, u) == expected == d_inf(chiK, u)


def test_reparam_apply_examples():
    X = FiniteMetricSpace("xy", [[0, 1], [1, 0]])
    u = fs(X, x=1, y=H)
    assert reparam_apply(Reparam.identity(), u) == u
    assert reparam_apply(make_xi_k(4), fs(X, x=1, y=Fraction(1, 4))) == u


@pytest.mark.parametrize("k", [3, 5, 8])
def test_xi_k_deviation(k):
    assert make_xi_k(k).sup_deviation() == Fraction(1, k)


def test_make_xi_k():
    assert make_xi_k(4)(Fraction(1, 4)) == H
    for k in (3, 4, 7, 10):
        xi = make_xi_k(k)
        assert xi(0) == 0 and xi(1) == 1
    for k in (3, 10):
        xi = make_xi_k(k)
        samples = [Fraction(i, 99) for i in range(100)]
        vals = [xi(t) for t in samples]
        assert all(a < b for a, b in zip(vals, vals[1:]))
        assert xi.inverse()(xi(Fraction(1, 3))) == Fraction(1, 3)
    for bad in (2, 1, 0):
        with pytest.raises(DomainError):
            make_xi_k(bad)


def test_reparam_validation():
    with pytest.raises(DomainError):
        Reparam([(0, 0), (H, H)])
    with pytest.raises(DomainError):
        Reparam([(0, 0), (H, H), (Fraction(1, 3), Fraction(3, 4)), (1, 1)])


def test_perturb_in_ball_examples(ab):
    u = chi(ab, "a")
    v = perturb_in_ball(u, H, "d_end")
    assert v == fs(ab, a=1, b=Fraction(1, 4))
    assert d_end(u, v) == Fraction(1, 4)
    with pytest.raises(NoWitness):
        perturb_in_ball(chi(discrete_space("a"), "a"), H, "d_end")
    full = chi(ab, "a", "b")
    w = perturb_in_ball(full, H, "d_end")
    assert w != full and w.normal and d_end(full, w) < H
    with pytest.raises(NoWitness):
        perturb_in_ball(u, H, "d_inf")
    v2 = perturb_in_ball(u, 2, "d_inf")
    assert v2 != u and d_inf(u, v2) < 2


def test_perturb_in_ball_random(rng):
    for _ in range(60):
        X = random_space(rng, rng.randint(2, 4))
        u = random_fuzzy(rng, X)
        eps = Fraction(rng.randint(1, 8), 8)
        v = perturb_in_ball(u, eps, "d_end")
        assert v != u and v.normal and d_end(u, v) < eps


def test_path_sample(ab, rng):
    u = fs(ab, a=1, b=Fraction(1, 4))
    v = fs(ab, b=1, a=Fraction(3, 4))
    assert path_sample(u, v, 0) == u
    assert path_sample(u, v, 1) == v
    assert path_sample(u, v, Fraction(1, 4)) == chi(ab, "a")
    assert path_sample(u, v, H) == chi(ab, "a", "b")
    assert path_sample(u, v, Fraction(3, 4)) == chi(ab, "b")
    for _ in range(5):
        X = random_space(rng, rng.randint(2, 4))
        p, q = random_fuzzy(rng, X), random_fuzzy(rng, X)
        grid = [Fraction(i, 16) for i in range(17)]
        pts = {t: path_sample(p, q, t) for t in grid}
        assert all(w.normal for w in pts.values())
        for seg in range(4):
            inside = [t for t in grid if seg * 4 <= t * 16 <= seg * 4 + 4]
            for s in inside:
                for t in inside:
                    assert d_end(pts[s], pts[t]) <= 4 * abs(s - t)


def test_canonical_partition(ab, rng):
    assert canonical_partition(chi(ab, "a"), Fraction(1, 10)) == [0, 1]
    assert canonical_partition(fs(ab, a=1, b=H), Fraction(1, 10)) == [0, H, 1]
    for _ in range(20):
        X = random_space(rng, rng.randint(1, 4))
        u = random_fuzzy(rng, X)
        part = canonical_partition(u, Fraction(1, 100))
        for lo, hi in zip(part, part[1:]):
            top = level(u, hi)
            for a in (lo + (hi - lo) / 3, (lo + hi) / 2, hi):
                assert hausdorff(X, level(u, a), top) == 0


def test_scale_and_max(ab, rng):
    u = fs(ab, a=1, b=H)
    assert fuzzy_scale(1, u) == u
    assert fuzzy_max(u, u) == u
    assert fuzzy_max(chi(ab, "a"), fuzzy_scale(H, chi(ab, "b"))) == u
    assert not fuzzy_scale(H, u).normal
    assert fuzzy_scale(0, u).breakpoints == ()
    for _ in range(30):
        X = random_space(rng, rng.randint(1, 4))
        p, q = random_fuzzy(rng, X), random_fuzzy(rng, X)
        m = fuzzy_max(p, q)
        for a in [Fraction(i, 8) for i in range(1, 9)]:
            assert level(m, a) == level(p, a) | level(q, a)


def _grid_sets(space, m):
    return [StepFuzzySet(space, mem) for mem in all_grid_memberships(space.size, m)]


@pytest.mark.parametrize(
    "space",
    [discrete_space("ab"), FiniteMetricSpace("abc", [[0, 1, 2], [1, 0, 1], [2, 1, 0]])],
    ids=["two-point", "three-point-path"],
)
def test_metric_axioms_on_quarter_grid(space):
    sets = _grid_sets(space, 4)
    metrics = {"inf": d_inf, "sk": d_skorokhod, "send": d_send, "end": d_end}
    tables = {}
    for name, fn in metrics.items():
        tables[name] = [[fn(u, v) for v in sets] for u in sets]
    n = len(sets)
    for name, D in tables.items():
        for i in range(n):
            assert D[i][i] == 0
            for j in range(n):
                assert D[i][j] == D[j][i]
                if i != j:
                    assert D[i][j] > 0, name
        for i in range(n):
            Di = D[i]
            for j in range(n):
                dij = Di[j]
                Dj = D[j]
                for k in range(n):
                    assert Di[k] <= dij + Dj[k], name
    for i in range(n):
        for j in range(n):
            assert (
                tables["end"][i][j] <= tables["send"][i][j] <= tables["sk"][i][j] <= tables["inf"][i][j]
            )


@settings(max_examples=150, deadline=None)
@given(space_and_sets(2, max_size=5))
def test_inequality_chain_and_level_bounds(args):
    X, u, v = args
    e, s, k, i = d_end(u, v), d_send(u, v), d_skorokhod(u, v), d_inf(u, v)
    assert e <= s <= k <= i
    assert e <= 1
    assert hausdorff(X, u.support, v.support) <= s
    assert max(hausdorff(X, u.support, v.support), hausdorff(X, u.core, v.core)) <= k


@settings(max_examples=40, deadline=None)
@given(space_and_sets(2, max_size=3))
def test_graph_distances_match_sampled_oracle(args):
    X, u, v = args
    assert d_end(u, v) == graph_distance_oracle(X, u.membership, v.membership, 64)
    assert d_send(u, v) == graph_distance_oracle(X, u.membership, v.membership, 64, True)


def test_graph_distances_oracle_examples(ab):
    u = fs(ab, a=1, b=H)
    w = chi(ab, "a", "b")
    assert graph_distance_oracle(ab, u.membership, w.membership, 64) == H
    assert graph_distance_oracle(ab, u.membership, w.membership, 64, True) == H


def test_characteristic_identities(rng):
    for _ in range(60):
        X = random_space(rng, rng.randint(1, 4), top=3)
        K = rng.randint(1, X.full)
        L = rng.randint(1, X.full)
        cK, cL = chi(X, *X.members(K)), chi(X, *X.members(L))
        h = hausdorff(X, K, L)
        assert d_inf(cK, cL) == h
        assert d_end(cK, cL) == min(h, 1)


def test_level_bound_from_endograph(rng):
    hits = 0
    while hits < 200:
        X = random_space(rng, rng.randint(1, 4))
        K = rng.randint(1, X.full)
        u = random_fuzzy(rng, X, denom=16)
        delta = d_end(chi(X, *X.members(K)), u)
        if delta >= H:
            continue
        hits += 1
        for a in sorted(set(u.breakpoints) | {1 - delta}):
            if delta < a <= 1 - delta:
                assert hausdorff(X, K, level(u, a)) <= delta


def test_end_distance_is_lipschitz_in_membership():
    X = discrete_space("ab")
    grid = [Fraction(i, 8) for i in range(9)]
    mems = list(product(grid, repeat=2))
    targets = [m for m in mems if max(m) == 1]
    for w in targets:
        for p in mems:
            dp = end_distance_values(X, p, w)
            for q in mems:
                gap = max(abs(a - b) for a, b in zip(p, q))
                assert abs(dp - end_distance_values(X, q, w)) <= gap
