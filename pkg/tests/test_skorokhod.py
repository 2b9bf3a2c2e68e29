"""The exact Skorokhod solver against brute force over reparametrizations."""

from fractions import Fraction

import pytest
from hypothesis import given, settings

from conftest import random_fuzzy, space_and_sets
from fuzzhyper.fuzzy import (
    StepFuzzySet,
    d_end,
    d_inf,
    d_skorokhod,
    reparam_apply,
    skorokhod_witness,
)
from fuzzhyper.metric_core import FiniteMetricSpace, discrete_space, hausdorff, line_space
from oracles import graph_distance_oracle, skorokhod_grid_oracle, sup_level_distance

GRID = 16


@settings(max_examples=120, deadline=None)
@given(space_and_sets(2, max_size=4, denom=8))
def test_exact_value_sandwiched_by_grid_search(args):
    X, u, v = args
    exact = d_skorokhod(u, v)
    upper = skorokhod_grid_oracle(X, u.membership, v.membership, GRID, hausdorff)
    assert exact <= upper
    # with several inner levels the optimum may squeeze them into one gap of
    # width 1/8, which a 1/16 mesh cannot reproduce
    if len({m for m in v.membership if 0 < m < 1}) <= 1:
        assert upper <= exact + Fraction(1, GRID)


def test_levels_squeezed_below_the_mesh():
    X = FiniteMetricSpace(["p0", "p1", "p2", "p3"], [[0, 1, 1, 2], [1, 0, 1, 1], [1, 1, 0, 1], [2, 1, 1, 0]])
    e = Fraction(1, 8)
    u = StepFuzzySet(X, [1, 0, 0, e])
    v = StepFuzzySet(X, [e, 1, 2 * e, 3 * e])
    value, xi, achieved = skorokhod_witness(u, v)
    assert value == achieved == d_skorokhod(u, v) == 1
    w = reparam_apply(xi, v)
    assert all(0 < m < e for m in w.membership if m < 1)
    assert max(xi.sup_deviation(), sup_level_distance(X, u.membership, w.membership, hausdorff)) == 1
    assert skorokhod_grid_oracle(X, u.membership, v.membership, GRID, hausdorff) == 2


@settings(max_examples=120, deadline=None)
@given(space_and_sets(2, max_size=4, denom=8))
def test_witness_realizes_value(args):
    X, u, v = args
    value, xi, achieved = skorokhod_witness(u, v)
    w = reparam_apply(xi, v)
    recomputed = max(xi.sup_deviation(), sup_level_distance(X, u.membership, w.membership, hausdorff))
    assert recomputed == achieved == max(xi.sup_deviation(), d_inf(u, w))
    assert achieved >= value


@settings(max_examples=120, deadline=None)
@given(space_and_sets(3, max_size=4, denom=4))
def test_symmetry_and_triangle(args):
    X, u, v, w = args
    assert d_skorokhod(u, v) == d_skorokhod(v, u)
    assert d_skorokhod(u, w) <= d_skorokhod(u, v) + d_skorokhod(v, w)


@settings(max_examples=60, deadline=None)
@given(space_and_sets(2, max_size=4, denom=8))
def test_graph_distance_oracle_at_native_grid(args):
    X, u, v = args
    assert d_end(u, v) == graph_distance_oracle(X, u.membership, v.membership, 8)


def test_line_space_random_pairs(rng):
    for _ in range(80):
        n = rng.randint(2, 4)
        X = line_space(sorted(rng.sample(range(9), n)))
        u, v = random_fuzzy(rng, X), random_fuzzy(rng, X)
        exact = d_skorokhod(u, v)
        upper = skorokhod_grid_oracle(X, u.membership, v.membership, GRID, hausdorff)
        assert exact <= upper <= exact + Fraction(1, GRID)


@pytest.mark.parametrize("k", [8, 10, 16])
def test_shifted_chain_links(k):
    X = discrete_space("ab")
    half = Fraction(1, 2)
    chain = [StepFuzzySet.from_membership(X, {"a": 1, "b": half + Fraction(j, k)}) for j in range(k // 2)]
    for s, t in zip(chain, chain[1:]):
        value, xi, achieved = skorokhod_witness(s, t)
        assert value == achieved == Fraction(1, k)
        upper = skorokhod_grid_oracle(X, s.membership, t.membership, 2 * k, hausdorff)
        assert upper == Fraction(1, k)
