"""Acceptance criteria at zero tolerance.

Each test runs one criterion from :mod:`fuzzhyper.suite` and records a
pass/fail line that the terminal summary prints at the end of the run.
Criteria 7 and 8 fail at k = 8: the chain is genuinely shadowed there, and
the companion tests below prove it by checking the shadowing orbit exactly.
"""

from fractions import Fraction

import pytest

from fuzzhyper import suite
from fuzzhyper.fuzzy import StepFuzzySet, d_end, zadeh_extend
from fuzzhyper.shadowing import certify_not_shadowed, example_connected_chain, example_discrete_chain

RESULTS = {}


def run(number):
    res = suite.CRITERIA[number - 1]()
    RESULTS[number] = res
    print(res.line())
    return res


@pytest.mark.parametrize("number", range(1, 14))
def test_criterion(number):
    res = run(number)
    assert res.passed, res.failures


def _orbit_within(f, start, chain, eps0):
    cur = start
    for target in chain:
        if not d_end(cur, target) < eps0:
            return False
        cur = zadeh_extend(f, cur)
    return True


def test_discrete_k8_is_really_shadowed():
    f, c = example_discrete_chain(8)
    w = StepFuzzySet.from_membership(f.space, {"a": 1, "b": Fraction(11, 16)})
    assert _orbit_within(f, w, c.points, Fraction(1, 5))
    # every link is 1/8, so the chain only spans 3/8 and its midpoint is 3/16 from both ends
    assert d_end(w, c.points[0]) == d_end(w, c.points[-1]) == Fraction(3, 16)


def test_connected_k8_is_really_shadowed():
    f, c = example_connected_chain(8)
    cert = certify_not_shadowed(c.points, f, Fraction(1, 5), support=sorted({x for u in c.points for x in u.as_dict()}))
    assert cert.status == "shadowed"
    w = StepFuzzySet.from_membership(f.space, cert.witness)
    assert _orbit_within(f, w, c.points, Fraction(1, 5))


@pytest.mark.parametrize("k", [16, 24])
def test_discrete_finer_chains_are_certified(k):
    f, c = example_discrete_chain(k)
    assert certify_not_shadowed(c.points, f, Fraction(1, 5)).certified


def test_connected_k24_is_certified():
    f, c = example_connected_chain(24)
    labels = sorted({x for u in c.points for x in u.as_dict()})
    cert = certify_not_shadowed(c.points, f, Fraction(1, 5), support=labels)
    assert cert.certified and cert.partial
