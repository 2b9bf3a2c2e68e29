import random
import sys
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from fuzzhyper.fuzzy import StepFuzzySet  # noqa: E402
from fuzzhyper.metric_core import FiniteMetricSpace, discrete_space  # noqa: E402


def random_space(rng, n, top=4):
    """Shortest-path closure of random integer weights: always a metric."""
    w = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            w[i][j] = w[j][i] = rng.randint(1, top)
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if w[i][k] + w[k][j] < w[i][j]:
                    w[i][j] = w[i][k] + w[k][j]
    return FiniteMetricSpace([f"p{i}" for i in range(n)], w)


def random_fuzzy(rng, space, denom=8):
    mem = [Fraction(rng.randint(0, denom), denom) for _ in range(space.size)]
    mem[rng.randrange(space.size)] = Fraction(1)
    return StepFuzzySet(space, mem)


@st.composite
def spaces(draw, max_size=4):
    n = draw(st.integers(1, max_size))
    seed = draw(st.integers(0, 10**6))
    return random_space(random.Random(seed), n)


@st.composite
def space_and_sets(draw, count=2, max_size=4, denom=8):
    space = draw(spaces(max_size))
    out = []
    for _ in range(count):
        mem = [Fraction(draw(st.integers(0, denom)), denom) for _ in range(space.size)]
        mem[draw(st.integers(0, space.size - 1))] = Fraction(1)
        out.append(StepFuzzySet(space, mem))
    return (space, *out)


@pytest.fixture
def ab():
    return discrete_space("ab")


@pytest.fixture
def rng():
    return random.Random(20240611)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[number].line())
