"""Bundled example systems, all revalidated on construction."""

from fractions import Fraction

from .errors import DomainError
from .metric_core import FiniteMetricSpace, discrete_space, format_rational, line_space
from .dynamics import SystemMap

__all__ = [
    "two_point",
    "swap2",
    "identity2",
    "dyadic_line",
    "dyadic_chain_points",
    "cycle_n",
    "triadic_tail",
    "constant_n",
    "INSTANCES",
    "resolve",
]


def two_point():
    """X = {a, b} discrete, f(a) = f(b) = a."""
    return SystemMap(discrete_space("ab"), {"a": "a", "b": "a"}, name="two_point")


def swap2():
    return SystemMap(discrete_space("ab"), {"a": "b", "b": "a"}, name="swap2")


def identity2():
    return SystemMap(discrete_space("ab"), {"a": "a", "b": "b"}, name="identity2")


def dyadic_line(n):
    """Halving on {0} and the powers 2^i for -n <= i <= n, inside the real line.

    The smallest power is sent to 0 so that the set is invariant; every other
    point is mapped to exactly half of itself.
    """
    if not isinstance(n, int) or n < 1:
        raise DomainError("n must be a positive integer")
    values = [Fraction(0)] + [Fraction(2) ** i for i in range(-n, n + 1)]
    space = line_space(values)
    image = {}
    for v in values:
        target = v / 2 if v > Fraction(2) ** -n else Fraction(0)
        image[format_rational(v)] = format_rational(target)
    return SystemMap(space, image, name=f"dyadic_line({n})")


def dyadic_chain_points(n):
    """Labels of {0, 1, 2, 4, ..., 2^n} inside :func:`dyadic_line`."""
    return ["0"] + [format_rational(Fraction(2) ** i) for i in range(n + 1)]


def cycle_n(n):
    """Rotation of n points on a cycle with the shortest-path metric."""
    if not isinstance(n, int) or n < 1:
        raise DomainError("n must be a positive integer")
    labels = [f"a{i}" for i in range(n)]
    dist = [[min((i - j) % n, (j - i) % n) for j in range(n)] for i in range(n)]
    return SystemMap(
        FiniteMetricSpace(labels, dist),
        {labels[i]: labels[(i + 1) % n] for i in range(n)},
        name=f"cycle_{n}",
    )


def triadic_tail(m):
    """Right shift on {1, 1/3, ..., 1/3^(m-1), 0}: each point goes to the next, 0 is fixed."""
    if not isinstance(m, int) or m < 1:
        raise DomainError("m must be a positive integer")
    values = [Fraction(1, 3**i) for i in range(m)] + [Fraction(0)]
    space = line_space(values)
    labels = space.labels
    image = {labels[i]: labels[min(i + 1, len(values) - 1)] for i in range(len(values))}
    return SystemMap(space, image, name=f"triadic_tail({m})")


def constant_n(n):
    """Constant map onto the first of n points in a discrete space."""
    if not isinstance(n, int) or n < 1:
        raise DomainError("n must be a positive integer")
    labels = [f"c{i}" for i in range(n)]
    return SystemMap(discrete_space(labels), {lab: labels[0] for lab in labels}, name=f"constant_{n}")


INSTANCES = {
    "two_point": (two_point, 0),
    "swap2": (swap2, 0),
    "identity2": (identity2, 0),
    "dyadic_line": (dyadic_line, 1),
    "cycle": (cycle_n, 1),
    "triadic_tail": (triadic_tail, 1),
    "constant": (constant_n, 1),
}


def resolve(descriptor):
    """Build a system from ``name`` or ``name(arg)`` / ``name_arg`` strings.

    >>> resolve("cycle_4").name
    'cycle_4'
    """
    text = descriptor.strip()
    name, arg = text, None
    if text.endswith(")") and "(" in text:
        name, _, rest = text.partition("(")
        arg = rest[:-1]
    elif text not in INSTANCES and "_" in text:
        head, _, tail = text.rpartition("_")
        if tail.isdigit():
            name, arg = head, tail
    if name == "constant_n" or name == "cycle_n":
        name = name[:-2]
    if name not in INSTANCES:
        raise DomainError(f"unknown instance {descriptor!r}; known: {sorted(INSTANCES)}")
    factory, arity = INSTANCES[name]
    if arity == 0:
        if arg is not None:
            raise DomainError(f"instance {name!r} takes no parameter")
        return factory()
    if arg is None:
        raise DomainError(f"instance {name!r} needs an integer parameter")
    try:
        value = int(arg)
    except ValueError:
        raise DomainError(f"bad parameter {arg!r} for {name!r}") from None
    return factory(value)
