"""Finite metric spaces with exact rational distances.

Subsets of a space are plain ``int`` bitmasks over the ordered label list,
so bit ``i`` stands for ``labels[i]``.  Everything here is immutable once
built and uses ``fractions.Fraction`` throughout.
"""

from fractions import Fraction
from itertools import product as _cartesian

from .errors import DomainError

__all__ = [
    "FiniteMetricSpace",
    "ProductSpace",
    "as_rational",
    "format_rational",
    "bits",
    "popcount",
    "directed_hausdorff",
    "hausdorff",
    "fatten",
    "product",
    "discrete_space",
    "line_space",
]


def as_rational(value):
    """Convert an int, Fraction or ``"p/q"``/decimal string to a Fraction."""
    if isinstance(value, bool):
        raise DomainError(f"not a rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"not a rational: {value!r}") from exc
    if isinstance(value, float):
        # go through repr so 0.1 means 1/10 rather than the binary double
        return Fraction(repr(value))
    raise DomainError(f"not a rational: {value!r}")


def format_rational(q):
    """Render a rational as ``"p/q"`` (or ``"p"`` for integers)."""
    return str(Fraction(q))


def bits(mask):
    """Yield the indices of the set bits of ``mask`` in increasing order."""
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def popcount(mask):
    return bin(mask).count("1")


class FiniteMetricSpace:
    """Labelled points with a symmetric matrix of exact distances.

    The metric axioms are checked on construction (including the triangle
    inequality over every ordered triple).  Pass ``validate=False`` only for
    spaces built by trusted code from an already validated metric.
    """

    def __init__(self, labels, dist, validate=True):
        labels = tuple(labels)
        if not labels:
            raise DomainError("a metric space needs at least one point")
        if len(set(labels)) != len(labels):
            raise DomainError("labels must be distinct")
        n = len(labels)
        if len(dist) != n or any(len(row) != n for row in dist):
            raise DomainError("distance matrix must be square and match the labels")
        rows = tuple(tuple(as_rational(v) for v in row) for row in dist)
        self.labels = labels
        self.dist = rows
        self._index = {lab: i for i, lab in enumerate(labels)}
        if validate:
            self._check_axioms()

    def _check_axioms(self):
        d = self.dist
        n = len(d)
        for i in range(n):
            if d[i][i] != 0:
                raise DomainError(f"d({self.labels[i]!r}, itself) must be 0")
            for j in range(i + 1, n):
                if d[i][j] != d[j][i]:
                    raise DomainError(
                        f"asymmetric distance between {self.labels[i]!r} and {self.labels[j]!r}"
                    )
                if d[i][j] <= 0:
                    raise DomainError(
                        f"distinct points {self.labels[i]!r}, {self.labels[j]!r} at distance "
                        f"{d[i][j]}; pseudometrics are rejected"
                    )
        for i in range(n):
            di = d[i]
            for j in range(n):
                dij = di[j]
                dj = d[j]
                for k in range(n):
                    if di[k] > dij + dj[k]:
                        raise DomainError(
                            "triangle inequality fails for "
                            f"{self.labels[i]!r}, {self.labels[j]!r}, {self.labels[k]!r}"
                        )

    @property
    def size(self):
        return len(self.labels)

    @property
    def full(self):
        """Bitmask of the whole space."""
        return (1 << len(self.labels)) - 1

    def distance(self, i, j):
        return self.dist[i][j]

    def index(self, label):
        try:
            return self._index[label]
        except KeyError:
            raise DomainError(f"unknown point {label!r}") from None

    def subset(self, labels):
        """Bitmask for an iterable of labels."""
        mask = 0
        for lab in labels:
            mask |= 1 << self.index(lab)
        return mask

    def members(self, mask):
        """Labels in ``mask``, in space order."""
        return [self.labels[i] for i in bits(mask)]

    def check_subset(self, mask):
        if not isinstance(mask, int) or mask <= 0:
            raise DomainError("compact sets must be nonempty")
        if mask >> len(self.labels):
            raise DomainError("set has members outside the space")

    def diameter(self):
        return max(max(row) for row in self.dist)

    def ball(self, i, eps):
        """Open ball ``{j : d(i, j) < eps}`` as a bitmask."""
        row = self.dist[i]
        mask = 0
        for j, dij in enumerate(row):
            if dij < eps:
                mask |= 1 << j
        return mask

    def nonempty_subsets(self):
        return range(1, 1 << len(self.labels))

    def __eq__(self, other):
        if not isinstance(other, FiniteMetricSpace):
            return NotImplemented
        return self.labels == other.labels and self.dist == other.dist

    def __hash__(self):
        return hash((self.labels, self.dist))

    def __repr__(self):
        return f"{type(self).__name__}(labels={list(self.labels)!r})"


class ProductSpace(FiniteMetricSpace):
    """The N-fold product of a base space under the max metric.

    Points are N-tuples of base labels in lexicographic order.
    """

    def __init__(self, base, arity):
        if not isinstance(arity, int) or arity < 1:
            raise DomainError("product arity must be a positive integer")
        self.base = base
        self.arity = arity
        idx = list(_cartesian(range(base.size), repeat=arity))
        labels = [tuple(base.labels[i] for i in t) for t in idx]
        bd = base.dist
        dist = [[max(bd[a][b] for a, b in zip(s, t)) for t in idx] for s in idx]
        super().__init__(labels, dist, validate=False)


def product(space, arity):
    return ProductSpace(space, arity)


def directed_hausdorff(space, A, B):
    """max over a in A of the distance from a to B."""
    d = space.dist
    blist = list(bits(B))
    worst = Fraction(0)
    for a in bits(A):
        row = d[a]
        best = min(row[b] for b in blist)
        if best > worst:
            worst = best
    return worst


def hausdorff(space, A, B):
    """Hausdorff distance between two nonempty subsets given as bitmasks."""
    space.check_subset(A)
    space.check_subset(B)
    if A == B:
        return Fraction(0)
    return max(directed_hausdorff(space, A, B), directed_hausdorff(space, B, A))


def fatten(space, Y, eps):
    """Closed fattening ``{x : d(x, Y) <= eps}``."""
    space.check_subset(Y)
    eps = as_rational(eps)
    if eps < 0:
        raise DomainError("fattening radius must be nonnegative")
    d = space.dist
    ys = list(bits(Y))
    mask = 0
    for x in range(space.size):
        row = d[x]
        if any(row[y] <= eps for y in ys):
            mask |= 1 << x
    return mask


def discrete_space(labels, scale=1):
    """All distinct points at distance ``scale``."""
    labels = list(labels)
    s = as_rational(scale)
    n = len(labels)
    return FiniteMetricSpace(labels, [[0 if i == j else s for j in range(n)] for i in range(n)])


def line_space(values, labels=None):
    """Points of the real line with the absolute-value metric."""
    vals = [as_rational(v) for v in values]
    if labels is None:
        labels = [format_rational(v) for v in vals]
    return FiniteMetricSpace(labels, [[abs(a - b) for b in vals] for a in vals])
