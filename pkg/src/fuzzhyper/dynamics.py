"""Self-maps of finite metric spaces and the systems they induce.

Every system exposes the same small interface (``size``, ``image``,
``distance``, ``row``, ``ball``, ``label``), so the chain and shadowing code
runs unchanged on a base map, on its hyperextension and on a finite grid of
fuzzy sets with any of the four distances.
"""

import os
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, lcm

from .errors import BudgetExceeded, DomainError, NoPreimage
from .fuzzy import (
    StepFuzzySet,
    describe,
    metric_by_name,
    zadeh_extend,
)
from .metric_core import FiniteMetricSpace, ProductSpace, bits, hausdorff

__all__ = [
    "FiniteSystem",
    "SystemMap",
    "HyperSystem",
    "FuzzyGridSystem",
    "Verdict",
    "default_budget",
    "product_system",
    "classify_contractive",
    "classify_expansive",
    "is_expanding",
    "is_positively_expansive",
    "hyper_extend",
    "fuzzy_grid",
    "grid_count",
    "contraexpansive_pair",
    "monotonicity_check",
    "has_dense_range",
    "approx_preimage",
    "is_topologically_mixing",
]

DEFAULT_BUDGET = 20000


def default_budget():
    """Size cap for enumerated systems, overridable with FUZZHYPER_BUDGET."""
    raw = os.environ.get("FUZZHYPER_BUDGET")
    if raw is None:
        return DEFAULT_BUDGET
    try:
        value = int(raw)
    except ValueError:
        raise DomainError(f"FUZZHYPER_BUDGET must be an integer, got {raw!r}") from None
    if value < 1:
        raise DomainError("FUZZHYPER_BUDGET must be positive")
    return value


@dataclass
class Verdict:
    """Outcome of a check: a boolean plus whatever explains it."""

    holds: bool
    value: object = None
    vacuous: bool = False
    witness: object = None
    notes: list = field(default_factory=list)

    def __bool__(self):
        return self.holds


class FiniteSystem:
    """A map on finitely many points with a metric given by ``distance``.

    Subclasses set ``size`` and ``image`` and implement ``_distance`` and
    ``label``.  Distances are memoized; ``row(i)`` returns the whole list.
    """

    name = "system"

    def __init__(self, size, image):
        image = tuple(image)
        if len(image) != size:
            raise DomainError("the map must be defined at every point")
        for y in image:
            if not 0 <= y < size:
                raise DomainError("the map must send points into the space")
        self.size = size
        self.image = image
        self._rows = {}
        self._balls = {}

    def _distance(self, i, j):
        raise NotImplementedError

    def label(self, i):
        raise NotImplementedError

    def point(self, i):
        return self.label(i)

    def distance(self, i, j):
        if i == j:
            return Fraction(0)
        row = self._rows.get(i)
        if row is not None:
            return row[j]
        row = self._rows.get(j)
        if row is not None:
            return row[i]
        return self._distance(i, j)

    def row(self, i):
        row = self._rows.get(i)
        if row is None:
            row = [Fraction(0) if j == i else self._distance(i, j) for j in range(self.size)]
            self._rows[i] = row
        return row

    def ball(self, i, eps):
        """Open ball ``{j : d(i, j) < eps}`` as a bitmask (memoized)."""
        key = (i, eps)
        mask = self._balls.get(key)
        if mask is None:
            mask = self._balls[key] = self._ball(i, eps)
        return mask

    def _ball(self, i, eps):
        mask = 0
        for j, dij in enumerate(self.row(i)):
            if dij < eps:
                mask |= 1 << j
        return mask

    def image_of(self, mask):
        out = 0
        img = self.image
        for i in bits(mask):
            out |= 1 << img[i]
        return out

    def iterate(self, i, n):
        for _ in range(n):
            i = self.image[i]
        return i

    @property
    def is_surjective(self):
        return len(set(self.image)) == self.size


class SystemMap(FiniteSystem):
    """A self-map of a :class:`FiniteMetricSpace`.

    ``image`` is a list of point indices or a dict from labels to labels.
    """

    def __init__(self, space, image, name=None):
        if isinstance(image, dict):
            missing = [lab for lab in space.labels if lab not in image]
            if missing:
                raise DomainError(f"map undefined at {missing!r}")
            extra = [lab for lab in image if lab not in space._index]
            if extra:
                raise DomainError(f"map defined at unknown points {extra!r}")
            image = [space.index(image[lab]) for lab in space.labels]
        super().__init__(space.size, image)
        self.space = space
        if name is not None:
            self.name = name

    def _distance(self, i, j):
        return self.space.dist[i][j]

    def distance(self, i, j):
        return self.space.dist[i][j]

    def row(self, i):
        return self.space.dist[i]

    def label(self, i):
        return self.space.labels[i]

    def mapping(self):
        return {self.space.labels[i]: self.space.labels[y] for i, y in enumerate(self.image)}

    def compose(self, other):
        """``self`` after ``other``."""
        return SystemMap(self.space, [self.image[y] for y in other.image])

    def power(self, n):
        if n < 0:
            raise DomainError("negative iterate")
        img = list(range(self.size))
        for _ in range(n):
            img = [self.image[y] for y in img]
        return SystemMap(self.space, img)

    def set_image(self, mask):
        return self.image_of(mask)

    def __repr__(self):
        return f"SystemMap({self.mapping()!r})"


def product_system(sys, arity):
    """The coordinatewise map on the N-fold product with the max metric."""
    space = ProductSpace(sys.space, arity)
    base_index = sys.space._index
    image = []
    for lab in space.labels:
        target = tuple(sys.space.labels[sys.image[base_index[c]]] for c in lab)
        image.append(space.index(target))
    return SystemMap(space, image, name=f"{sys.name}^{arity}")


def set_label(space, mask):
    return "{" + ",".join(str(x) for x in space.members(mask)) + "}"


class HyperSystem(FiniteSystem):
    """All nonempty subsets of X with the Hausdorff metric and K -> f(K).

    Point ``i`` is the subset with bitmask ``i + 1``.
    """

    def __init__(self, base, budget=None):
        budget = default_budget() if budget is None else budget
        count = (1 << base.size) - 1
        if count > budget:
            raise BudgetExceeded("hyperspace", count, budget)
        self.base = base
        self.name = f"hyper({base.name})"
        image = [base.image_of(mask) - 1 for mask in range(1, count + 1)]
        super().__init__(count, image)

    def mask(self, i):
        return i + 1

    def index_of(self, mask):
        self.base.space.check_subset(mask)
        return mask - 1

    def index_of_labels(self, labels):
        return self.index_of(self.base.space.subset(labels))

    def _distance(self, i, j):
        return hausdorff(self.base.space, i + 1, j + 1)

    def label(self, i):
        return set_label(self.base.space, i + 1)

    def point(self, i):
        return frozenset(self.base.space.members(i + 1))

    def as_space(self):
        """The hyperspace as an explicit :class:`FiniteMetricSpace`."""
        labels = [self.label(i) for i in range(self.size)]
        return FiniteMetricSpace(labels, [self.row(i) for i in range(self.size)], validate=False)


def hyper_extend(sys, budget=None):
    return HyperSystem(sys, budget)


def grid_count(n, m):
    """Number of normal membership vectors on n points with values in {0, 1/m, ..., 1}."""
    return (m + 1) ** n - m**n


def _grid_memberships(n, m):
    values = [Fraction(i, m) for i in range(m + 1)]
    out = []

    def rec(prefix):
        if len(prefix) == n:
            if max(prefix) == 1:
                out.append(tuple(prefix))
            return
        for v in values:
            prefix.append(v)
            rec(prefix)
            prefix.pop()

    rec([])
    return out


def nested_chain_count(n, m):
    """Count grid fuzzy sets as nested level chains, independently of the formula.

    A grid set is a chain L_{1/m} >= L_{2/m} >= ... >= L_1 with L_1 nonempty;
    equivalently each point picks the highest grid level it belongs to.
    """
    total = 0
    for top in range(1, 1 << n):
        # points outside L_1 choose one of m values in {0, 1/m, ..., (m-1)/m}
        total += m ** (n - bin(top).count("1"))
    return total


class FuzzyGridSystem(FiniteSystem):
    """Normal step fuzzy sets with membership values in {0, 1/m, ..., 1}.

    The Zadeh extension maps this set into itself.  ``metric`` is one of
    ``inf``, ``skorokhod``, ``send``, ``end``.  Distances are evaluated
    lazily and memoized.  Internally every distance and membership is scaled
    by a common denominator so the hot loops compare plain integers; the
    Skorokhod distance falls back to the exact solver only when its integer
    lower and upper bounds disagree.
    """

    def __init__(self, base, m, metric="end", budget=None):
        if not isinstance(m, int) or m < 1:
            raise DomainError("grid resolution must be a positive integer")
        budget = default_budget() if budget is None else budget
        count = grid_count(base.size, m)
        if count > budget:
            raise BudgetExceeded("fuzzy grid", count, budget)
        self.base = base
        self.m = m
        self.metric_name = metric if not metric.startswith("d_") else metric[2:]
        self.metric = metric_by_name(metric)
        if self.metric_name == "0":
            self.metric_name = "skorokhod"
        self.name = f"grid({base.name}, m={m}, {self.metric_name})"
        space = base.space
        self.sets = [StepFuzzySet(space, mem) for mem in _grid_memberships(base.size, m)]
        self._index = {u.membership: i for i, u in enumerate(self.sets)}
        image = [self._index[zadeh_extend(base, u).membership] for u in self.sets]
        super().__init__(len(self.sets), image)
        self._cache = {}
        self._prepare_integer_kernel()

    def _prepare_integer_kernel(self):
        space = self.base.space
        scale = self.m
        for row in space.dist:
            for d in row:
                scale = lcm(scale, d.denominator)
        self._scale = scale
        self._D = [[int(d * scale) for d in row] for row in space.dist]
        step = scale // self.m
        self._mem = [tuple(int(v * self.m) * step for v in u.membership) for u in self.sets]
        self._lev = []
        for u in self.sets:
            ks = [int(v * self.m) for v in u.membership]
            self._lev.append(
                tuple(sum(1 << x for x, k in enumerate(ks) if k >= t) for t in range(1, self.m + 1))
            )
        self._members = {}

    def _pts(self, mask):
        pts = self._members.get(mask)
        if pts is None:
            pts = self._members[mask] = list(bits(mask))
        return pts

    def _haus(self, A, B):
        if A == B:
            return 0
        D = self._D
        pa, pb = self._pts(A), self._pts(B)
        worst = 0
        for a in pa:
            row = D[a]
            best = min(row[b] for b in pb)
            if best > worst:
                worst = best
        for b in pb:
            row = D[b]
            best = min(row[a] for a in pa)
            if best > worst:
                worst = best
        return worst

    def _inf_int(self, i, j):
        li, lj = self._lev[i], self._lev[j]
        return max(self._haus(a, b) for a, b in zip(li, lj))

    def _graph_int(self, i, j, support_only):
        D = self._D
        mu, mv = self._mem[i], self._mem[j]
        if support_only:
            xs = self._pts(self._lev[i][0])
            ys = self._pts(self._lev[j][0])
        else:
            xs = ys = range(len(mu))
        worst = 0
        for p, q, P, Q in ((mu, mv, xs, ys), (mv, mu, ys, xs)):
            for x in P:
                px = p[x]
                row = D[x]
                best = None
                for y in Q:
                    t = row[y]
                    g = px - q[y]
                    if g > t:
                        t = g
                    if best is None or t < best:
                        best = t
                if best > worst:
                    worst = best
        return worst

    def _bounds(self, i, j):
        """Integer (lower, upper) bounds on the scaled distance."""
        name = self.metric_name
        if name == "inf":
            v = self._inf_int(i, j)
            return v, v
        if name == "end":
            v = self._graph_int(i, j, False)
            return v, v
        if name == "send":
            v = self._graph_int(i, j, True)
            return v, v
        li, lj = self._lev[i], self._lev[j]
        lower = max(
            self._graph_int(i, j, True),
            self._haus(li[0], lj[0]),
            self._haus(li[-1], lj[-1]),
        )
        return lower, self._inf_int(i, j)

    def index_of(self, u):
        try:
            return self._index[tuple(u.membership)]
        except KeyError:
            raise DomainError(f"{u!r} is not on the 1/{self.m} grid") from None

    def _distance(self, i, j):
        key = (i, j) if i < j else (j, i)
        val = self._cache.get(key)
        if val is None:
            lower, upper = self._bounds(i, j)
            if lower == upper:
                val = Fraction(upper, self._scale)
            else:
                val = self.metric(self.sets[i], self.sets[j])
            self._cache[key] = val
        return val

    def less_than(self, i, j, eps):
        """Decide ``d(i, j) < eps`` from integer bounds when they suffice."""
        if i == j:
            return eps > 0
        key = (i, j) if i < j else (j, i)
        val = self._cache.get(key)
        if val is not None:
            return val < eps
        threshold = ceil(Fraction(eps) * self._scale)
        lower, upper = self._bounds(i, j)
        if upper < threshold:
            return True
        if lower >= threshold:
            return False
        return self.distance(i, j) < eps

    def _ball(self, i, eps):
        if i in self._rows:
            return super()._ball(i, eps)
        threshold = ceil(Fraction(eps) * self._scale)
        mask = 0
        for j in range(self.size):
            if j == i:
                mask |= 1 << j
                continue
            key = (i, j) if i < j else (j, i)
            val = self._cache.get(key)
            if val is not None:
                inside = val < eps
            else:
                lower, upper = self._bounds(i, j)
                if upper < threshold:
                    inside = True
                elif lower >= threshold:
                    inside = False
                else:
                    inside = self.distance(i, j) < eps
            if inside:
                mask |= 1 << j
        return mask

    def label(self, i):
        return describe(self.sets[i])

    def point(self, i):
        return self.sets[i]


def fuzzy_grid(sys, m, metric="end", budget=None):
    return FuzzyGridSystem(sys, m, metric, budget)


def _pairs(sys):
    n = sys.size
    for i in range(n):
        for j in range(i + 1, n):
            yield i, j


def classify_contractive(sys):
    """Least Lipschitz constant if it is below 1, else None.

    A one-point system has no pairs and is reported with constant 0.
    """
    worst = Fraction(0)
    img = sys.image
    for i, j in _pairs(sys):
        ratio = sys.distance(img[i], img[j]) / sys.distance(i, j)
        if ratio > worst:
            worst = ratio
            if worst >= 1:
                return None
    return worst


def classify_expansive(sys):
    """Greatest expansion constant if it exceeds 1, else None.

    With no pairs at all (one point) there is nothing to certify and the
    answer is None.
    """
    best = None
    img = sys.image
    for i, j in _pairs(sys):
        ratio = sys.distance(img[i], img[j]) / sys.distance(i, j)
        if best is None or ratio < best:
            best = ratio
            if best <= 1:
                return None
    return best


def is_expanding(sys, eps):
    """Is there lambda > 1 with d(fx, fy) > lambda d(x, y) whenever 0 < d(x, y) < eps?

    ``value`` is the infimum ratio over the relevant pairs; any lambda
    strictly between 1 and it works.  No relevant pairs gives a vacuous pass.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise DomainError("eps must be positive")
    img = sys.image
    best = None
    worst_pair = None
    for i, j in _pairs(sys):
        d = sys.distance(i, j)
        if d >= eps:
            continue
        ratio = sys.distance(img[i], img[j]) / d
        if best is None or ratio < best:
            best, worst_pair = ratio, (sys.label(i), sys.label(j))
    if best is None:
        return Verdict(True, vacuous=True, notes=["no pair of points closer than eps"])
    return Verdict(best > 1, value=best, witness=worst_pair)


def is_positively_expansive(sys):
    """Optimal separation constant delta* = min over pairs of max_n d(f^n x, f^n y).

    Any delta below delta* works.  On a finite space the n = 0 term already
    separates distinct points, so the verdict is always true.
    """
    img = sys.image
    best = None
    witness = None
    for i, j in _pairs(sys):
        seen = set()
        a, b = i, j
        top = Fraction(0)
        while (a, b) not in seen:
            seen.add((a, b))
            d = sys.distance(a, b)
            if d > top:
                top = d
            a, b = img[a], img[b]
        if best is None or top < best:
            best, witness = top, (sys.label(i), sys.label(j))
    if best is None:
        return Verdict(True, vacuous=True, notes=["fewer than two points"])
    return Verdict(True, value=best, witness=witness)


def contraexpansive_pair(sys, x, y, k):
    """The pair chi{x} + 1/2 chi{y} and chi{x} + (1/2 - 1/k) chi{y}."""
    if not isinstance(k, int) or k <= 2:
        raise DomainError("k must be an integer greater than 2")
    space = sys.space
    if x == y:
        raise DomainError("the two points must differ")
    half = Fraction(1, 2)
    u = StepFuzzySet.from_membership(space, {x: 1, y: half})
    uk = StepFuzzySet.from_membership(space, {x: 1, y: half - Fraction(1, k)})
    return u, uk


def monotonicity_check(sys, metric, mode="contractive", samples=None, m=2, seed=0):
    """Compare rho(f^(u), f^(v)) with rho(u, v) over grid pairs.

    ``samples=None`` checks every pair of the 1/m grid; an integer draws that
    many pairs with a seeded generator.  Returns a Verdict whose value holds
    counts of strict and equal cases and whose witness is the first violation.
    """
    if mode not in ("contractive", "expansive"):
        raise DomainError("mode must be 'contractive' or 'expansive'")
    grid = FuzzyGridSystem(sys, m, metric)
    n = grid.size
    if samples is None:
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    else:
        rng = random.Random(seed)
        pairs = [tuple(rng.sample(range(n), 2)) if n > 1 else (0, 0) for _ in range(samples)]
    strict = equal = 0
    violation = None
    img = grid.image
    for i, j in pairs:
        before = grid.distance(i, j)
        after = grid.distance(img[i], img[j])
        ok = after <= before if mode == "contractive" else after >= before
        if not ok:
            violation = (grid.label(i), grid.label(j), before, after)
            break
        if after == before:
            equal += 1
        else:
            strict += 1
    counts = {"pairs": len(pairs), "strict": strict, "equal": equal}
    return Verdict(violation is None, value=counts, witness=violation)


def has_dense_range(sys):
    """On a finite (discrete) space dense range means onto."""
    return sys.is_surjective


def approx_preimage(sys, v, eps, metric="inf"):
    """A fuzzy set w with metric(f^(w), v) < eps, built from exact preimages.

    Each level of v is replaced by its full preimage, which maps back onto
    it exactly when f is onto.  A map that is not onto raises NoPreimage
    naming the missing points and a target level without preimage.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise DomainError("eps must be positive")
    v.require_normal()
    space = sys.space
    image = sys.image_of(space.full)
    if image != space.full:
        missing = space.members(space.full & ~image)
        bad = [lev for lev in v.levels if lev & ~image]
        target = bad[0] if bad else space.full & ~image & -(space.full & ~image)
        raise NoPreimage(
            f"map is not onto: {missing!r} have no preimage",
            missing=missing,
            level=space.members(target),
        )
    mem = [Fraction(0)] * space.size
    for a, lev in zip(v.breakpoints, v.levels):
        for x in range(space.size):
            if lev >> sys.image[x] & 1 and a > mem[x]:
                mem[x] = a
    w = StepFuzzySet(space, mem)
    rho = metric_by_name(metric)
    gap = rho(zadeh_extend(sys, w), v)
    if not gap < eps:  # pragma: no cover
        raise AssertionError("exact preimage failed to land within eps")
    return w


def is_topologically_mixing(sys):
    """Singletons are open in a finite space, so only one-point systems mix."""
    return sys.size == 1
