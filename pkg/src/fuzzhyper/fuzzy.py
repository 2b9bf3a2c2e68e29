"""Step fuzzy sets on finite metric spaces and the four distances between them.

A step fuzzy set is stored through its membership vector, one exact value in
``[0, 1]`` per point.  The canonical breakpoints are the distinct positive
membership values and the level at breakpoint ``a`` is ``{x : u(x) >= a}``,
so adjacent equal levels can never occur.  Sets whose largest value is below
1 (subnormal, including the zero function) are allowed as intermediate
values but every distance function rejects them.
"""

from fractions import Fraction

from .errors import DomainError, NoWitness
from .metric_core import as_rational, bits, hausdorff

__all__ = [
    "StepFuzzySet",
    "Reparam",
    "level",
    "zadeh_extend",
    "d_inf",
    "d_end",
    "d_send",
    "d_skorokhod",
    "skorokhod_witness",
    "end_distance_values",
    "send_distance_values",
    "reparam_apply",
    "make_xi_k",
    "perturb_in_ball",
    "path_sample",
    "canonical_partition",
    "fuzzy_scale",
    "fuzzy_max",
    "METRICS",
    "metric_by_name",
]

ZERO = Fraction(0)
ONE = Fraction(1)


class StepFuzzySet:
    """A fuzzy set with finitely many membership values.

    Build one with :meth:`from_levels`, :meth:`from_membership` or
    :meth:`characteristic`.  ``breakpoints`` and ``levels`` (bitmasks) are
    always in canonical form.
    """

    __slots__ = ("space", "membership", "breakpoints", "levels", "_hash")

    def __init__(self, space, membership):
        mem = tuple(as_rational(m) for m in membership)
        if len(mem) != space.size:
            raise DomainError("membership vector does not match the space")
        for m in mem:
            if m < 0 or m > 1:
                raise DomainError(f"membership value {m} outside [0, 1]")
        self.space = space
        self.membership = mem
        self.breakpoints = tuple(sorted({m for m in mem if m > 0}))
        self.levels = tuple(_mask_at_least(mem, a) for a in self.breakpoints)
        self._hash = None

    @classmethod
    def from_membership(cls, space, values):
        """``values`` is a sequence aligned with the labels or a label dict."""
        if isinstance(values, dict):
            mem = [ZERO] * space.size
            for lab, val in values.items():
                mem[space.index(lab)] = as_rational(val)
            return cls(space, mem)
        return cls(space, values)

    @classmethod
    def from_levels(cls, space, breakpoints, levels, require_normal=False):
        """Build ``max_l alpha_l * chi(L_l)`` from nested levels.

        Levels may be bitmasks or iterables of labels.  They must be nested
        (each one inside the previous) and the last one nonempty.
        """
        alphas = [as_rational(a) for a in breakpoints]
        if len(alphas) != len(levels):
            raise DomainError("need one level per breakpoint")
        if not alphas:
            raise DomainError("a step fuzzy set needs at least one breakpoint")
        prev = None
        for a in alphas:
            if a <= 0 or a > 1:
                raise DomainError(f"breakpoint {a} outside (0, 1]")
            if prev is not None and a <= prev:
                raise DomainError("breakpoints must be strictly increasing")
            prev = a
        masks = []
        for lev in levels:
            mask = lev if isinstance(lev, int) else space.subset(lev)
            if mask >> space.size:
                raise DomainError("level has members outside the space")
            masks.append(mask)
        for outer, inner in zip(masks, masks[1:]):
            if inner & ~outer:
                raise DomainError("levels must be nested: each level inside the previous one")
        if masks[-1] == 0:
            raise DomainError("the top level must be nonempty")
        if require_normal and alphas[-1] != 1:
            raise DomainError("fuzzy set is not normal: the top breakpoint must be 1")
        mem = [ZERO] * space.size
        for a, mask in zip(alphas, masks):
            for i in bits(mask):
                mem[i] = a
        return cls(space, mem)

    @classmethod
    def characteristic(cls, space, subset):
        mask = subset if isinstance(subset, int) else space.subset(subset)
        space.check_subset(mask)
        return cls(space, [ONE if mask >> i & 1 else ZERO for i in range(space.size)])

    @classmethod
    def zero(cls, space):
        return cls(space, [ZERO] * space.size)

    @property
    def normal(self):
        return bool(self.breakpoints) and self.breakpoints[-1] == 1

    @property
    def support(self):
        return self.levels[0] if self.levels else 0

    @property
    def core(self):
        """The 1-level (empty for subnormal sets)."""
        return self.levels[-1] if self.normal else 0

    def value(self, label):
        return self.membership[self.space.index(label)]

    def require_normal(self):
        if not self.normal:
            raise DomainError("operation needs a normal fuzzy set (some point with membership 1)")

    def as_dict(self):
        return {lab: m for lab, m in zip(self.space.labels, self.membership) if m}

    def __eq__(self, other):
        if not isinstance(other, StepFuzzySet):
            return NotImplemented
        return self.membership == other.membership and self.space == other.space

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.membership)
        return self._hash

    def __repr__(self):
        return f"StepFuzzySet({describe(self)})"


def describe(u):
    """Short text such as ``{a:1, b:1/2}``."""
    parts = [f"{lab}:{m}" for lab, m in zip(u.space.labels, u.membership) if m]
    return "{" + ", ".join(parts) + "}"


def _mask_at_least(mem, a):
    mask = 0
    for i, m in enumerate(mem):
        if m >= a:
            mask |= 1 << i
    return mask


def _same_space(u, v):
    if u.space is not v.space and u.space != v.space:
        raise DomainError("fuzzy sets live on different spaces")


def _normal_pair(u, v):
    _same_space(u, v)
    u.require_normal()
    v.require_normal()


def level(u, alpha):
    """The alpha-level ``{x : u(x) >= alpha}``; alpha = 0 gives the support."""
    alpha = as_rational(alpha)
    if alpha < 0 or alpha > 1:
        raise DomainError("alpha must lie in [0, 1]")
    if alpha == 0:
        return u.support
    return _mask_at_least(u.membership, alpha)


def zadeh_extend(f, u):
    """Image of ``u`` under the Zadeh extension of ``f``.

    ``f`` is anything with ``space`` and an ``image`` index sequence.  The
    new membership at y is the largest membership over the preimage of y.
    """
    if f.space != u.space:
        raise DomainError("map and fuzzy set live on different spaces")
    out = [ZERO] * u.space.size
    for x, m in enumerate(u.membership):
        y = f.image[x]
        if m > out[y]:
            out[y] = m
    return StepFuzzySet(u.space, out)


def _alpha_grid(u, v):
    return sorted(set(u.breakpoints) | set(v.breakpoints))


def d_inf(u, v):
    """Supremum over alpha of the Hausdorff distance between alpha-levels."""
    _normal_pair(u, v)
    if u.membership == v.membership:
        return ZERO
    space = u.space
    best = hausdorff(space, u.support, v.support)
    for a in _alpha_grid(u, v):
        h = hausdorff(space, _mask_at_least(u.membership, a), _mask_at_least(v.membership, a))
        if h > best:
            best = h
    return best


def _directed_graph_distance(dist, mu, mv, xs, ys):
    worst = ZERO
    for x in xs:
        ux = mu[x]
        row = dist[x]
        best = None
        for y in ys:
            gap = ux - mv[y]
            t = row[y]
            if gap > t:
                t = gap
            if best is None or t < best:
                best = t
                if best <= worst:
                    break
        if best > worst:
            worst = best
    return worst


def end_distance_values(space, mu, mv):
    """Endograph distance for raw membership vectors (subnormal allowed).

    Each endograph contains the whole floor ``X x {0}``, so the nearest point
    of ``end(v)`` to ``(x, u(x))`` sits at some ``(y, min(u(x), v(y)))``.
    """
    n = space.size
    every = range(n)
    return max(
        _directed_graph_distance(space.dist, mu, mv, every, every),
        _directed_graph_distance(space.dist, mv, mu, every, every),
    )


def send_distance_values(space, mu, mv):
    """Sendograph distance for raw membership vectors with nonempty supports."""
    su = [i for i, m in enumerate(mu) if m > 0]
    sv = [i for i, m in enumerate(mv) if m > 0]
    if not su or not sv:
        raise DomainError("sendograph distance needs nonempty supports")
    return max(
        _directed_graph_distance(space.dist, mu, mv, su, sv),
        _directed_graph_distance(space.dist, mv, mu, sv, su),
    )


def d_end(u, v):
    """Hausdorff distance between endographs in the max product metric."""
    _normal_pair(u, v)
    if u.membership == v.membership:
        return ZERO
    return end_distance_values(u.space, u.membership, v.membership)


def d_send(u, v):
    """Hausdorff distance between sendographs in the max product metric."""
    _normal_pair(u, v)
    if u.membership == v.membership:
        return ZERO
    return send_distance_values(u.space, u.membership, v.membership)


# --- Skorokhod distance -------------------------------------------------
#
# A reparametrization only moves the breakpoints b_1 < ... < b_N = 1 of v to
# new positions g_1 < ... < g_N = 1, and the sup deviation of the best
# piecewise-linear choice is max |g_q - b_q|.  What matters for the level
# comparison is where each g_q sits relative to the breakpoints of u: inside
# an open gap (a_p, a_{p+1}) or exactly on some a_p.  Positions are coded as
# integers: gap p -> 2p, tie with a_p -> 2p - 1, and the fixed g_N = 1 is
# the tie 2M - 1.  A sweep over q with the allowed positions is a small DP.


def _pos_at(s):
    # index p of the u-interval (a_{p-1}, a_p] containing g
    return s // 2 + 1 if s % 2 == 0 else (s + 1) // 2


def _pos_after(s):
    # index of the u-interval just to the right of g
    return s // 2 + 1 if s % 2 == 0 else (s + 1) // 2 + 1


class _SkorokhodData:
    def __init__(self, u, v):
        space = u.space
        self.A = [ZERO] + list(u.breakpoints)
        self.B = [ZERO] + list(v.breakpoints)
        M = len(u.breakpoints)
        N = len(v.breakpoints)
        self.M, self.N = M, N
        # c[p][q] = d_H(U_p, V_q), 1-based
        self.c = [[None] * (N + 1) for _ in range(M + 1)]
        for p in range(1, M + 1):
            for q in range(1, N + 1):
                self.c[p][q] = hausdorff(space, u.levels[p - 1], v.levels[q - 1])

    def candidates(self):
        vals = {ZERO}
        for a in self.A + [ONE]:
            for b in self.B + [ONE]:
                vals.add(abs(a - b))
        for p in range(1, self.M + 1):
            for q in range(1, self.N + 1):
                vals.add(self.c[p][q])
        return sorted(vals)

    def _admissible(self, q, s, eps):
        A, B = self.A, self.B
        if q == self.N:
            return s == 2 * self.M - 1
        if s % 2 == 0:
            p = s // 2
            return B[q] - eps < A[p + 1] and B[q] + eps > A[p]
        p = (s + 1) // 2
        return abs(A[p] - B[q]) <= eps

    def feasible(self, eps):
        """Return the position sequence of a feasible alignment, or None."""
        M, N, c = self.M, self.N, self.c
        reach = {-1: None}
        parents = []
        for q in range(1, N + 1):
            if q == N:
                positions = [2 * M - 1]
            else:
                positions = range(0, 2 * M - 1)
            nxt = {}
            for s in positions:
                if not self._admissible(q, s, eps):
                    continue
                hi = _pos_at(s)
                for sp in sorted(reach):
                    if sp > s or (sp == s and s % 2 == 1):
                        continue
                    lo = _pos_after(sp)
                    if all(c[p][q] <= eps for p in range(lo, hi + 1)):
                        nxt[s] = sp
                        break
            if not nxt:
                return None
            parents.append(nxt)
            reach = nxt
        path = [2 * M - 1]
        for q in range(N - 1, 0, -1):
            path.append(parents[q][path[-1]])
        path.reverse()
        return path

    def realize(self, path, eps):
        """Turn a position sequence into concrete new breakpoints."""
        A, B, N = self.A, self.B, self.N
        gammas = []
        for q in range(1, N):
            s = path[q - 1]
            if s % 2 == 1:
                gammas.append(A[(s + 1) // 2])
                continue
            p = s // 2
            lo = max(A[p], B[q] - eps)
            hi = min(A[p + 1], B[q] + eps)
            t = Fraction(q, N)
            gammas.append((1 - t) * lo + t * hi)
        gammas.append(ONE)
        return gammas


def skorokhod_witness(u, v):
    """Exact Skorokhod distance plus a reparametrization that realizes it.

    Returns ``(value, xi, achieved)`` where ``achieved`` is the objective
    ``max(sup|xi - id|, d_inf(u, xi o v))`` of the returned ``xi``.  When the
    infimum is attained ``achieved == value``; otherwise ``xi`` comes from a
    slightly larger tolerance and ``achieved`` is strictly above ``value``.
    """
    _normal_pair(u, v)
    if u.membership == v.membership:
        return ZERO, Reparam.identity(), ZERO
    data = _SkorokhodData(u, v)
    cands = data.candidates()

    def probe(i):
        eps = cands[i]
        path = data.feasible(eps)
        if path is not None:
            return eps, path
        nxt = cands[i + 1] if i + 1 < len(cands) else eps + 1
        mid = (eps + nxt) / 2
        path = data.feasible(mid)
        if path is not None:
            return mid, path
        return None

    # feasibility is upward closed in eps, so binary search the first hit
    lo, hi = 0, len(cands) - 1
    found = probe(hi)
    assert found is not None, "large tolerances are always feasible"
    while lo < hi:
        mid = (lo + hi) // 2
        got = probe(mid)
        if got is not None:
            hi, found = mid, got
        else:
            lo = mid + 1
    eps_used, path = found
    gammas = data.realize(path, eps_used)
    knots = [(ZERO, ZERO)] + list(zip(data.B[1:-1], gammas[:-1])) + [(ONE, ONE)]
    xi = Reparam(knots)
    achieved = max(xi.sup_deviation(), d_inf(u, reparam_apply(xi, v)))
    return cands[lo], xi, achieved


def d_skorokhod(u, v):
    """Infimum over reparametrizations xi of max(sup|xi - id|, d_inf(u, xi o v))."""
    _normal_pair(u, v)
    if u.membership == v.membership:
        return ZERO
    # when the standard lower bounds meet d_inf there is nothing to search
    upper = d_inf(u, v)
    space = u.space
    lower = max(
        hausdorff(space, u.support, v.support),
        hausdorff(space, u.core, v.core),
        send_distance_values(space, u.membership, v.membership),
    )
    if lower == upper:
        return upper
    return skorokhod_witness(u, v)[0]


class Reparam:
    """Strictly increasing piecewise-linear bijection of [0, 1].

    ``knots`` is a list of ``(x, y)`` pairs starting at ``(0, 0)`` and ending
    at ``(1, 1)``.
    """

    __slots__ = ("knots",)

    def __init__(self, knots):
        pts = [(as_rational(x), as_rational(y)) for x, y in knots]
        if len(pts) < 2 or pts[0] != (ZERO, ZERO) or pts[-1] != (ONE, ONE):
            raise DomainError("a reparametrization must fix 0 and 1")
        for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
            if x1 <= x0 or y1 <= y0:
                raise DomainError("a reparametrization must be strictly increasing")
        self.knots = tuple(pts)

    @classmethod
    def identity(cls):
        return cls([(ZERO, ZERO), (ONE, ONE)])

    def __call__(self, t):
        t = as_rational(t)
        if t < 0 or t > 1:
            raise DomainError("reparametrizations act on [0, 1]")
        pts = self.knots
        for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
            if t <= x1:
                return y0 + (y1 - y0) * (t - x0) / (x1 - x0)
        return ONE  # pragma: no cover

    def inverse(self):
        return Reparam([(y, x) for x, y in self.knots])

    def sup_deviation(self):
        """sup |xi(t) - t|; attained at a knot since xi - id is piecewise linear."""
        return max(abs(y - x) for x, y in self.knots)

    def __eq__(self, other):
        return isinstance(other, Reparam) and self.knots == other.knots

    def __hash__(self):
        return hash(self.knots)

    def __repr__(self):
        inner = ", ".join(f"({x}, {y})" for x, y in self.knots)
        return f"Reparam([{inner}])"


def reparam_apply(xi, v):
    """The composition ``xi o v``: every membership value t becomes xi(t)."""
    return StepFuzzySet(v.space, [xi(m) for m in v.membership])


def make_xi_k(k):
    """Two-piece linear map sending 1/2 - 1/k to 1/2."""
    if not isinstance(k, int) or k <= 2:
        raise DomainError("k must be an integer greater than 2")
    knee = Fraction(1, 2) - Fraction(1, k)
    return Reparam([(ZERO, ZERO), (knee, Fraction(1, 2)), (ONE, ONE)])


def fuzzy_scale(beta, u):
    """Pointwise ``beta * u``; the result is subnormal when beta < 1."""
    beta = as_rational(beta)
    if beta < 0 or beta > 1:
        raise DomainError("scale factor must lie in [0, 1]")
    return StepFuzzySet(u.space, [beta * m for m in u.membership])


def fuzzy_max(u, *others):
    """Pointwise maximum of fuzzy sets on one space."""
    mem = list(u.membership)
    for v in others:
        _same_space(u, v)
        mem = [a if a >= b else b for a, b in zip(mem, v.membership)]
    return StepFuzzySet(u.space, mem)


def canonical_partition(u, eps):
    """Partition 0 = a_0 < ... < a_N = 1 with constant levels on each stratum.

    For a step set the native breakpoints already work with level distance
    zero inside every stratum, whatever ``eps`` is.
    """
    eps = as_rational(eps)
    if eps <= 0:
        raise DomainError("eps must be positive")
    u.require_normal()
    return [ZERO] + list(u.breakpoints)


def perturb_in_ball(u, eps, metric="d_end"):
    """Some ``v != u`` with ``metric(u, v) < eps``.

    For the endograph distance the order of attempts is: raise a point of
    small membership to eps/2, carve one point out of the support, and
    finally lower one membership value by eps/2.  For the supremum distance
    a point close to the core is added to or removed from every level.
    """
    eps = as_rational(eps)
    if eps <= 0:
        raise DomainError("eps must be positive")
    u.require_normal()
    space = u.space
    mem = u.membership
    n = space.size
    if metric in ("d_end", "end"):
        if n < 2:
            raise NoWitness("on a one-point space the only normal fuzzy set is isolated")
        delta = eps / 2
        for x in range(n):
            if mem[x] < delta:
                bumped = list(mem)
                bumped[x] = delta
                return StepFuzzySet(space, bumped)
        for x in range(n):
            carved = list(mem)
            carved[x] = ZERO
            v = StepFuzzySet(space, carved)
            if v.normal and d_end(u, v) < eps:
                return v
        top = sum(1 for m in mem if m == 1)
        for x in range(n):
            if mem[x] < 1 or top >= 2:
                dipped = list(mem)
                dipped[x] = mem[x] - delta
                return StepFuzzySet(space, dipped)
        raise NoWitness("no perturbation found")  # pragma: no cover
    if metric in ("d_inf", "inf"):
        for x in bits(u.core):
            row = space.dist[x]
            for y in range(n):
                if y != x and row[y] < eps:
                    changed = list(mem)
                    changed[y] = ONE if mem[y] < 1 else ZERO
                    v = StepFuzzySet(space, changed)
                    if d_inf(u, v) < eps:
                        return v
        raise NoWitness("no point of the core has a distinct neighbour within eps")
    raise DomainError(f"unsupported metric for perturbation: {metric!r}")


def path_sample(u, v, t):
    """Point at time t on the four-piece endograph path from u to v.

    With x and y the least labelled points of the cores of u and v, the
    pieces are: shrink u onto chi{x}, grow y up to 1, drop x to 0, then grow
    v back over chi{y}.  Each piece takes a quarter of the time.
    """
    _normal_pair(u, v)
    t = as_rational(t)
    if t < 0 or t > 1:
        raise DomainError("path parameter must lie in [0, 1]")
    space = u.space
    x = min(bits(u.core))
    y = min(bits(v.core))
    chi_x = StepFuzzySet.characteristic(space, 1 << x)
    chi_y = StepFuzzySet.characteristic(space, 1 << y)
    quarter = Fraction(1, 4)
    if t <= quarter:
        s = 4 * t
        return fuzzy_max(chi_x, fuzzy_scale(1 - s, u))
    if t <= 2 * quarter:
        s = 4 * t - 1
        if x == y:
            return chi_x
        return fuzzy_max(chi_x, fuzzy_scale(s, chi_y))
    if t <= 3 * quarter:
        s = 4 * t - 2
        if x == y:
            return chi_y
        return fuzzy_max(chi_y, fuzzy_scale(1 - s, chi_x))
    s = 4 * t - 3
    return fuzzy_max(chi_y, fuzzy_scale(s, v))


METRICS = {
    "inf": d_inf,
    "skorokhod": d_skorokhod,
    "send": d_send,
    "end": d_end,
}


def metric_by_name(name):
    """Look up a distance by short name (``inf``, ``skorokhod``, ``send``, ``end``)."""
    key = name[2:] if name.startswith("d_") else name
    if key == "0":
        key = "skorokhod"
    try:
        return METRICS[key]
    except KeyError:
        raise DomainError(f"unknown metric {name!r}; choose from {sorted(METRICS)}") from None
