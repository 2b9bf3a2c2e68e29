"""Slow reference implementations that follow the definitions directly.

They share no code with the algorithms they check and are used by the test
suite, the acceptance criteria and the CLI ``--oracle`` flag.
"""

from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product


def hausdorff_by_fattening(space, A, B):
    """Least pairwise distance eps with A inside B+eps and B inside A+eps."""
    pts_a = [i for i in range(space.size) if A >> i & 1]
    pts_b = [i for i in range(space.size) if B >> i & 1]
    values = sorted({space.dist[i][j] for i in range(space.size) for j in range(space.size)})
    for eps in values:
        a_in = all(any(space.dist[a][b] <= eps for b in pts_b) for a in pts_a)
        b_in = all(any(space.dist[b][a] <= eps for a in pts_a) for b in pts_b)
        if a_in and b_in:
            return eps
    raise AssertionError("unreachable")


def _hausdorff_points(P, Q, dist):
    def directed(S, T):
        return max(min(dist(s, t) for t in T) for s in S)

    return max(directed(P, Q), directed(Q, P))


def graph_points(space, membership, grid, support_only=False):
    """Endograph (or sendograph) sampled at heights j/grid."""
    pts = []
    for x, m in enumerate(membership):
        if support_only and m == 0:
            continue
        j = 0
        while Fraction(j, grid) <= m:
            pts.append((x, Fraction(j, grid)))
            j += 1
    return pts


def graph_distance_oracle(space, mu, mv, grid=64, support_only=False):
    """Product-metric Hausdorff distance between sampled graphs.

    Exact when every membership value is a multiple of 1/grid.
    """
    P = graph_points(space, mu, grid, support_only)
    Q = graph_points(space, mv, grid, support_only)

    def dist(p, q):
        return max(space.dist[p[0]][q[0]], abs(p[1] - q[1]))

    return _hausdorff_points(P, Q, dist)


def level_mask(mem, a):
    return sum(1 << i for i, m in enumerate(mem) if m >= a)


def sup_level_distance(space, mu, mv, hausdorff):
    """d_inf by checking every alpha in a fine enough set of sample points."""
    vals = sorted({m for m in list(mu) + list(mv) if m > 0} | {Fraction(1)})
    samples = [Fraction(0)]
    prev = Fraction(0)
    for a in vals:
        samples.append((prev + a) / 2)
        samples.append(a)
        prev = a
    best = Fraction(0)
    for a in samples:
        A = level_mask(mu, a) if a > 0 else level_mask(mu, min(x for x in mu if x > 0))
        B = level_mask(mv, a) if a > 0 else level_mask(mv, min(x for x in mv if x > 0))
        best = max(best, hausdorff(space, A, B))
    return best


def skorokhod_grid_oracle(space, mu, mv, grid, hausdorff):
    """Best objective over reparametrizations whose knots lie on a 1/grid mesh.

    Every candidate is a genuine reparametrization, so the result is an
    upper bound for the exact infimum.
    """
    betas = sorted({m for m in mv if m > 0})
    inner = betas[:-1]
    mesh = [Fraction(i, grid) for i in range(1, grid)]
    best = None
    for gam in combinations(mesh, len(inner)):
        dev = max([abs(g - b) for g, b in zip(gam, inner)] + [Fraction(0)])
        if best is not None and dev >= best:
            continue
        table = dict(zip(inner, gam))
        table[Fraction(1)] = Fraction(1)
        mw = [table[m] if m > 0 else Fraction(0) for m in mv]
        val = max(dev, sup_level_distance(space, mu, mw, hausdorff))
        if best is None or val < best:
            best = val
    return best


def all_grid_memberships(n, m):
    """Every normal membership vector with values in {0, 1/m, ..., 1}."""
    values = [Fraction(i, m) for i in range(m + 1)]
    for mem in product(values, repeat=n):
        if max(mem) == 1:
            yield mem


def unshadowed_chain(sys, delta, eps, max_length):
    """Depth-first search over delta-chains of length <= max_length for one
    that no orbit eps-shadows.  Returns the chain (indices) or None.

    Prefixes are memoized on (last point, current iterates of the start
    points still tracking, steps left), which is all the future depends on.
    """
    n = sys.size
    img = sys.image
    near = [[sys.distance(a, b) < eps for b in range(n)] for a in range(n)]
    succ = [[y for y in range(n) if sys.distance(img[x], y) < delta] for x in range(n)]

    @lru_cache(maxsize=None)
    def bad_tail(y, pts, left):
        if not pts:
            return ()
        if left == 0:
            return None
        for z in succ[y]:
            nxt = tuple(sorted({img[p] for p in pts if near[img[p]][z]}))
            tail = bad_tail(z, nxt, left - 1)
            if tail is not None:
                return (z,) + tail
        return None

    for x in range(n):
        tail = bad_tail(x, tuple(s for s in range(n) if near[s][x]), max_length)
        if tail is not None:
            return [x, *tail]
    return None


def mixing_by_lengths(sys, delta):
    """Chains of every length in [(V-1)^2 + 1, (V-1)^2 + 1 + V^2] between all pairs."""
    n = sys.size
    succ = [sum(1 << y for y in range(n) if sys.distance(sys.image[x], y) < delta) for x in range(n)]
    full = (1 << n) - 1
    reach = [1 << x for x in range(n)]

    def step(masks):
        out = []
        for m in masks:
            r = 0
            for x in range(n):
                if m >> x & 1:
                    r |= succ[x]
            out.append(r)
        return out

    for _ in range((n - 1) ** 2 + 1):
        reach = step(reach)
    for _ in range(n * n + 1):
        if any(r != full for r in reach):
            return False
        reach = step(reach)
    return True
