"""Shadowing of delta-chains on finite systems and non-shadowing certificates.

The tracker runs a subset construction over states ``(x_j, V_j)`` where
``V_j`` is the set of points f^j(v) for the starting points v whose orbits
have stayed within eps of the chain so far.  A reachable state with an empty
survivor set is a chain that nothing shadows.
"""

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

from .chains import chain_graph, critical_deltas, endograph_chain, fuzzy_chain, sweep_deltas, system_chain
from .dynamics import (
    FuzzyGridSystem,
    HyperSystem,
    Verdict,
    classify_contractive,
)
from .errors import BudgetExceeded, DomainError
from .fuzzy import StepFuzzySet
from .instances import dyadic_line, identity2
from .metric_core import bits

__all__ = [
    "is_eps_shadowed",
    "all_chains_shadowed",
    "finite_shadowing_profile",
    "contraction_bound_check",
    "random_chain",
    "example_discrete_chain",
    "example_connected_chain",
    "Certificate",
    "certify_not_shadowed",
    "shadowing_equivalence_harness",
    "theorem_shadowing_E_harness",
    "DEFAULT_STATE_BUDGET",
]

DEFAULT_STATE_BUDGET = 2_000_000


def _positive(value, name):
    value = Fraction(value)
    if value <= 0:
        raise DomainError(f"{name} must be positive")
    return value


def is_eps_shadowed(sys, seq, eps):
    """Least point x with d(f^j(x), seq[j]) < eps for every j, or None."""
    eps = _positive(eps, "eps")
    seq = list(seq)
    if not seq:
        raise DomainError("the sequence to shadow must be nonempty")
    for x in range(sys.size):
        y = x
        for target in seq:
            if not sys.distance(y, target) < eps:
                break
            y = sys.image[y]
        else:
            return x
    return None


def all_chains_shadowed(sys, delta, eps, state_budget=DEFAULT_STATE_BUDGET):
    """Is every delta-chain eps-shadowed?  On failure the witness is a shortest bad chain."""
    delta = _positive(delta, "delta")
    eps = _positive(eps, "eps")
    succ = chain_graph(sys, delta)
    balls = {}

    def ball(i):
        b = balls.get(i)
        if b is None:
            b = balls[i] = sys.ball(i, eps)
        return b

    images = {}

    def forward(mask):
        out = images.get(mask)
        if out is None:
            out = images[mask] = sys.image_of(mask)
        return out

    parent = {}
    queue = deque()
    for x in range(sys.size):
        state = (x, ball(x))
        parent[state] = None
        queue.append(state)
    while queue:
        state = queue.popleft()
        x, V = state
        img = forward(V)
        for y in bits(succ[x]):
            W = img & ball(y)
            nxt = (y, W)
            if nxt in parent:
                continue
            parent[nxt] = state
            if W == 0:
                path = [y]
                cur = state
                while cur is not None:
                    path.append(cur[0])
                    cur = parent[cur]
                path.reverse()
                chain = system_chain(sys, path, delta)
                return Verdict(False, value=len(parent), witness=chain)
            if len(parent) > state_budget:
                raise BudgetExceeded("shadowing tracker states", len(parent), state_budget)
            queue.append(nxt)
    return Verdict(True, value=len(parent), notes=["exhaustive pass over tracker states"])


def finite_shadowing_profile(sys, eps, state_budget=DEFAULT_STATE_BUDGET):
    """Largest delta such that every delta-chain is eps-shadowed.

    Passing is monotone in delta, so a binary search over the representative
    deltas finds the last passing interval (c_i, c_{i+1}]; its right end
    c_{i+1} is returned because chains use the strict inequality.  When even
    the top interval passes, the representative above every critical value
    is returned and ``unbounded`` is set.
    """
    eps = _positive(eps, "eps")
    reps = sweep_deltas(sys)
    crit = critical_deltas(sys)
    lo, hi = -1, len(reps) - 1
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if all_chains_shadowed(sys, reps[mid], eps, state_budget).holds:
            lo = mid
        else:
            hi = mid - 1
    if lo < 0:
        return {"eps": eps, "delta": None, "unbounded": False}
    if lo == len(reps) - 1:
        return {"eps": eps, "delta": reps[lo], "unbounded": True}
    return {"eps": eps, "delta": crit[lo + 1], "unbounded": False}


def random_chain(sys, delta, length, rng):
    """A uniformly stepped random delta-chain (indices)."""
    succ = chain_graph(sys, delta)
    x = rng.randrange(sys.size)
    path = [x]
    for _ in range(length):
        options = list(bits(succ[path[-1]]))
        path.append(rng.choice(options))
    return system_chain(sys, path, delta).validate()


def contraction_bound_check(sys, chain, eps, lam=None):
    """Check d(f^j(x_0), x_j) < (1 - lam^j) eps for j >= 1 along a chain.

    The chain is expected to be a delta-chain with delta = (1 - lam) eps.
    """
    eps = _positive(eps, "eps")
    if lam is None:
        lam = classify_contractive(sys)
        if lam is None:
            raise DomainError("the map is not contractive")
    lam = Fraction(lam)
    x = chain.indices[0]
    y = x
    worst = None
    for j, target in enumerate(chain.indices):
        if j:
            bound = (1 - lam**j) * eps
            d = sys.distance(y, target)
            if not d < bound:
                return Verdict(False, witness={"step": j, "distance": d, "bound": bound})
            gap = bound - d
            worst = gap if worst is None or gap < worst else worst
        y = sys.image[y]
    return Verdict(True, value=worst)


def example_discrete_chain(k, delta=None):
    """chi{a} + (1/2 + j/k) chi{b} for j = 0..k/2 - 1 under the identity on {a, b}.

    Links are checked in the Skorokhod distance; ``delta`` defaults to 2/k
    (anything above 1/k works).
    """
    _check_even_k(k)
    sys = identity2()
    n = k // 2 - 1
    half = Fraction(1, 2)
    sets = [StepFuzzySet.from_membership(sys.space, {"a": 1, "b": half + Fraction(j, k)}) for j in range(n + 1)]
    delta = Fraction(2, k) if delta is None else Fraction(delta)
    return sys, fuzzy_chain(sys, sets, delta, "skorokhod").validate()


def example_connected_chain(k, delta=None):
    """chi{0} + (1/2 + j/k) chi{2^(n-j)} on the dyadic truncation, n = k/2 - 1."""
    _check_even_k(k)
    n = k // 2 - 1
    sys = dyadic_line(n)
    half = Fraction(1, 2)
    sets = []
    for j in range(n + 1):
        top = str(Fraction(2) ** (n - j))
        sets.append(StepFuzzySet.from_membership(sys.space, {"0": 1, top: half + Fraction(j, k)}))
    delta = Fraction(2, k) if delta is None else Fraction(delta)
    chain = fuzzy_chain(sys, sets, delta, "skorokhod").validate()
    chain.notes.append("dyadic truncation of the real line")
    return sys, chain


def _check_even_k(k):
    if not isinstance(k, int) or k < 8 or k % 2:
        raise DomainError("k must be an even integer of at least 8")


# --- non-shadowing certificates -----------------------------------------
#
# Candidates are membership vectors in a box.  Both directed parts of the
# endograph distance are monotone in the memberships (the one out of p grows
# with p, the one into p shrinks), and so is the Zadeh extension.  Hence
#     d_E(f^j(p), u^j) >= max(D(f^j(lo) -> u^j), D(u^j -> f^j(hi)))
# for every p in [lo, hi], which certifies whole boxes at once.


def _directed(dist, mu, mv):
    worst = Fraction(0)
    n = len(mu)
    for x in range(n):
        ux = mu[x]
        row = dist[x]
        best = None
        for y in range(n):
            t = row[y]
            gap = ux - mv[y]
            if gap > t:
                t = gap
            if best is None or t < best:
                best = t
                if best <= worst:
                    break
        if best > worst:
            worst = best
    return worst


def _push(image, mem):
    out = [Fraction(0)] * len(mem)
    for x, m in enumerate(mem):
        y = image[x]
        if m > out[y]:
            out[y] = m
    return out


@dataclass
class Certificate:
    """Outcome of :func:`certify_not_shadowed`.

    ``status`` is ``certified`` (no candidate shadows), ``shadowed`` (the
    ``witness`` orbit shadows within eps0) or ``inconclusive`` (some box at
    the finest resolution stayed undecided).
    """

    status: str
    eps0: Fraction
    resolution: Fraction
    chain: list
    boxes: list = field(default_factory=list)
    margin: Fraction = None
    witness: object = None
    undecided: list = field(default_factory=list)
    partial: bool = False
    notes: list = field(default_factory=list)

    @property
    def certified(self):
        return self.status == "certified"


def certify_not_shadowed(chain_sets, sys, eps0, resolution=Fraction(1, 64), support=None, max_boxes=200_000):
    """Prove that no fuzzy orbit stays within eps0 of the chain in d_E.

    ``support`` restricts candidates to fuzzy sets supported on the given
    labels (the certificate is then flagged partial).  Boxes in membership
    space are split until each is certified by the monotone lower bound,
    contains a shadowing orbit, or reaches side ``resolution``.
    """
    eps0 = _positive(eps0, "eps0")
    h = _positive(resolution, "resolution")
    sets = list(chain_sets)
    for u in sets:
        u.require_normal()
    space = sys.space
    dist = space.dist
    targets = [list(u.membership) for u in sets]
    if support is None:
        dims = list(range(space.size))
        partial = False
    else:
        dims = sorted(space.index(lab) for lab in support)
        partial = len(dims) < space.size
    n = space.size
    image = sys.image

    def full(vals):
        mem = [Fraction(0)] * n
        for i, v in zip(dims, vals):
            mem[i] = v
        return mem

    def bound(lo, hi):
        """(best lower bound, index) over the chain for the box."""
        a, b = full(lo), full(hi)
        best, where = Fraction(-1), None
        for j, tgt in enumerate(targets):
            lb = max(_directed(dist, a, tgt), _directed(dist, tgt, b))
            if lb > best:
                best, where = lb, j
            if j + 1 < len(targets):
                a, b = _push(image, a), _push(image, b)
        return best, where

    def orbit_fits(mem):
        cur = mem
        for j, tgt in enumerate(targets):
            if not max(_directed(dist, cur, tgt), _directed(dist, tgt, cur)) < eps0:
                return False
            if j + 1 < len(targets):
                cur = _push(image, cur)
        return True

    def representative(lo, hi):
        mid = [(x + y) / 2 for x, y in zip(lo, hi)]
        top = max(range(len(dims)), key=lambda i: (hi[i], -i))
        mid[top] = Fraction(1)
        return full(mid)

    cert = Certificate("certified", eps0, h, [u.as_dict() for u in sets], partial=partial)
    if partial:
        cert.notes.append("candidates restricted to the given support")
    one = Fraction(1)
    stack = [([Fraction(0)] * len(dims), [one] * len(dims))]
    margin = None
    processed = 0
    while stack:
        lo, hi = stack.pop()
        processed += 1
        if processed > max_boxes:
            raise BudgetExceeded("certificate boxes", processed, max_boxes)
        if max(hi) < 1:
            continue  # no normal fuzzy set in this box
        lb, j = bound(lo, hi)
        if lb >= eps0:
            cert.boxes.append({"lo": lo, "hi": hi, "index": j, "bound": lb})
            gap = lb - eps0
            margin = gap if margin is None or gap < margin else margin
            continue
        rep = representative(lo, hi)
        if orbit_fits(rep):
            cert.status = "shadowed"
            cert.witness = StepFuzzySet(space, rep).as_dict()
            cert.margin = None
            return cert
        open_dims = [i for i in range(len(dims)) if hi[i] - lo[i] > h]
        if not open_dims:
            cert.undecided.append({"lo": lo, "hi": hi, "bound": lb})
            continue
        best_key, best_split = None, None
        for i in open_dims:
            mid = (lo[i] + hi[i]) / 2
            left_hi = list(hi)
            left_hi[i] = mid
            right_lo = list(lo)
            right_lo[i] = mid
            worst_child = min(
                bound(lo, left_hi)[0] if max(left_hi) == 1 else eps0,
                bound(right_lo, hi)[0] if max(hi) == 1 else eps0,
            )
            key = (worst_child, hi[i] - lo[i], -i)
            if best_key is None or key > best_key:
                best_key, best_split = key, (i, mid)
        i, mid = best_split
        left_hi = list(hi)
        left_hi[i] = mid
        right_lo = list(lo)
        right_lo[i] = mid
        stack.append((right_lo, hi))
        stack.append((lo, left_hi))
    if cert.undecided:
        cert.status = "inconclusive"
    cert.margin = margin
    return cert


def _rep_eps(sys):
    """Representative eps values: one per distinct set of strict balls."""
    vals = sorted({sys.distance(i, j) for i in range(sys.size) for j in range(sys.size)})
    out = [(a + b) / 2 for a, b in zip(vals, vals[1:])]
    out.append(vals[-1] + 1)
    return out


def shadowing_equivalence_harness(sys, eps_list=None, m=2, grid=True):
    """Finite shadowing profiles of the base, hyper and sup-metric grid systems.

    Every finite system passes at some delta (true orbits shadow
    themselves), so the comparison records the feasible deltas side by side
    and flags any eps where one level fails while another passes.
    """
    eps_list = _rep_eps(sys) if eps_list is None else [Fraction(e) for e in eps_list]
    hyper = HyperSystem(sys)
    levels = {"base": sys, "hyper": hyper}
    if grid:
        levels["fuzzy_inf"] = FuzzyGridSystem(sys, m, "inf")
    rows = []
    agree = True
    for eps in eps_list:
        prof = {name: finite_shadowing_profile(s, eps) for name, s in levels.items()}
        feasible = {name: p["delta"] is not None for name, p in prof.items()}
        same = len(set(feasible.values())) == 1
        implication = feasible["base"] or not feasible.get("fuzzy_inf", False)
        agree = agree and same and implication
        rows.append({"eps": eps, "profiles": prof, "agree": same and implication})
    return {"system": sys.name, "rows": rows, "agree": agree}


def theorem_shadowing_E_harness(sys, eps0, deltas, resolution=Fraction(1, 64)):
    """Build endograph chains with far-apart ends and certify each is not shadowed.

    The chain starts at chi{x} for the first point x and ends at chi{z} for
    the point z farthest from f^n(x), with n = 2 n_delta.
    """
    eps0 = _positive(eps0, "eps0")
    if sys.size < 2 or not sys.is_surjective:
        return {
            "system": sys.name,
            "hypothesis": False,
            "notes": ["needs an onto map on at least two points"],
            "rows": [],
        }
    rows = []
    for delta in deltas:
        delta = Fraction(delta)
        nd = int(1 / delta) + 1
        n = 2 * nd
        x = 0
        end = sys.iterate(x, n)
        far = max(range(sys.size), key=lambda z: (sys.distance(end, z), -z))
        u = StepFuzzySet.characteristic(sys.space, 1 << x)
        v = StepFuzzySet.characteristic(sys.space, 1 << far)
        chain = endograph_chain(sys, u, v, delta, n)
        cert = certify_not_shadowed(chain.points, sys, eps0, resolution)
        rows.append({"delta": delta, "length": n, "max_slack": max(chain.slacks), "status": cert.status})
    return {"system": sys.name, "hypothesis": True, "rows": rows}
