"""Delta-chains on finite systems and the constructions that lift or project them.

On a finite system there is an edge x -> y exactly when d(f(x), y) < delta.
Chain recurrence, transitivity and mixing then become questions about this
directed graph, and the graph only changes when delta crosses one of the
finitely many values d(f(x), y).
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import floor

import networkx as nx

from .errors import BudgetExceeded, DomainError
from .dynamics import FiniteSystem, HyperSystem, FuzzyGridSystem, Verdict, product_system
from .fuzzy import StepFuzzySet, describe, fuzzy_max, fuzzy_scale, metric_by_name, zadeh_extend
from .metric_core import bits

__all__ = [
    "DeltaChain",
    "critical_deltas",
    "sweep_deltas",
    "chain_graph",
    "chain_recurrent_at",
    "chain_transitive_at",
    "chain_mixing_at",
    "find_chain",
    "lift_chain_to_hyper",
    "lift_chain_to_fuzzy",
    "fuzzy_chain_via_levels",
    "project_fuzzy_chain_supports",
    "endograph_chain",
    "chain_profile",
]


@dataclass
class DeltaChain:
    """Points x_0, ..., x_n with the slack d(f(x_j), x_{j+1}) of every link.

    ``points`` holds the objects themselves (labels, frozensets or fuzzy
    sets); ``indices`` is filled when the chain lives in a finite system.
    """

    points: list
    delta: Fraction
    slacks: list
    system: str = ""
    indices: list = None
    metric: str = ""
    notes: list = field(default_factory=list)

    @property
    def length(self):
        return len(self.points) - 1

    @property
    def valid(self):
        return all(s < self.delta for s in self.slacks)

    def validate(self):
        for j, s in enumerate(self.slacks):
            if not s < self.delta:
                raise AssertionError(f"link {j} has slack {s}, not below delta {self.delta}")
        return self

    def describe_points(self):
        out = []
        for p in self.points:
            if isinstance(p, StepFuzzySet):
                out.append(describe(p))
            elif isinstance(p, frozenset):
                out.append("{" + ",".join(sorted(map(str, p))) + "}")
            else:
                out.append(str(p))
        return out


def _check_delta(delta):
    delta = Fraction(delta)
    if delta <= 0:
        raise DomainError("delta must be positive")
    return delta


def system_chain(sys, indices, delta):
    """Wrap a sequence of point indices, recomputing every slack."""
    img = sys.image
    slacks = [sys.distance(img[a], b) for a, b in zip(indices, indices[1:])]
    return DeltaChain(
        points=[sys.point(i) for i in indices],
        delta=Fraction(delta),
        slacks=slacks,
        system=sys.name,
        indices=list(indices),
    )


def fuzzy_chain(f, sets, delta, metric="end"):
    """Wrap fuzzy sets as a chain for the Zadeh extension of ``f``."""
    rho = metric_by_name(metric)
    slacks = [rho(zadeh_extend(f, a), b) for a, b in zip(sets, sets[1:])]
    return DeltaChain(
        points=list(sets),
        delta=Fraction(delta),
        slacks=slacks,
        system=f"fuzzy({f.name})",
        metric=metric,
    )


def critical_deltas(sys):
    """Sorted distinct values of d(f(x), y)."""
    vals = set()
    for x in sorted(set(sys.image)):
        vals.update(sys.row(x))
    return sorted(vals)


def sweep_deltas(sys):
    """One delta per distinct chain graph: midpoints, then max + 1."""
    vals = critical_deltas(sys)
    out = [(a + b) / 2 for a, b in zip(vals, vals[1:])]
    out.append(vals[-1] + 1)
    return out


def chain_graph(sys, delta):
    """Successor bitmasks: succ[x] = {y : d(f(x), y) < delta}."""
    delta = _check_delta(delta)
    balls = {}
    succ = []
    for x in range(sys.size):
        fx = sys.image[x]
        if fx not in balls:
            balls[fx] = sys.ball(fx, delta)
        succ.append(balls[fx])
    return succ


def _to_nx(succ):
    g = nx.DiGraph()
    g.add_nodes_from(range(len(succ)))
    for x, mask in enumerate(succ):
        g.add_edges_from((x, y) for y in bits(mask))
    return g


def _reach(succ, x):
    """Points reachable from x by chains of length >= 1."""
    seen = 0
    frontier = succ[x]
    while frontier & ~seen:
        new = frontier & ~seen
        seen |= new
        frontier = 0
        for y in bits(new):
            frontier |= succ[y]
    return seen


def _bfs_path(succ, x, y):
    """Shortest chain of length >= 1 from x to y, as an index list."""
    parent = {}
    frontier = []
    for z in bits(succ[x]):
        parent[z] = x
        frontier.append(z)
    if y in parent:
        return [x, y]
    while frontier:
        nxt = []
        for z in frontier:
            for w in bits(succ[z]):
                if w not in parent:
                    parent[w] = z
                    if w == y:
                        return _unwind(parent, x, y)
                    nxt.append(w)
        frontier = nxt
    return None


def _unwind(parent, x, y):
    path = [y]
    cur = parent[y]
    while cur != x:
        path.append(cur)
        cur = parent[cur]
    path.append(x)
    return path[::-1]


def _fixed_length_path(succ, x, y, length):
    layers = [1 << x]
    for _ in range(length):
        cur = 0
        for z in bits(layers[-1]):
            cur |= succ[z]
        layers.append(cur)
    if not layers[-1] >> y & 1:
        return None
    path = [y]
    for j in range(length - 1, -1, -1):
        target = path[-1]
        for z in bits(layers[j]):
            if succ[z] >> target & 1:
                path.append(z)
                break
    return path[::-1]


def find_chain(sys, x, y, delta, length=None):
    """A delta-chain from point x to point y (indices), or None.

    Without ``length`` the shortest chain of length at least 1 is returned.
    """
    delta = _check_delta(delta)
    succ = chain_graph(sys, delta)
    if length is None:
        path = _bfs_path(succ, x, y)
    else:
        if length < 1:
            raise DomainError("chain length must be at least 1")
        path = _fixed_length_path(succ, x, y, length)
    if path is None:
        return None
    return system_chain(sys, path, delta).validate()


def chain_recurrent_at(sys, delta):
    """Does every point return to itself along a delta-chain?"""
    delta = _check_delta(delta)
    succ = chain_graph(sys, delta)
    cycles = {}
    for x in range(sys.size):
        path = _bfs_path(succ, x, x)
        if path is None:
            return Verdict(False, witness=sys.label(x), notes=["no delta-chain returns to this point"])
        cycles[sys.label(x)] = [sys.label(i) for i in path]
    return Verdict(True, witness=cycles)


def _transitivity(sys, succ):
    reach = [_reach(succ, x) for x in range(sys.size)]
    full = (1 << sys.size) - 1
    if all(r == full for r in reach):
        return None
    # the most confined point gives the most telling witness
    x = min(range(sys.size), key=lambda i: (bin(reach[i]).count("1"), i))
    y = next(j for j in range(sys.size) if not reach[x] >> j & 1)
    return x, y


def chain_transitive_at(sys, delta):
    """Is every ordered pair joined by a delta-chain (one strongly connected graph)?"""
    delta = _check_delta(delta)
    succ = chain_graph(sys, delta)
    bad = _transitivity(sys, succ)
    if bad is None:
        return Verdict(True)
    x, y = bad
    return Verdict(False, witness=(sys.label(x), sys.label(y)), notes=["no delta-chain from the first point to the second"])


def chain_mixing_at(sys, delta):
    """Strongly connected and aperiodic chain graph.

    Aperiodic means the gcd of the cycle lengths is 1, which is what makes
    chains of every large enough length exist between any two points.
    """
    delta = _check_delta(delta)
    succ = chain_graph(sys, delta)
    bad = _transitivity(sys, succ)
    if bad is not None:
        x, y = bad
        return Verdict(False, witness=(sys.label(x), sys.label(y)), notes=["not chain transitive"])
    g = _to_nx(succ)
    if nx.is_aperiodic(g):
        return Verdict(True)
    return Verdict(False, value=_period(g), notes=["chain graph is periodic"])


def _period(g):
    """gcd of cycle lengths of a strongly connected digraph via BFS levels."""
    from math import gcd

    root = next(iter(g.nodes))
    level = {root: 0}
    queue = [root]
    for u in queue:
        for v in g.successors(u):
            if v not in level:
                level[v] = level[u] + 1
                queue.append(v)
    p = 0
    for u, v in g.edges:
        p = gcd(p, level[u] + 1 - level[v])
    return p


def lift_chain_to_hyper(chains, hyper=None):
    """Turn N equally long chains into the chain of sets K_j = {x^1_j, ..., x^N_j}."""
    chains = list(chains)
    if not chains:
        raise DomainError("need at least one chain")
    lengths = {c.length for c in chains}
    deltas = {c.delta for c in chains}
    if len(lengths) != 1:
        raise DomainError("chains to lift must share their length")
    if len(deltas) != 1:
        raise DomainError("chains to lift must share delta")
    if any(c.indices is None for c in chains):
        raise DomainError("chains to lift must live in a base system")
    if hyper is None:
        raise DomainError("pass the hyperextension to lift into")
    n = lengths.pop()
    masks = []
    for j in range(n + 1):
        mask = 0
        for c in chains:
            mask |= 1 << c.indices[j]
        masks.append(mask)
    return system_chain(hyper, [hyper.index_of(m) for m in masks], deltas.pop()).validate()


def lift_chain_to_fuzzy(sys, u, v, hyper_chains, breakpoints, delta):
    """Combine level chains into fuzzy sets u^j = max_l alpha_l * chi(K^l_j).

    ``hyper_chains[l]`` must run from the ``breakpoints[l]``-level of u to the
    same level of v, all with one length; the breakpoints must include every
    breakpoint of u and of v.  The result is checked link by link in d_inf.
    """
    alphas = [Fraction(a) for a in breakpoints]
    if len(alphas) != len(hyper_chains):
        raise DomainError("need one hyper chain per breakpoint")
    if not set(u.breakpoints) | set(v.breakpoints) <= set(alphas) or alphas[-1] != 1:
        raise DomainError("breakpoints must refine the breakpoints of both fuzzy sets")
    lengths = {c.length for c in hyper_chains}
    if len(lengths) != 1:
        raise DomainError("level chains must share their length")
    n = lengths.pop()
    space = sys.space
    for a, c in zip(alphas, hyper_chains):
        first = c.indices[0] + 1
        last = c.indices[-1] + 1
        if first != _level(u, a) or last != _level(v, a):
            raise DomainError(f"level chain at {a} does not join the {a}-levels of u and v")
    sets = []
    for j in range(n + 1):
        mem = [Fraction(0)] * space.size
        for a, c in zip(alphas, hyper_chains):
            for x in bits(c.indices[j] + 1):
                if a > mem[x]:
                    mem[x] = a
        sets.append(StepFuzzySet(space, mem))
    return fuzzy_chain(sys, sets, delta, "inf").validate()


def _level(u, a):
    return sum(1 << i for i, m in enumerate(u.membership) if m >= a)


def fuzzy_chain_via_levels(sys, u, v, delta, length, hyper=None):
    """Find level chains at delta/2 of a common length and lift them.

    Returns None when some level has no chain of that length.
    """
    delta = _check_delta(delta)
    hyper = hyper if hyper is not None else HyperSystem(sys)
    alphas = sorted(set(u.breakpoints) | set(v.breakpoints))
    pieces = []
    for a in alphas:
        c = find_chain(hyper, hyper.index_of(_level(u, a)), hyper.index_of(_level(v, a)), delta / 2, length)
        if c is None:
            return None
        pieces.append(c)
    return lift_chain_to_fuzzy(sys, u, v, pieces, alphas, delta)


def project_fuzzy_chain_supports(chain, sys, hyper=None):
    """The chain of supports of a sendograph (or stronger) fuzzy chain."""
    hyper = hyper if hyper is not None else HyperSystem(sys)
    idx = [hyper.index_of(u.support) for u in chain.points]
    return system_chain(hyper, idx, chain.delta).validate()


def endograph_chain(sys, u, v, delta, n):
    """An endograph delta-chain of length n from u to v for an onto map.

    With n_d = floor(1/delta) + 1 and eps = 1/n_d, fix x in the core of u and
    an exact n-step preimage w of v, then fade u out while fading w in along
    the orbit of x, drop chi of the orbit of x, and follow the orbit of w.
    Every link moves memberships by at most eps < delta.
    """
    delta = _check_delta(delta)
    if not sys.is_surjective:
        raise DomainError("the map must be onto (dense range) to build endograph chains")
    u.require_normal()
    v.require_normal()
    nd = floor(1 / delta) + 1
    eps = Fraction(1, nd)
    if n < 2 * nd:
        raise DomainError(f"length must be at least {2 * nd}")
    space = sys.space
    x = min(bits(u.core))
    # an onto self-map of a finite set is a bijection, so w = v o f^n is exact
    w_mem = list(v.membership)
    for _ in range(n):
        w_mem = [w_mem[sys.image[i]] for i in range(sys.size)]
    w = StepFuzzySet(space, w_mem)
    u_orbit = [u]
    w_orbit = [w]
    x_orbit = [x]
    for _ in range(n):
        u_orbit.append(zadeh_extend(sys, u_orbit[-1]))
        w_orbit.append(zadeh_extend(sys, w_orbit[-1]))
        x_orbit.append(sys.image[x_orbit[-1]])
    sets = []
    for j in range(n + 1):
        chi = StepFuzzySet.characteristic(space, 1 << x_orbit[j])
        if j <= nd:
            s = fuzzy_max(chi, fuzzy_scale(1 - j * eps, u_orbit[j]), fuzzy_scale(j * eps, w_orbit[j]))
        elif j <= 2 * nd:
            s = fuzzy_max(w_orbit[j], fuzzy_scale(1 - (j - nd) * eps, chi))
        else:
            s = w_orbit[j]
        sets.append(s)
    sets[-1] = v
    chain = fuzzy_chain(sys, sets, delta, "end")
    chain.notes.append(f"n_delta={nd}, eps={eps}")
    return chain.validate()


def _entry(sys, delta):
    rec = chain_recurrent_at(sys, delta)
    tra = chain_transitive_at(sys, delta)
    mix = chain_mixing_at(sys, delta)
    witness = {}
    if not rec:
        witness["recurrent"] = rec.witness
    if not tra:
        witness["transitive"] = list(tra.witness)
    if not mix and mix.value is not None:
        witness["period"] = mix.value
    return {
        "delta": delta,
        "recurrent": rec.holds,
        "transitive": tra.holds,
        "mixing": mix.holds,
        "witness": witness or None,
    }


def chain_profile(sys, max_arity=3, hyper=True, grids=(), budget=None):
    """Chain verdicts at every representative delta for a family of systems.

    ``grids`` is a list of ``(m, metric)`` pairs.  Systems that would exceed
    the budget are reported with ``partial`` set instead of being built.
    """
    systems = [("base", lambda: sys)]
    if isinstance(sys, FiniteSystem) and hasattr(sys, "space"):
        for k in range(2, max_arity + 1):
            systems.append((f"product{k}", lambda k=k: _bounded_product(sys, k, budget)))
    if hyper:
        systems.append(("hyper", lambda: HyperSystem(sys, budget)))
    for m, metric in grids:
        systems.append((f"grid_m{m}_{metric}", lambda m=m, metric=metric: FuzzyGridSystem(sys, m, metric, budget)))
    report = {"system": sys.name, "profiles": {}, "partial": False}
    for name, build in systems:
        try:
            target = build()
        except BudgetExceeded as exc:
            report["profiles"][name] = {"partial": True, "reason": str(exc)}
            report["partial"] = True
            continue
        report["profiles"][name] = {
            "size": target.size,
            "entries": [_entry(target, d) for d in sweep_deltas(target)],
        }
    return report


def _bounded_product(sys, k, budget):
    from .dynamics import default_budget

    budget = default_budget() if budget is None else budget
    count = sys.size**k
    if count > budget:
        raise BudgetExceeded(f"product^{k}", count, budget)
    return product_system(sys, k)
