"""Command line entry point.

Exit codes: 0 when every check passes, 1 when some check fails, 2 for
parse, validation and resource errors.
"""

import argparse
import json
import sys
import time
from fractions import Fraction
from math import lcm

from . import __version__
from .chains import chain_profile, chain_transitive_at, find_chain
from .dynamics import (
    FuzzyGridSystem,
    HyperSystem,
    classify_contractive,
    classify_expansive,
    has_dense_range,
    is_positively_expansive,
    is_topologically_mixing,
    monotonicity_check,
)
from .errors import BudgetExceeded, DomainError, ParseError
from .fuzzy import METRICS, metric_by_name
from .instances import resolve
from .io import load_fuzzy, load_json, load_map, parse_space
from .metric_core import as_rational, format_rational, hausdorff
from .report import all_passed, check, envelope, make_report, to_markdown
from .shadowing import (
    _rep_eps,
    all_chains_shadowed,
    certify_not_shadowed,
    example_connected_chain,
    example_discrete_chain,
    finite_shadowing_profile,
    theorem_shadowing_E_harness,
)

OK, FAILED, ERROR = 0, 1, 2


def _rational_arg(text):
    try:
        value = as_rational(text)
    except (DomainError, ValueError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from exc
    return value


def _positive_arg(text):
    value = _rational_arg(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _system(text):
    """A bundled instance name, or a JSON map file."""
    if text.endswith(".json"):
        return load_map(text)
    return resolve(text)


# --- metric --------------------------------------------------------------


def _load_pair(paths):
    first = load_json(paths[0])
    space = parse_space(first.get("space") if isinstance(first, dict) else None, f"{paths[0]}: space")
    u = load_fuzzy(paths[0], space)
    v = load_fuzzy(paths[1], space)
    other = load_json(paths[1])
    if isinstance(other, dict) and "space" in other:
        if parse_space(other["space"], f"{paths[1]}: space") != space:
            raise ParseError(f"{paths[1]}: the two fuzzy sets live on different spaces")
    return space, u, v


def _oracle(metric, space, u, v):
    """Reference value: exact for inf/end/send, an upper bound for skorokhod."""
    from .reference import graph_distance_oracle, skorokhod_grid_oracle, sup_level_distance

    if metric == "inf":
        return sup_level_distance(space, u.membership, v.membership, hausdorff), "exact"
    if metric in ("end", "send"):
        grid = lcm(*(Fraction(m).denominator for m in u.membership + v.membership))
        val = graph_distance_oracle(space, u.membership, v.membership, grid, metric == "send")
        return val, "exact"
    return skorokhod_grid_oracle(space, u.membership, v.membership, 16, hausdorff), "upper"


def cmd_metric(args):
    name = metric_by_name(args.metric).__name__.replace("d_", "")
    space, u, v = _load_pair(args.files)
    value = metric_by_name(args.metric)(u, v)
    checks = [check("value", True, witness=value)]
    if args.oracle:
        ref, kind = _oracle(name, space, u, v)
        ok = ref == value if kind == "exact" else value <= ref
        checks.append(check(f"oracle ({kind})", ok, witness=ref))
    if args.format is None:
        # plain mode: just the number, as the simplest scripting interface
        print(format_rational(value))
        if args.oracle:
            verdict = "agrees" if checks[1]["passed"] else "DISAGREES"
            print(f"oracle: {format_rational(ref)} ({kind}), {verdict}")
        return all(c["passed"] for c in checks), None
    return None, make_report("metric", " ".join(args.files), {"metric": name}, checks)


# --- chains --------------------------------------------------------------


def cmd_chains(args):
    f = _system(args.instance)
    grids = [(args.grid, args.metric)] if args.grid else []
    params = {"max_arity": args.arity, "grid": args.grid, "metric": args.metric if args.grid else None}
    checks = []
    if args.delta is not None:
        params["delta"] = args.delta
        systems = [("base", f), ("hyper", HyperSystem(f))]
        if args.grid:
            systems.append((f"grid_m{args.grid}_{args.metric}", FuzzyGridSystem(f, args.grid, args.metric)))
        for name, s in systems:
            v = chain_transitive_at(s, args.delta)
            witness = v.witness if not v.holds else None
            if witness is None:
                # show one chain between the first and last point as evidence
                c = find_chain(s, 0, s.size - 1, args.delta)
                witness = c.describe_points() if c else None
            checks.append(check(f"{name}: chain transitive at {args.delta}", True, witness, transitive=v.holds))
        return None, make_report("chains", f.name, params, checks)
    rep = chain_profile(f, max_arity=args.arity, grids=grids)
    for name, prof in rep["profiles"].items():
        if prof.get("partial"):
            checks.append(check(f"{name}: budget", False, prof["reason"]))
            continue
        for e in prof["entries"]:
            checks.append(
                check(
                    f"{name}: delta={format_rational(e['delta'])}",
                    True,
                    e["witness"],
                    recurrent=e["recurrent"],
                    transitive=e["transitive"],
                    mixing=e["mixing"],
                )
            )
    data = {name: prof.get("entries", prof) for name, prof in rep["profiles"].items()}
    return None, make_report("chains", f.name, params, checks, partial=rep["partial"], data=data)


# --- shadowing -----------------------------------------------------------


def _certificate_checks(args, f):
    eps0, h = args.eps0, args.resolution
    if args.k is not None and f.name == "identity2":
        _, chain = example_discrete_chain(args.k)
        cert = certify_not_shadowed(chain.points, f, eps0, h)
    elif args.k is not None and f.name.startswith("dyadic_line"):
        f, chain = example_connected_chain(args.k)
        labels = sorted({lab for u in chain.points for lab in u.as_dict()})
        cert = certify_not_shadowed(chain.points, f, eps0, h, support=labels)
    else:
        deltas = [args.delta] if args.delta else [Fraction(1, 10), Fraction(1, 20)]
        rep = theorem_shadowing_E_harness(f, eps0, deltas, h)
        if not rep["hypothesis"]:
            return [check("hypothesis: onto map on at least two points", False, rep["notes"])]
        return [check(f"not shadowed, delta={format_rational(r['delta'])}", r["status"] == "certified", r) for r in rep["rows"]]
    links = check("links", chain.valid, chain.describe_points(), slacks=chain.slacks)
    body = {"status": cert.status, "margin": cert.margin, "boxes": len(cert.boxes), "partial": cert.partial}
    witness = cert.witness if cert.witness is not None else body
    return [links, check(f"no orbit eps0-shadows the chain (k={args.k})", cert.certified, witness, **body)]


def cmd_shadowing(args):
    f = _system(args.instance)
    params = {"delta": args.delta, "eps": args.eps, "eps0": args.eps0, "k": args.k}
    if args.eps0 is not None:
        params["resolution"] = args.resolution
        return None, make_report("shadowing", args.instance, params, _certificate_checks(args, f))
    target = FuzzyGridSystem(f, args.grid, args.metric) if args.grid else f
    if args.grid:
        params.update(grid=args.grid, metric=args.metric)
    checks = []
    if args.delta is not None and args.eps is not None:
        v = all_chains_shadowed(target, args.delta, args.eps)
        witness = v.witness.describe_points() if v.witness is not None else None
        checks.append(check("every delta-chain is eps-shadowed", v.holds, witness, states=v.value))
    else:
        for eps in [args.eps] if args.eps else _rep_eps(target):
            p = finite_shadowing_profile(target, eps)
            checks.append(check(f"eps={format_rational(eps)}", p["delta"] is not None, p))
    return None, make_report("shadowing", args.instance, params, checks)


# --- dynamics ------------------------------------------------------------


def cmd_dynamics(args):
    f = _system(args.instance)
    checks = []
    lam = classify_contractive(f)
    checks.append(check("contractive constant", True, lam if lam is not None else "not contractive"))
    mu = classify_expansive(f)
    checks.append(check("expansive constant", True, mu if mu is not None else "not expansive"))
    pe = is_positively_expansive(f)
    checks.append(check("positively expansive", True, pe.value, holds=pe.holds))
    checks.append(check("dense range", True, has_dense_range(f)))
    checks.append(check("topologically mixing", True, is_topologically_mixing(f)))
    for metric in (args.metric,) if args.metric else ("skorokhod", "send", "end"):
        g = FuzzyGridSystem(f, args.grid, metric)
        glam = classify_contractive(g)
        checks.append(check(f"grid m={args.grid} {metric}: contractive constant", True, glam if glam is not None else "not contractive"))
        if lam is not None:
            v = monotonicity_check(f, metric, "contractive", m=args.grid)
            checks.append(check(f"grid m={args.grid} {metric}: extension does not expand", v.holds, v.witness, **v.value))
    return None, make_report("dynamics", f.name, {"grid": args.grid}, checks)


# --- acceptance suite ----------------------------------------------------


def cmd_paper_suite(args):
    from .suite import run_all

    select = {int(x) for x in args.only.split(",")} if args.only else None
    checks = []
    for r in run_all(select):
        checks.append(
            check(
                f"criterion {r.number}: {r.title}",
                r.passed,
                r.failures or None,
                checked=r.checked,
                seconds=r.seconds,
                results={str(k): v for k, v in r.details.items()},
            )
        )
        if not args.quiet:
            print(r.line(), file=sys.stderr)
    return None, make_report("paper-suite", "all", {"only": args.only}, checks)


# --- parser --------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="fuzzhyper", description="Exact fuzzy hyperspace metrics and dynamics.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, default_format="json"):
        sp.add_argument("--format", choices=("json", "md"), default=default_format)

    m = sub.add_parser("metric", help="distance between two fuzzy sets given as JSON files")
    m.add_argument("files", nargs=2)
    m.add_argument("--metric", default="end", help=f"one of {sorted(METRICS)}")
    m.add_argument("--oracle", action="store_true", help="cross-check against a brute-force reference")
    common(m, default_format=None)
    m.set_defaults(run=cmd_metric)

    c = sub.add_parser("chains", help="chain recurrence, transitivity and mixing profiles")
    c.add_argument("instance", help="bundled instance (swap2, cycle_4, triadic_tail(3), ...) or map .json file")
    c.add_argument("--delta", type=_positive_arg)
    c.add_argument("--arity", type=int, default=2, help="largest product power to include")
    c.add_argument("--grid", type=int, help="also analyse the 1/m fuzzy grid")
    c.add_argument("--metric", default="end")
    common(c)
    c.set_defaults(run=cmd_chains)

    s = sub.add_parser("shadowing", help="shadowing verdicts, profiles and certificates")
    s.add_argument("instance")
    s.add_argument("--delta", type=_positive_arg)
    s.add_argument("--eps", type=_positive_arg)
    s.add_argument("--eps0", type=_positive_arg, help="certify that a chain is not eps0-shadowed")
    s.add_argument("--k", type=int, help="chain parameter of the bundled examples")
    s.add_argument("--resolution", type=_positive_arg, default=Fraction(1, 64))
    s.add_argument("--grid", type=int, help="work on the 1/m fuzzy grid system")
    s.add_argument("--metric", default="end")
    common(s)
    s.set_defaults(run=cmd_shadowing)

    d = sub.add_parser("dynamics", help="contractive and expansive classification")
    d.add_argument("instance")
    d.add_argument("--grid", type=int, default=2)
    d.add_argument("--metric")
    common(d)
    d.set_defaults(run=cmd_dynamics)

    ps = sub.add_parser("paper-suite", help="run every acceptance criterion")
    ps.add_argument("--only", help="comma separated criterion numbers")
    ps.add_argument("--quiet", action="store_true")
    common(ps)
    ps.set_defaults(run=cmd_paper_suite)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        plain, report = args.run(args)
    except (ParseError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ERROR
    except BudgetExceeded as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return ERROR
    if report is None:
        return OK if plain else FAILED
    env = envelope(report, time.perf_counter() - start)
    if args.format == "md":
        sys.stdout.write(to_markdown(env))
    else:
        print(json.dumps(env, indent=2))
    if report["partial"]:
        return ERROR
    return OK if all_passed(report) else FAILED


if __name__ == "__main__":
    sys.exit(main())
