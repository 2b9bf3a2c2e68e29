"""Analysis reports: a deterministic payload plus a timing envelope."""

from .io import to_jsonable

__all__ = ["check", "make_report", "envelope", "all_passed", "to_markdown"]

EXHAUSTIVE = "exhaustive pass"


def check(name, passed, witness=None, **details):
    """One verdict.  Passing checks without a witness are marked exhaustive."""
    entry = {"name": name, "passed": bool(passed)}
    if witness is not None:
        entry["witness"] = witness
    elif passed:
        entry["witness"] = EXHAUSTIVE
    if details:
        entry["details"] = details
    return entry


def make_report(suite, instance, params, checks, partial=False, data=None):
    """``data`` carries command specific tables, such as chain profiles."""
    rep = {
        "suite": suite,
        "instance": instance,
        "params": params,
        "checks": list(checks),
        "partial": bool(partial),
    }
    if data is not None:
        rep["data"] = data
    return rep


def envelope(report, seconds):
    """Wall time lives outside the payload so reports compare byte for byte."""
    return {"report": to_jsonable(report), "wall_time_s": round(seconds, 3)}


def all_passed(report):
    return not report["partial"] and all(c["passed"] for c in report["checks"])


def _cell(value):
    if isinstance(value, (dict, list)):
        import json

        text = json.dumps(value, separators=(",", ":"))
    else:
        text = str(value)
    if len(text) > 120:
        text = text[:117] + "..."
    return text.replace("|", "\\|")


def to_markdown(env):
    rep = env["report"]
    lines = [f"# {rep['suite']}: {rep['instance']}", ""]
    if rep["params"]:
        lines.append("Parameters: " + ", ".join(f"{k}={_cell(v)}" for k, v in rep["params"].items()))
        lines.append("")
    lines.append("| check | result | details | witness |")
    lines.append("|---|---|---|---|")
    for c in rep["checks"]:
        status = "pass" if c["passed"] else "FAIL"
        details = ", ".join(f"{k}={_cell(v)}" for k, v in c.get("details", {}).items())
        lines.append(f"| {_cell(c['name'])} | {status} | {details} | {_cell(c.get('witness', ''))} |")
    lines.append("")
    if rep["partial"]:
        lines.append("Partial report: a resource budget was exceeded.")
        lines.append("")
    lines.append(f"Wall time: {env['wall_time_s']} s")
    return "\n".join(lines) + "\n"
