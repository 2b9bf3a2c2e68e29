"""JSON input and output with exact rationals.

Rationals are written as "p/q" strings (integers as plain digits).  On
input, integers, "p/q" strings and decimal strings are accepted; JSON
floats are converted through their shortest repr, so 0.1 means 1/10.

A space is described by one of::

    {"labels": [...], "dist": [[...], ...]}
    {"discrete": [...], "scale": "3"}
    {"line": ["0", "1", "3"], "labels": [...]}

A fuzzy set file holds ``{"space": <space>, "membership": {label: value}}``
and a map file ``{"space": <space>, "map": {label: label}}``.  A bare
instance name such as "swap2" may stand in for a map file's space and map.
"""

import json
from dataclasses import asdict, is_dataclass
from fractions import Fraction
from pathlib import Path

from .chains import DeltaChain
from .errors import DomainError, ParseError
from .fuzzy import StepFuzzySet
from .metric_core import FiniteMetricSpace, as_rational, discrete_space, format_rational, line_space

__all__ = [
    "load_json",
    "parse_space",
    "parse_fuzzy",
    "parse_map",
    "load_fuzzy",
    "load_map",
    "to_jsonable",
    "dumps",
]


def load_json(path):
    """Read a JSON file, turning syntax errors into ParseError with line context."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror or exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        line = text.splitlines()[exc.lineno - 1] if text.splitlines() else ""
        raise ParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}\n    {line}") from exc


def _rational(value, where):
    try:
        return as_rational(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"{where}: not a rational number: {value!r}") from exc


def _require(obj, key, where):
    if not isinstance(obj, dict) or key not in obj:
        raise ParseError(f"{where}: missing key {key!r}")
    return obj[key]


def parse_space(obj, where="space"):
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected an object")
    try:
        if "discrete" in obj:
            scale = _rational(obj.get("scale", 1), f"{where}.scale")
            return discrete_space([str(x) for x in obj["discrete"]], scale)
        if "line" in obj:
            values = [_rational(v, f"{where}.line[{i}]") for i, v in enumerate(obj["line"])]
            labels = obj.get("labels")
            return line_space(values, labels=[str(x) for x in labels] if labels else None)
        labels = [str(x) for x in _require(obj, "labels", where)]
        rows = _require(obj, "dist", where)
        if not isinstance(rows, list):
            raise ParseError(f"{where}.dist: expected a list of rows")
        dist = [[_rational(v, f"{where}.dist[{i}][{j}]") for j, v in enumerate(row)] for i, row in enumerate(rows)]
        return FiniteMetricSpace(labels, dist)
    except DomainError as exc:
        raise ParseError(f"{where}: {exc}") from exc


def parse_fuzzy(obj, where="fuzzy set", space=None):
    if space is None:
        space = parse_space(_require(obj, "space", where), f"{where}.space")
    mem = _require(obj, "membership", where)
    if not isinstance(mem, dict):
        raise ParseError(f"{where}.membership: expected an object keyed by label")
    values = {}
    for lab, v in mem.items():
        if lab not in space.labels:
            raise ParseError(f"{where}.membership: unknown label {lab!r}")
        values[lab] = _rational(v, f"{where}.membership[{lab!r}]")
    try:
        return StepFuzzySet.from_membership(space, values)
    except DomainError as exc:
        raise ParseError(f"{where}: {exc}") from exc


def parse_map(obj, where="map"):
    from .dynamics import SystemMap
    from .instances import resolve

    if isinstance(obj, str):
        try:
            return resolve(obj)
        except DomainError as exc:
            raise ParseError(f"{where}: {exc}") from exc
    space = parse_space(_require(obj, "space", where), f"{where}.space")
    image = _require(obj, "map", where)
    try:
        return SystemMap(space, image, name=obj.get("name", "map"))
    except DomainError as exc:
        raise ParseError(f"{where}: {exc}") from exc


def load_fuzzy(path, space=None):
    return parse_fuzzy(load_json(path), str(path), space)


def load_map(path):
    return parse_map(load_json(path), str(path))


def to_jsonable(obj):
    """Recursively convert library values into JSON-ready data.

    Fractions become "p/q" strings; plain ints (counts, sizes) stay numbers.
    """
    if isinstance(obj, (bool, int, float, str)) or obj is None:
        return obj
    if isinstance(obj, Fraction):
        return format_rational(obj)
    if isinstance(obj, StepFuzzySet):
        return {k: format_rational(v) for k, v in obj.as_dict().items()}
    if isinstance(obj, DeltaChain):
        return {
            "points": obj.describe_points(),
            "delta": format_rational(obj.delta),
            "slacks": [format_rational(s) for s in obj.slacks],
        }
    if isinstance(obj, frozenset):
        return sorted(to_jsonable(x) for x in obj)
    if is_dataclass(obj):
        return to_jsonable(asdict(obj))
    if isinstance(obj, dict):
        return {str(to_jsonable(k)) if not isinstance(k, str) else k: to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set)):
        items = [to_jsonable(x) for x in obj]
        return sorted(items, key=str) if isinstance(obj, set) else items
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent=2):
    return json.dumps(to_jsonable(obj), indent=indent, sort_keys=False)
