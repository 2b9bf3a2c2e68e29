import json
from fractions import Fraction

import pytest

from fuzzhyper.cli import main
from fuzzhyper.errors import ParseError
from fuzzhyper.fuzzy import StepFuzzySet
from fuzzhyper.io import dumps, load_fuzzy, load_map, parse_space, to_jsonable
from fuzzhyper.metric_core import discrete_space, line_space


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(p)


def fuzzy_file(tmp_path, name, membership, scale=1):
    return write(tmp_path, name, {"space": {"discrete": ["a", "b"], "scale": scale}, "membership": membership})


def test_parse_space_forms():
    assert parse_space({"discrete": ["a", "b"], "scale": "3"}) == discrete_space("ab", 3)
    assert parse_space({"line": ["0", "1/2", 2]}) == line_space([0, Fraction(1, 2), 2])
    X = parse_space({"labels": ["x", "y"], "dist": [[0, "0.25"], ["1/4", 0]]})
    assert X.distance(0, 1) == Fraction(1, 4)
    with pytest.raises(ParseError):
        parse_space({"labels": ["x", "y"], "dist": [[0, 1], [2, 0]]})
    with pytest.raises(ParseError):
        parse_space({"labels": ["x"], "dist": [["abc"]]})
    with pytest.raises(ParseError):
        parse_space(["x"])


def test_load_fuzzy(tmp_path):
    p = fuzzy_file(tmp_path, "u.json", {"a": 1, "b": 0.5})
    u = load_fuzzy(p)
    assert u.as_dict() == {"a": 1, "b": Fraction(1, 2)}
    bad = write(tmp_path, "bad.json", '{"space": {"discrete": ["a"]},\n "membership": {"a": 1,}}')
    with pytest.raises(ParseError, match=r"bad.json:2:"):
        load_fuzzy(bad)
    unknown = fuzzy_file(tmp_path, "c.json", {"c": 1})
    with pytest.raises(ParseError, match="unknown label"):
        load_fuzzy(unknown)
    with pytest.raises(ParseError):
        load_fuzzy(str(tmp_path / "missing.json"))


def test_load_map(tmp_path):
    p = write(tmp_path, "f.json", {"space": {"discrete": ["a", "b"]}, "map": {"a": "b", "b": "a"}})
    assert tuple(load_map(p).image) == (1, 0)
    p = write(tmp_path, "g.json", '"cycle_4"')
    assert load_map(p).name == "cycle_4"
    p = write(tmp_path, "h.json", {"space": {"discrete": ["a", "b"]}, "map": {"a": "c", "b": "a"}})
    with pytest.raises(ParseError):
        load_map(p)


def test_rationals_serialize_as_strings():
    X = discrete_space("ab")
    u = StepFuzzySet.from_membership(X, {"a": 1, "b": Fraction(1, 3)})
    assert to_jsonable({"u": u, "d": Fraction(2, 4), "n": 3, "s": frozenset("ba")}) == {
        "u": {"a": "1", "b": "1/3"},
        "d": "1/2",
        "n": 3,
        "s": ["a", "b"],
    }
    assert json.loads(dumps([Fraction(5)])) == ["5"]


def test_cli_metric(tmp_path, capsys):
    u = fuzzy_file(tmp_path, "u.json", {"a": 1, "b": "1/2"})
    assert main(["metric", "--metric", "end", u, u]) == 0
    assert capsys.readouterr().out.strip() == "0"
    ab = fuzzy_file(tmp_path, "ab.json", {"a": 1, "b": 1}, scale=3)
    a = fuzzy_file(tmp_path, "a.json", {"a": 1}, scale=3)
    assert main(["metric", "--metric", "end", ab, a, "--oracle"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "1" and "agrees" in out[1]
    u3 = fuzzy_file(tmp_path, "u3.json", {"a": 1, "b": "3/4"})
    u4 = fuzzy_file(tmp_path, "u4.json", {"a": 1, "b": "7/8"})
    assert main(["metric", "--metric", "skorokhod", u3, u4, "--oracle"]) == 0
    assert capsys.readouterr().out.splitlines()[0] == "1/8"
    assert main(["metric", "--metric", "end", u3, u4, "--format", "json"]) == 0
    env = json.loads(capsys.readouterr().out)
    assert env["report"]["checks"][0]["witness"] == "1/8"


def test_cli_metric_errors(tmp_path, capsys):
    u = fuzzy_file(tmp_path, "u.json", {"a": 1})
    a3 = fuzzy_file(tmp_path, "a3.json", {"a": 1}, scale=3)
    assert main(["metric", u, a3]) == 2
    sub = fuzzy_file(tmp_path, "sub.json", {"a": "1/2"})
    assert main(["metric", u, sub]) == 2
    assert "normal" in capsys.readouterr().err


def test_cli_chains_swap(capsys):
    assert main(["chains", "swap2"]) == 0
    rep = json.loads(capsys.readouterr().out)["report"]
    hyper = {e["delta"]: e for e in rep["data"]["hyper"]}
    assert hyper["1/2"]["transitive"] is False
    assert hyper["1/2"]["witness"]["transitive"] == ["{a,b}", "{a}"]
    assert all(e["transitive"] for e in rep["data"]["base"])


def test_cli_reports_are_deterministic(capsys):
    main(["chains", "cycle_4", "--arity", "1"])
    first = json.loads(capsys.readouterr().out)["report"]
    main(["chains", "cycle_4", "--arity", "1"])
    assert json.loads(capsys.readouterr().out)["report"] == first


def test_cli_shadowing(capsys):
    assert main(["shadowing", "identity2", "--eps0", "1/5", "--k", "16"]) == 0
    checks = json.loads(capsys.readouterr().out)["report"]["checks"]
    assert checks[1]["details"]["status"] == "certified"
    # at k = 8 an orbit does shadow the chain, and the report says so
    assert main(["shadowing", "identity2", "--eps0", "1/5", "--k", "8", "--format", "md"]) == 1
    out = capsys.readouterr().out
    assert "shadowed" in out and "11/16" in out
    assert main(["shadowing", "identity2", "--delta", "2", "--eps", "1/2"]) == 1
    capsys.readouterr()
    assert main(["shadowing", "triadic_tail(3)", "--eps", "1/3"]) == 0
    checks = json.loads(capsys.readouterr().out)["report"]["checks"]
    assert checks[0]["witness"]["delta"] == "2/9"


def test_cli_dynamics(capsys):
    assert main(["dynamics", "triadic_tail_3", "--metric", "end"]) == 0
    checks = json.loads(capsys.readouterr().out)["report"]["checks"]
    assert checks[0]["witness"] == "1/2"


def test_cli_budget_and_unknown(capsys, monkeypatch):
    assert main(["chains", "nope"]) == 2
    monkeypatch.setenv("FUZZHYPER_BUDGET", "10")
    assert main(["chains", "cycle_4", "--format", "md"]) == 2
    assert "Partial report" in capsys.readouterr().out


def test_cli_paper_suite_subset(capsys):
    assert main(["paper-suite", "--only", "3,4", "--quiet"]) == 0
    rep = json.loads(capsys.readouterr().out)["report"]
    assert [c["passed"] for c in rep["checks"]] == [True, True]
    assert main(["paper-suite", "--only", "7", "--quiet"]) == 1


def test_cli_map_file(tmp_path, capsys):
    p = write(tmp_path, "f.json", {"space": {"line": [0, 1, 3]}, "map": {"0": "0", "1": "0", "3": "1"}})
    assert main(["dynamics", p, "--metric", "end"]) == 0
    checks = json.loads(capsys.readouterr().out)["report"]["checks"]
    assert checks[0]["witness"] == "1/2"
