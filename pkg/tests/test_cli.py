import json

import jsonschema
import pytest

from sharegraph.cli import EXIT_FUEL, EXIT_OK, EXIT_PROPERTY, EXIT_USAGE, RunConfig, load_trs, main
from sharegraph.engine import TRACE_SCHEMA, DerivationTrace, audit_bounds


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_normalize_rf(capsys):
    code, out, _ = run(capsys, "normalize", "rf", "f(a)")
    assert code == EXIT_OK
    assert out.strip() == "⊤ (2 steps, bounds OK)"


@pytest.mark.parametrize("strategy,expected", [("li", "c(b,b)"), ("lo", "c(b,b)"), ("ff", "c(b,b)")])
def test_normalize_rg(capsys, strategy, expected):
    code, out, _ = run(capsys, "normalize", "rg.trs", "dup(a)", "--strategy", strategy)
    assert code == EXIT_OK and out.startswith(expected + " (")


def test_normalize_all(capsys):
    code, out, _ = run(capsys, "normalize", "rf", "f(a)", "--strategy", "all")
    assert code == EXIT_OK
    assert out.splitlines()[0] == "⊤"


def test_normalize_json_round_trip(capsys):
    code, out, _ = run(capsys, "normalize", "mult", "*(s(s(0)),s(s(0)))", "--json")
    assert code == EXIT_OK
    assert len(out.strip().splitlines()) == 1
    d = json.loads(out)
    jsonschema.validate(d, TRACE_SCHEMA)
    tr = DerivationTrace.from_json(d)
    assert tr.normal_form and tr.to_json() == d
    assert all(v.ok for v in audit_bounds(tr))


def test_fuel_exhausted(capsys):
    code, out, _ = run(capsys, "normalize", "mult", "*(s(s(0)),s(s(0)))", "--fuel", "2")
    assert code == EXIT_FUEL
    assert "fuel exhausted" in out


def test_dot_output(capsys, tmp_path):
    code, _, _ = run(capsys, "normalize", "rg", "dup(a)", "--dot", str(tmp_path))
    assert code == EXIT_OK
    files = sorted(p.name for p in tmp_path.iterdir())
    assert files == ["step0000.dot", "step0001.dot", "step0002.dot"]
    assert (tmp_path / "step0000.dot").read_text().startswith("digraph")


def test_parse_error(capsys, tmp_path):
    bad = tmp_path / "bad.trs"
    bad.write_text("(VAR x)(RULES f(x) -> )")
    code, _, err = run(capsys, "normalize", str(bad), "f(a)")
    assert code == EXIT_USAGE and "parse error" in err


def test_usage_errors(capsys):
    assert run(capsys, "normalize", "nosuchfile.trs", "f(a)")[0] == EXIT_USAGE
    assert run(capsys, "normalize", "rf", "f(a)", "--strategy", "xx")[0] == EXIT_USAGE
    assert run(capsys, "normalize", "rf", "f(a)", "--fuel", "-1")[0] == EXIT_USAGE
    assert run(capsys)[0] == EXIT_USAGE
    assert run(capsys, "--help")[0] == EXIT_OK


def test_adequacy(capsys):
    code, out, _ = run(capsys, "adequacy", "rf", "f(a)", "--depth", "3")
    assert code == EXIT_OK
    code, out, _ = run(capsys, "adequacy", "rg", "dup(a)", "--no-unfold", "--json")
    d = json.loads(out)
    assert code == EXIT_PROPERTY and not d["passed"] and d["counterexamples"]


def test_compute(capsys):
    code, out, _ = run(capsys, "compute", "rsat", "--entry", "issat", "--na", "unsat",
                       "--cnf", "1 0")
    assert code == EXIT_OK
    assert out.splitlines()[0] == "cons(O(eps),nil)"
    code, out, _ = run(capsys, "compute", "rsat", "cons(cons(Z(eps),nil),nil)",
                       "--entry", "issat", "--na", "unsat", "--json")
    assert code == EXIT_OK and json.loads(out)["accepted"] == ["cons(Z(eps),nil)"]


def test_compute_unsat(capsys, tmp_path):
    f = tmp_path / "u.cnf"
    f.write_text("p cnf 1 2\n1 0\n-1 0\n")
    code, out, _ = run(capsys, "compute", "rsat", "--entry", "issat", "--na", "unsat",
                       "--cnf", str(f), "--innermost")
    assert code == EXIT_OK
    assert out.strip().endswith("unsat reached")


def test_compute_errors(capsys):
    assert run(capsys, "compute", "rsat", "--entry", "nope", "--cnf", "1 0")[0] == EXIT_USAGE
    assert run(capsys, "compute", "rsat", "--entry", "issat")[0] == EXIT_USAGE


def test_rc(capsys):
    code, out, _ = run(capsys, "rc", "rg", "--size", "3")
    assert code == EXIT_OK
    assert [line.split("\t") for line in out.splitlines()] == [["1", "1"], ["2", "1"], ["3", "1"]]


def test_fuzz(capsys, monkeypatch):
    monkeypatch.setenv("SHAREGRAPH_SEED", "5")
    code, out, _ = run(capsys, "fuzz", "--count", "5", "--depth", "2")
    assert code == EXIT_OK and out.strip().endswith("seed 5: 5/5 instances passed")


def test_show(capsys, tmp_path):
    code, out, _ = run(capsys, "show", "rg", "--dot", str(tmp_path))
    assert code == EXIT_OK
    assert out.splitlines()[0] == "0: dup(x) -> c(x,x)"
    assert len(list(tmp_path.glob("rule*.dot"))) == 2


def test_load_trs_and_config():
    assert len(load_trs("rsat").rules) == 19
    assert len(load_trs("rsat.trs").rules) == 19
    with pytest.raises(ValueError):
        RunConfig("normalize", fuel=-1)
