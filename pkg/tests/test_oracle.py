import pytest

from sharegraph.oracle import (
    HOLE, Context, EnumerationLimit, basic_terms, context_at, derivation_length, fill_context,
    normal_forms, reducts_at, runtime_complexity, term_reducts,
)
from sharegraph.parser import parse_term, parse_trs
from sharegraph.terms import apply_subst, fn, match, replace_subterm, subterm_at


def test_rf_reducts(rf):
    assert term_reducts(rf, parse_term("f(a)", trs=rf)) == {((), 0, parse_term("eq(a,a)", trs=rf))}
    assert term_reducts(rf, parse_term("eq(a,a)", trs=rf)) == {((), 1, parse_term("⊤", trs=rf))}


def test_rg_reducts(rg):
    got = term_reducts(rg, parse_term("c(a,a)", trs=rg))
    assert got == {((1,), 1, parse_term("c(b,a)", trs=rg)), ((2,), 1, parse_term("c(a,b)", trs=rg))}
    assert reducts_at(rg, parse_term("c(a,a)", trs=rg), (2,)) == {parse_term("c(a,b)", trs=rg)}


def test_fill_context():
    assert fill_context(Context(fn("c", HOLE, fn("a"))), [fn("b")]) == fn("c", fn("b"), fn("a"))
    assert fill_context(Context(HOLE), [fn("t")]) == fn("t")
    assert fill_context(Context(fn("c", HOLE, HOLE)), [fn("a"), fn("b")]) == fn("c", fn("a"), fn("b"))
    with pytest.raises(ValueError):
        fill_context(Context(HOLE), [])


def test_context_at():
    t = fn("c", fn("a"), fn("b"))
    c = context_at(t, (2,))
    assert c.holes == [(2,)]
    assert c.fill([fn("b")]) == t


def test_derivation_lengths(rf, rg):
    assert derivation_length(rf, parse_term("f(a)", trs=rf)) == 2
    assert derivation_length(rf, parse_term("⊤", trs=rf)) == 0
    assert derivation_length(rg, parse_term("dup(a)", trs=rg)) == 3


def test_derivation_length_nonterminating():
    trs = parse_trs("(VAR x)(RULES f(x) -> f(g(x)))")
    assert derivation_length(trs, fn("f", fn("a")), fuel=50) is None
    loop = parse_trs("(VAR)(RULES a -> b b -> a)")
    assert derivation_length(loop, fn("a"), fuel=50) is None


def test_derivation_length_fuel_boundary():
    trs = parse_trs("(VAR x)(RULES f(s(x)) -> f(x))")
    t = fn("f", fn("s", fn("s", fn("s", fn("0")))))
    assert derivation_length(trs, t, fuel=3) == 3
    assert derivation_length(trs, t, fuel=2) is None


def test_runtime_complexity(rf, rg):
    assert runtime_complexity(rf, 2) == [(1, 0), (2, 2)]
    # a is defined in R_g, so dup(a) is not basic; the only basic terms of
    # size <= 2 are a, dup(x) and dup(b)
    assert runtime_complexity(rg, 2) == [(1, 1), (2, 1)]
    assert runtime_complexity(rf, 0) == []


def test_basic_terms_up_to_renaming(rg):
    got = {str(t) for t in basic_terms(rg, 2)}
    assert got == {"a", "dup(x1)", "dup(b)"}


def test_enumeration_cap(rsat):
    with pytest.raises(EnumerationLimit):
        basic_terms(rsat, 6, cap=100)


def test_normal_forms(rg):
    assert normal_forms(rg, parse_term("dup(a)", trs=rg)) == {parse_term("c(b,b)", trs=rg)}


def _independent_reducts(trs, s):
    # positions enumerated by explicit recursion, matching done per subterm
    out = set()

    def walk(t, p):
        for i, rule in enumerate(trs.rules):
            sigma = match(rule.lhs, t)
            if sigma is not None:
                out.add((p, i, replace_subterm(s, p, apply_subst(rule.rhs, sigma))))
        for k, a in enumerate(getattr(t, "args", ()), 1):
            walk(a, p + (k,))

    walk(s, ())
    return out


@pytest.mark.parametrize("name, term", [
    ("rg", "c(dup(a),dup(dup(a)))"), ("mult", "*(+(0,0),+(s(0),0))"),
    ("rsat", "verify(cons(O(eps),cons(neg(O(eps)),nil)))"),
])
def test_reducts_against_independent_matcher(name, term):
    from sharegraph import load_example
    trs = load_example(name)
    s = parse_term(term, trs=trs)
    assert term_reducts(trs, s) == _independent_reducts(trs, s)
    for p, i, t in term_reducts(trs, s):
        assert subterm_at(s, p) != subterm_at(t, p) or trs.rules[i].lhs == trs.rules[i].rhs


@pytest.mark.parametrize("term", ["f(a)", "eq(a,a)", "eq(a,⊤)", "a"])
def test_zero_length_iff_no_reducts(rf, term):
    s = parse_term(term, trs=rf)
    assert (derivation_length(rf, s) == 0) == (not term_reducts(rf, s))
