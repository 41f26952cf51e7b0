"""Acceptance criteria 1-9, one test each.

Every test records a ``CRITERION n: PASS|FAIL ...`` line, printed in the
terminal summary.  Run as a script to print the lines without pytest.
"""

import functools
import logging
import math
import random
import time

import pytest

from sharegraph import load_example
from sharegraph.computation import (
    brute_force_sat, compute, decode_assignment, encode_cnf, enumerate_cnfs, is_accepting_graph,
    load_rsat, satisfies,
)
from sharegraph.engine import Strategy, adequacy_check, audit_bounds, normalize, select_redex
from sharegraph.gen import random_graph, random_instances, random_term, seed_from_env
from sharegraph.graph import (
    find_morphism, graph, induced_substitution, is_isomorphic, mk_shared, mk_tree, node_at,
    read_term,
)
from sharegraph.grs import compile_trs, full_step, redex_nodes
from sharegraph.parser import parse_term
from sharegraph.sharing import (
    collapse_candidates, copy_candidates, fold_below, joins_in_one_step, peaks, unfold_above,
)
from sharegraph.terms import App, Trs, apply_subst, size, variables

try:
    from conftest import ACCEPTANCE
except ImportError:  # run as a script
    ACCEPTANCE = {}

SEED = seed_from_env(2024)


def report(n: int, ok: bool, detail: str) -> None:
    line = f"CRITERION {n}: {'PASS' if ok else 'FAIL'} {detail}"
    ACCEPTANCE[n] = line
    print(line)


# -- shared derivations (criteria 1-3 feed criterion 4) ------------------------

@functools.cache
def criterion1_traces():
    rf = load_example("rf")
    G = compile_trs(rf)
    t = parse_term("f(a)", trs=rf)
    full = normalize(G, mk_tree(t), Strategy.LEFTMOST_INNERMOST, keep_graphs=True)
    stuck = normalize(G, mk_tree(t), Strategy.LEFTMOST_INNERMOST, keep_graphs=True, fold=False)
    return full, stuck


ADEQUACY_STARTS = {
    "rf": ["f(a)", "f(f(a))", "eq(f(a),f(a))", "eq(a,f(a))"],
    "rg": ["dup(a)", "dup(dup(a))", "c(dup(a),a)", "dup(c(a,a))"],
}
FRAGMENT_STARTS = [
    "neg(O(Z(eps)))",
    "eq(O(Z(eps)),O(Z(eps)))",
    "eq(Z(O(eps)),Z(Z(eps)))",
    "verify(cons(O(eps),cons(Z(eps),nil)))",
    "verify(cons(neg(Z(eps)),nil))",
    "eq(neg(O(eps)),neg(O(eps)))",
]
N_RANDOM = 200
DEPTH = 4


@functools.cache
def criterion3_reports():
    reports = []
    for name, starts in ADEQUACY_STARTS.items():
        trs = load_example(name)
        for s in starts:
            reports.append((f"{name}:{s}", adequacy_check(trs, parse_term(s, trs=trs), DEPTH)))
    frag = Trs(load_example("rsat").rules[8:17])  # rules 9-17, 1-based
    for s in FRAGMENT_STARTS:
        reports.append((f"fragment:{s}",
                        adequacy_check(frag, parse_term(s, trs=frag), DEPTH, max_graphs=2_000)))
    for k, ins in enumerate(random_instances(SEED, N_RANDOM, max_rules=4, max_rhs=6, max_term=7)):
        reports.append((f"random#{k}", adequacy_check(ins.trs, ins.term, DEPTH, max_graphs=400)))
    return reports


# -- criteria -------------------------------------------------------------------

def test_criterion_1_example_derivation():
    t0 = time.perf_counter()
    full, stuck = criterion1_traces()
    T = full.graphs
    ok = (full.normal_form and full.length == 2 and str(read_term(full.final)) == "⊤"
          and len(full.final) == 1)
    # the second step folds eq(a,a) into one shared a node before rewriting
    shared_eq = graph({1: ("eq", [2, 2]), 2: ("a", [])})
    folded = fold_below(unfold_above(T[1], full.steps[1].pos)[0], full.steps[1].pos)[0]
    ok = ok and is_isomorphic(folded, shared_eq) and full.steps[1].collapses == 1
    unshared_eq = graph({1: ("eq", [2, 3]), 2: ("a", []), 3: ("a", [])})
    ok = ok and stuck.normal_form and stuck.length == 1 and is_isomorphic(stuck.final, unshared_eq)
    dt = time.perf_counter() - t0
    ok = ok and dt < 1.0
    report(1, ok, f"f(a) -> {read_term(full.final)} in {full.length} steps, folded {folded.dump()}; "
                  f"without folding stuck at {stuck.final.dump()} ({dt:.3f}s)")
    assert ok


def test_criterion_2_fold_unfold_figures():
    t0 = time.perf_counter()
    T1 = graph({1: ("*", [3, 3]), 3: ("+", [4, 5]), 4: ("0", []), 5: ("0", [])})
    T2 = graph({1: ("*", [2, 3]), 2: ("+", [4, 5]), 3: ("+", [4, 5]), 4: ("0", []), 5: ("0", [])})
    T3 = graph({1: ("*", [2, 3]), 2: ("+", [5, 5]), 3: ("+", [5, 5]), 5: ("0", [])})
    U, _ = unfold_above(T1, (2,))
    V, _ = fold_below(T2, (2,))
    dt = time.perf_counter() - t0
    ok = is_isomorphic(U, T2) and is_isomorphic(V, T3) and dt < 1.0
    report(2, ok, f"unfold_above(T1,[2]) = {U.dump()}; fold_below(T2,[2]) = {V.dump()} ({dt:.3f}s)")
    assert ok


def test_criterion_3_adequacy_suite():
    t0 = time.perf_counter()
    reports = criterion3_reports()
    dt = time.perf_counter() - t0
    bad = [(name, r) for name, r in reports if not r.passed]
    truncated = sum(r.truncated for _, r in reports)
    steps = sum(r.steps for _, r in reports)
    positions = sum(r.positions for _, r in reports)
    ok = not bad and dt < 120
    detail = (f"{len(reports)} systems/start terms ({N_RANDOM} random, seed {SEED}), depth {DEPTH}: "
              f"{positions} positions, {steps} graph steps, {len(bad)} mismatches, "
              f"{truncated} truncated explorations ({dt:.1f}s)")
    if bad:
        detail += f"; first: {bad[0][0]}: {bad[0][1].counterexamples[0]}"
    report(3, ok, detail)
    assert ok


def test_criterion_4_bound_audit():
    full, stuck = criterion1_traces()
    verdicts = audit_bounds(full) + audit_bounds(stuck)
    failed = [v for v in verdicts if not v.ok]
    reports = criterion3_reports()
    adequacy_violations = [v for _, r in reports for v in r.violations]
    checked = len(verdicts) + sum(r.steps for _, r in reports)
    ok = not failed and not adequacy_violations
    detail = (f"{checked} steps audited (per-step size, depth, copies, collapses and cumulative "
              f"space), {len(failed) + len(adequacy_violations)} violations")
    if not ok:
        detail += f"; first: {(failed + adequacy_violations)[0]}"
    report(4, ok, detail)
    assert ok


def _subterms(t, acc):
    acc.add(t)
    if isinstance(t, App):
        for a in t.args:
            _subterms(a, acc)
    return acc


def test_criterion_5_maximal_sharing():
    t0 = time.perf_counter()
    rng = random.Random(SEED)
    bad = []
    n = 600
    for _ in range(n):
        t = random_term(rng, rng.randint(1, 12), var_names=("x", "y"), ground_bias=0.7)
        M = mk_shared(t)
        F = fold_below(mk_tree(t), ())[0]
        if not is_isomorphic(F, M) or len(M) != len(_subterms(t, set())) or read_term(M) != t:
            bad.append(t)
    dt = time.perf_counter() - t0
    ok = not bad and dt < 30
    report(5, ok, f"{n} random terms of size <= 12: {len(bad)} mismatches ({dt:.2f}s)"
                  + (f"; first: {bad[0]}" if bad else ""))
    assert ok


def test_criterion_6_diamond():
    """Collapse/collapse peaks join by collapses; every peak of
    collapse and copy steps joins with one step of either kind.  Copy/copy peaks
    joined by copies alone are counted but not claimed."""
    t0 = time.perf_counter()
    rng = random.Random(SEED)
    graphs_checked = peaks_checked = copy_only_failures = 0
    bad = []
    while graphs_checked < 500:
        S = random_graph(rng, size=rng.randint(5, 12), moves=rng.randint(1, 8))
        if len(collapse_candidates(S)) + len(copy_candidates(S)) < 2:
            continue
        graphs_checked += 1
        for T1, T2 in peaks(S, "collapse"):
            peaks_checked += 1
            if not joins_in_one_step(T1, T2, "collapse"):
                bad.append(("collapse", S.dump()))
        for T1, T2 in peaks(S, "any"):
            peaks_checked += 1
            if not joins_in_one_step(T1, T2, "any"):
                bad.append(("any", S.dump()))
        for T1, T2 in peaks(S, "copy"):
            copy_only_failures += not joins_in_one_step(T1, T2, "copy")
    dt = time.perf_counter() - t0
    ok = not bad
    report(6, ok, f"{graphs_checked} random graphs, {peaks_checked} peaks, {len(bad)} not "
                  f"joinable in one step ({dt:.1f}s); copy/copy peaks without a copy-only "
                  f"join: {copy_only_failures} (not claimed)"
                  + (f"; first: {bad[0]}" if bad else ""))
    assert ok


def lo_witness(cnf):
    """Leftmost-outermost derivation taking the second choice rule once, then the first."""
    spec = load_rsat()
    G = compile_trs(spec.trs)
    S = mk_tree(App(spec.entry, (encode_cnf(cnf),)))
    steps, first = 0, True
    while (c := select_redex(G, S, Strategy.LEFTMOST_OUTERMOST)) is not None:
        p, i = c
        if first and 3 in redex_nodes(G, S)[node_at(S, p)]:
            i, first = 3, False
        S = full_step(S, p, G.rules[i], i).graph
        steps += 1
    return steps, S, spec


CRITERION7_BUDGET = 300.0
CRITERION7_WIDTH = 3_000


def test_criterion_7_fsat_end_to_end(caplog):
    caplog.set_level(logging.ERROR, logger="sharegraph.engine")  # one warning per capped formula
    t0 = time.perf_counter()
    spec = load_rsat(fuel=1_000, width=CRITERION7_WIDTH)
    formulas = list(enumerate_cnfs(3, 3))
    complete = unsound = incomplete_answers = skipped = 0
    for n, cnf in formulas:
        if time.perf_counter() - t0 > CRITERION7_BUDGET:
            skipped += 1
            continue
        res = compute(spec, encode_cnf(cnf, n))
        sat = bool(brute_force_sat(cnf, n))
        if any(not satisfies(decode_assignment(t), cnf) for t in res.accepted):
            unsound += 1
        if res.complete:
            complete += 1
            if bool(res.accepted) != sat:
                incomplete_answers += 1
    dt = time.perf_counter() - t0
    wsteps, wS, _ = lo_witness([[1, 2], [-1]])
    wt = read_term(wS)
    witness_bad = is_accepting_graph(wS, spec.na) and not satisfies(decode_assignment(wt),
                                                                    [[1, 2], [-1]])
    ok = (complete == len(formulas) and unsound == 0 and incomplete_answers == 0
          and not witness_bad and dt < CRITERION7_BUDGET)
    report(7, ok, f"{len(formulas)} formulas: {complete} explored exhaustively within "
                  f"{CRITERION7_WIDTH} states, {skipped} not started, {unsound} with an "
                  f"unsatisfying answer, {incomplete_answers} wrong emptiness ({dt:.0f}s); "
                  f"[[1,2],[-1]] reaches accepted {wt} in {wsteps} steps"
                  + (" (does not satisfy the formula)" if witness_bad else ""))
    assert ok


def test_criterion_8_matching():
    rng = random.Random(SEED)
    checked = 0
    bad = []
    for name in ("rf", "rg", "rsat", "mult"):
        trs = load_example(name)
        sig = tuple(sorted(trs.signature, key=lambda f: (f.arity, f.name)))
        for rule in trs.rules:
            L = mk_tree(rule.lhs)
            vs = sorted(variables(rule.lhs))
            for _ in range(100):
                pool = [random_term(rng, rng.randint(1, 6), sig, ground_bias=1.0)
                        for _ in range(2)]
                # draw from a small pool so that distinct variables sometimes get equal terms
                sigma = {x: rng.choice(pool) for x in vs}
                S = mk_shared(apply_subst(rule.lhs, sigma))
                m = find_morphism(L, S)
                checked += 1
                if m is None or induced_substitution(m, L, S) != sigma:
                    bad.append((name, str(rule), sigma))
    ok = not bad
    report(8, ok, f"{checked} rule/substitution pairs over rf, rg, rsat, mult: "
                  f"{len(bad)} failures" + (f"; first: {bad[0]}" if bad else ""))
    assert ok


def _slope(xs, ys):
    lx, ly = [math.log(x) for x in xs], [math.log(y) for y in ys]
    mx, my = sum(lx) / len(lx), sum(ly) / len(ly)
    num = sum((a - mx) * (b - my) for a, b in zip(lx, ly))
    den = sum((a - mx) ** 2 for a in lx)
    return num / den


def test_criterion_9_scaling():
    spec = load_rsat()
    G = compile_trs(spec.trs)
    rng = random.Random(SEED)
    rows = []
    violations = 0
    for n in range(1, 13):
        cnf = [[rng.choice([1, -1]) * rng.randint(1, n) for _ in range(3)] for _ in range(n)]
        S0 = mk_tree(App(spec.entry, (encode_cnf(cnf, n),)))
        tr = normalize(G, S0, Strategy.LEFTMOST_INNERMOST, fuel=100_000)
        envelope = (tr.length + 1) * len(S0) + tr.length ** 2 * G.delta
        violations += tr.max_size > envelope
        violations += sum(not v.ok for v in audit_bounds(tr))
        rows.append((len(S0), tr.length, tr.max_size, envelope, size(read_term(tr.final))))
    slope_steps = _slope([r[0] for r in rows], [r[1] for r in rows])
    slope_space = _slope([r[0] for r in rows], [r[2] for r in rows])
    for r in rows:
        print(f"  |S0|={r[0]:4d} steps={r[1]:6d} max|S|={r[2]:5d} envelope={r[3]:10d}")
    ok = violations == 0
    report(9, ok, f"{len(rows)} rsat instances, |S0| {rows[0][0]}..{rows[-1][0]}: "
                  f"{violations} envelope violations; log-log slope steps {slope_steps:.2f}, "
                  f"max|S| {slope_space:.2f}")
    assert ok


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q"]))
