"""Derivations over term graphs: strategies, exhaustive search, adequacy checks and bound audits."""

from __future__ import annotations

import enum
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Callable

from .graph import (
    TermGraph, all_positions, canonical_positions, mk_tree, read_term, term_size,
)
from .grs import Grs, Step, all_full_reducts, compile_trs, full_step, redex_nodes
from .oracle import term_reducts
from .sharing import sharing_key
from .terms import Position, Term, Trs

log = logging.getLogger(__name__)


class Strategy(enum.Enum):
    LEFTMOST_INNERMOST = "li"
    LEFTMOST_OUTERMOST = "lo"
    FIRST_FOUND = "ff"
    EXHAUSTIVE = "all"

    @classmethod
    def parse(cls, s: str | "Strategy") -> "Strategy":
        if isinstance(s, Strategy):
            return s
        aliases = {"leftmost-innermost": "li", "leftmost-outermost": "lo",
                   "first-found": "ff", "exhaustive": "all"}
        return cls(aliases.get(s, s))


# -- bound audit ---------------------------------------------------------------

@dataclass(frozen=True)
class Verdict:
    check: str
    step: int | None  # None for whole-derivation checks
    ok: bool
    value: int
    bound: int

    def __str__(self):
        where = "derivation" if self.step is None else f"step {self.step}"
        rel = "<=" if self.ok else ">"
        return f"{where}: {self.check}: {self.value} {rel} {self.bound}"


@dataclass
class StepRecord:
    pos: Position
    rule: int
    copies: int
    collapses: int
    size_before: int
    depth_before: int
    size_unfolded: int
    redex_size: int
    size_folded: int
    size_after: int
    depth_after: int
    rsize_after: int
    bounds_ok: bool = True

    @classmethod
    def from_step(cls, st: Step, delta: int) -> "StepRecord":
        T = st.graph
        rec = cls(st.position, st.rule_index, st.copies, st.collapses, st.size_before,
                  st.depth_before, st.size_unfolded, st.redex_size, st.size_folded,
                  len(T), T.depth, T.rsize)
        rec.bounds_ok = all(v.ok for v in step_verdicts(rec, delta, 0))
        return rec

    def to_json(self) -> dict:
        return {
            "pos": list(self.pos), "rule": self.rule, "copies": self.copies,
            "collapses": self.collapses, "size_before": self.size_before,
            "size_after": self.size_after, "depth_after": self.depth_after,
            "rsize_after": self.rsize_after, "bounds_ok": self.bounds_ok,
            "depth_before": self.depth_before, "size_unfolded": self.size_unfolded,
            "redex_size": self.redex_size, "size_folded": self.size_folded,
        }

    @classmethod
    def from_json(cls, d: dict) -> "StepRecord":
        return cls(tuple(d["pos"]), d["rule"], d["copies"], d["collapses"],
                   d["size_before"], d["depth_before"], d["size_unfolded"],
                   d["redex_size"], d["size_folded"], d["size_after"],
                   d["depth_after"], d["rsize_after"], d["bounds_ok"])


def step_verdicts(rec: StepRecord, delta: int, index: int) -> list[Verdict]:
    plen = len(rec.pos)
    return [
        Verdict("copies <= |p|", index, rec.copies <= plen, rec.copies, plen),
        Verdict("|U| <= |S| + |p|", index, rec.size_unfolded <= rec.size_before + plen,
                rec.size_unfolded, rec.size_before + plen),
        Verdict("collapses <= |U@p|", index, rec.collapses <= rec.redex_size,
                rec.collapses, rec.redex_size),
        Verdict("|V| <= |U|", index, rec.size_folded <= rec.size_unfolded,
                rec.size_folded, rec.size_unfolded),
        Verdict("|T| <= |V| + Delta", index, rec.size_after <= rec.size_folded + delta,
                rec.size_after, rec.size_folded + delta),
        Verdict("|T| <= |S| + depth(S) + Delta", index,
                rec.size_after <= rec.size_before + rec.depth_before + delta,
                rec.size_after, rec.size_before + rec.depth_before + delta),
        Verdict("depth(T) <= depth(S) + Delta", index,
                rec.depth_after <= rec.depth_before + delta,
                rec.depth_after, rec.depth_before + delta),
    ]


def space_bound(initial_size: int, steps: int, delta: int) -> int:
    return (steps + 1) * initial_size + steps * steps * delta


@dataclass
class DerivationTrace:
    initial: TermGraph
    steps: list[StepRecord]
    final: TermGraph
    normal_form: bool
    delta: int
    graphs: list[TermGraph] = field(default_factory=list, repr=False)

    @property
    def length(self) -> int:
        return len(self.steps)

    @property
    def exhausted(self) -> bool:
        return not self.normal_form

    @property
    def max_size(self) -> int:
        return max([len(self.initial)] + [s.size_after for s in self.steps])

    def to_json(self) -> dict:
        return {
            "initial": self.initial.to_json(),
            "steps": [s.to_json() for s in self.steps],
            "final": self.final.to_json(),
            "normal_form": self.normal_form,
            "delta": self.delta,
        }

    @classmethod
    def from_json(cls, d: dict) -> "DerivationTrace":
        return cls(TermGraph.from_json(d["initial"]),
                   [StepRecord.from_json(s) for s in d["steps"]],
                   TermGraph.from_json(d["final"]), d["normal_form"], d.get("delta", 0))


TRACE_SCHEMA = {
    "type": "object",
    "required": ["initial", "steps", "final", "normal_form"],
    "properties": {
        "initial": {"$ref": "#/$defs/graph"},
        "final": {"$ref": "#/$defs/graph"},
        "normal_form": {"type": "boolean"},
        "delta": {"type": "integer", "minimum": 0},
        "steps": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["pos", "rule", "copies", "collapses", "size_before",
                             "size_after", "depth_after", "rsize_after", "bounds_ok"],
                "properties": {
                    "pos": {"type": "array", "items": {"type": "integer", "minimum": 1}},
                    "rule": {"type": "integer", "minimum": 0},
                    "copies": {"type": "integer", "minimum": 0},
                    "collapses": {"type": "integer", "minimum": 0},
                    "size_before": {"type": "integer", "minimum": 1},
                    "size_after": {"type": "integer", "minimum": 1},
                    "depth_after": {"type": "integer", "minimum": 0},
                    "rsize_after": {"type": "integer", "minimum": 1},
                    "bounds_ok": {"type": "boolean"},
                },
            },
        },
    },
    "$defs": {
        "graph": {
            "type": "object",
            "required": ["root", "nodes"],
            "properties": {
                "root": {"type": "integer", "minimum": 1},
                "variables": {"type": "array", "items": {"type": "string"}},
                "nodes": {
                    "type": "array",
                    "items": {
                        "type": "array",
                        "prefixItems": [{"type": "integer", "minimum": 1},
                                        {"type": "string"},
                                        {"type": "array", "items": {"type": "integer"}}],
                        "minItems": 3, "maxItems": 3,
                    },
                },
            },
        },
    },
}


def audit_bounds(trace: DerivationTrace, delta: int | None = None) -> list[Verdict]:
    """Per-step size/depth/step-count checks plus the cumulative space bound."""
    delta = trace.delta if delta is None else delta
    out: list[Verdict] = []
    n0 = len(trace.initial)
    prev_size, prev_depth = n0, trace.initial.depth
    for k, rec in enumerate(trace.steps):
        out.extend(step_verdicts(rec, delta, k))
        out.append(Verdict("chained |S|", k, rec.size_before == prev_size,
                           rec.size_before, prev_size))
        out.append(Verdict("chained depth(S)", k, rec.depth_before == prev_depth,
                           rec.depth_before, prev_depth))
        bound = space_bound(n0, k + 1, delta)
        out.append(Verdict("|T_l| <= (l+1)|T_0| + l^2 Delta", k, rec.size_after <= bound,
                           rec.size_after, bound))
        prev_size, prev_depth = rec.size_after, rec.depth_after
    if trace.steps:
        ok = len(trace.final) == trace.steps[-1].size_after
        out.append(Verdict("final graph matches last step", None, ok,
                           len(trace.final), trace.steps[-1].size_after))
    return out


# -- deterministic normalisation ----------------------------------------------

def _contains_redex(S: TermGraph, redexes: dict[int, list[int]]) -> dict[int, bool]:
    out: dict[int, bool] = {}
    for u in reversed(S.topological_order()):
        out[u] = u in redexes or any(out[v] for v in S.succ(u))
    return out


def select_redex(G: Grs, S: TermGraph, strategy: Strategy) -> tuple[Position, int] | None:
    """Position and rule index of the next step under ``strategy``, or None in normal form."""
    redexes = redex_nodes(G, S)
    if not redexes:
        return None
    if strategy is Strategy.FIRST_FOUND:
        u = min(redexes)
        return canonical_positions(S)[u], redexes[u][0]
    contains = _contains_redex(S, redexes)
    u, p = S.root, ()
    while True:
        if strategy is Strategy.LEFTMOST_OUTERMOST and u in redexes:
            break
        for i, v in enumerate(S.succ(u), 1):
            if contains[v]:
                u, p = v, p + (i,)
                break
        else:
            break
    return p, redexes[u][0]


def normalize(G: Grs, S: TermGraph, strategy: Strategy | str = Strategy.LEFTMOST_INNERMOST,
              fuel: int = 10_000, *, keep_graphs: bool = False,
              fold: bool = True, unfold: bool = True) -> DerivationTrace:
    """Rewrite ``S`` with full steps chosen by ``strategy`` until a normal form or ``fuel`` runs out."""
    strategy = Strategy.parse(strategy)
    if strategy is Strategy.EXHAUSTIVE:
        raise ValueError("the exhaustive strategy has no single trace; use all_normal_forms")
    steps: list[StepRecord] = []
    graphs = [S] if keep_graphs else []
    cur = S
    while True:
        if fold and unfold:
            choice = select_redex(G, cur, strategy)
            st = None if choice is None else full_step(
                cur, choice[0], G.rules[choice[1]], choice[1])
        else:
            # with a phase disabled the term-level redex test is no longer exact
            st = next(all_full_reducts(G, cur, fold=fold, unfold=unfold), None)
            choice = st
        if choice is None or st is None:
            return DerivationTrace(S, steps, cur, True, G.delta, graphs)
        if len(steps) >= fuel:
            return DerivationTrace(S, steps, cur, False, G.delta, graphs)
        steps.append(StepRecord.from_step(st, G.delta))
        cur = st.graph
        if keep_graphs:
            graphs.append(cur)


# -- nondeterministic normalisation -------------------------------------------

@dataclass
class Exploration:
    normal_forms: dict[Term, TermGraph]
    complete: bool
    states: int
    depth: int
    violations: list[Verdict] = field(default_factory=list)
    max_size: int = 0

    @property
    def terms(self) -> set[Term]:
        return set(self.normal_forms)


def all_normal_forms(G: Grs, S: TermGraph, fuel: int = 1_000,
                     width: int = 200_000, *, innermost: bool = False,
                     max_term_size: int | None = None) -> Exploration:
    """Breadth-first search over all full steps at all positions.

    States are identified by the term they represent (the canonical form of
    their maximal sharing); the reducts of a graph depend only on that term.
    ``fuel`` bounds the derivation length explored, ``width`` the number of
    distinct states.  ``innermost`` restricts steps to redexes without a
    proper subterm that is a redex.  States representing terms larger than
    ``max_term_size`` are not expanded (their positions are enumerated one
    by one, so the cost follows the term, not the graph).
    """
    n0 = len(S)
    seen = {sharing_key(S)}
    frontier = [S]
    nfs: dict[Term, TermGraph] = {}
    violations: list[Verdict] = []
    level = 0
    max_size = n0
    complete = True
    while frontier:
        if level >= fuel:
            complete = False
            break
        nxt = []
        for cur in frontier:
            if max_term_size is not None and term_size(cur) > max_term_size:
                complete = False
                continue
            found = False
            for st in all_full_reducts(G, cur, all_positions=True, innermost=innermost):
                found = True
                T = st.graph
                rec = StepRecord.from_step(st, G.delta)
                if not rec.bounds_ok:
                    violations.extend(v for v in step_verdicts(rec, G.delta, level) if not v.ok)
                bound = space_bound(n0, level + 1, G.delta)
                if len(T) > bound:
                    violations.append(Verdict("|T_l| <= (l+1)|T_0| + l^2 Delta", level,
                                              False, len(T), bound))
                max_size = max(max_size, len(T))
                key = sharing_key(T)
                if key not in seen:
                    seen.add(key)
                    nxt.append(T)
            if not found:
                nfs.setdefault(read_term(cur), cur)
            if len(seen) > width:
                complete = False
                nxt = []
                break
        frontier = nxt
        level += 1
    if not complete:
        log.warning("exploration stopped early after %d states at depth %d", len(seen), level)
    return Exploration(nfs, complete, len(seen), level, violations, max_size)


# -- adequacy ----------------------------------------------------------------

@dataclass
class Counterexample:
    graph: TermGraph
    term: Term
    position: Position
    expected: set[tuple[int, Term]]
    got: set[tuple[int, Term]]

    def __str__(self):
        fmt = lambda s: "{" + ", ".join(f"rule {i}: {t}" for i, t in sorted(s, key=str)) + "}"
        return (f"at {list(self.position)} in {self.term} ({self.graph.dump()}): "
                f"term rewriting gives {fmt(self.expected)}, graph rewriting gives {fmt(self.got)}")


@dataclass
class AdequacyReport:
    graphs: int = 0
    positions: int = 0
    steps: int = 0
    counterexamples: list[Counterexample] = field(default_factory=list)
    violations: list[Verdict] = field(default_factory=list)
    truncated: bool = False

    @property
    def passed(self) -> bool:
        return not self.counterexamples

    def summary(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        extra = " (truncated)" if self.truncated else ""
        return (f"{verdict}: {self.graphs} graphs, {self.positions} positions, "
                f"{self.steps} steps checked{extra}; {len(self.counterexamples)} counterexamples, "
                f"{len(self.violations)} bound violations")


StepFn = Callable[..., "Step | None"]


def adequacy_check(trs: Trs, s: Term, depth: int = 3, *, max_graphs: int = 5_000,
                   max_term_size: int = 2_000, unfold: bool = True, fold: bool = True,
                   grs: Grs | None = None) -> AdequacyReport:
    """Compare one-step reducts position by position along a graph BFS from ``Tree(s)``.

    At every visited graph and every position of the represented term, the
    pairs (rule, reduct) produced by term rewriting must equal those produced
    by full graph steps (read back).  Graphs are identified up to
    isomorphism only, so different sharing of the same term is explored
    separately.  Graphs whose term is larger than ``max_term_size`` are
    skipped and the report marked truncated.  ``unfold``/``fold`` switch
    phases off to demonstrate failures.
    """
    G = grs or compile_trs(trs)
    report = AdequacyReport()
    S0 = mk_tree(s)
    n0 = len(S0)
    seen = {S0.canonical()}
    frontier = [S0]
    for level in range(depth + 1):
        nxt = []
        for S in frontier:
            if term_size(S) > max_term_size:
                report.truncated = True
                continue
            report.graphs += 1
            t = read_term(S)
            expected: dict[Position, set] = defaultdict(set)
            for p, i, r in term_reducts(trs, t):
                expected[p].add((i, r))
            for p, _ in all_positions(S):
                report.positions += 1
                got = set()
                for i, rule in enumerate(G.rules):
                    st = full_step(S, p, rule, i, unfold=unfold, fold=fold)
                    if st is None:
                        continue
                    report.steps += 1
                    got.add((i, read_term(st.graph)))
                    rec = StepRecord.from_step(st, G.delta)
                    if not rec.bounds_ok:
                        report.violations.extend(
                            v for v in step_verdicts(rec, G.delta, level) if not v.ok)
                    bound = space_bound(n0, level + 1, G.delta)
                    if len(st.graph) > bound:
                        report.violations.append(Verdict(
                            "|T_l| <= (l+1)|T_0| + l^2 Delta", level, False, len(st.graph), bound))
                    key = st.graph.canonical()
                    if level < depth and key not in seen:
                        if len(seen) >= max_graphs:
                            report.truncated = True
                        else:
                            seen.add(key)
                            nxt.append(st.graph)
                if got != expected.get(p, set()):
                    report.counterexamples.append(
                        Counterexample(S, t, p, expected.get(p, set()), got))
        frontier = nxt
    return report
