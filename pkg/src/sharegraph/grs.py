"""Graph rewrite rules and the unfold / fold / rewrite step.

A TRS rule ``l -> r`` compiles to a graph rule whose sides are trees that
share exactly their variable nodes.  The full step at a position first
unshares the path to the position, then maximally shares the subgraph
below it, and only then matches the left-hand side; this is what makes
graph rewriting simulate term rewriting for non-left-linear rules and
rules that duplicate arguments.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from .graph import (
    GraphError, Morphism, TermGraph, canonical_positions, match_at, mk_tree,
    node_at, positions_of, replace_at, subgraph_at, union,
)
from .sharing import FoldStep, fold_below, unfold_above
from .terms import FunSym, Position, Rule, Term, Trs, Var


@dataclass(frozen=True)
class GraphRule:
    lhs: TermGraph
    rhs: TermGraph
    rule: Rule | None = None

    def __post_init__(self):
        L, R = self.lhs, self.rhs
        if L.is_var_node(L.root):
            raise GraphError("left-hand side root is a variable node")
        if L.root in R:
            raise GraphError("left-hand side root occurs in the right-hand side")
        lvars = {u for u in L.nodes if L.is_var_node(u)}
        rvars = {u for u in R.nodes if R.is_var_node(u)}
        if not rvars <= lvars:
            raise GraphError("right-hand side has variable nodes not in the left-hand side")
        for u in set(L.nodes) & set(R.nodes):
            if L.label(u) != R.label(u) or L.succ(u) != R.succ(u):
                raise GraphError(f"rule sides disagree on shared node {u}")

    @property
    def nodes(self) -> set[int]:
        return set(self.lhs.nodes) | set(self.rhs.nodes)

    @property
    def root_symbol(self) -> FunSym:
        return self.lhs.label(self.lhs.root)

    def shifted(self, offset: int) -> "GraphRule":
        return GraphRule(_shift(self.lhs, offset), _shift(self.rhs, offset), self.rule)

    def to_dot(self, name: str = "rule") -> str:
        lines = [f"digraph {name} {{", "  node [shape=circle];"]
        for side, G in (("L", self.lhs), ("R", self.rhs)):
            lines.append(f"  subgraph cluster_{side} {{ label=\"{side}\";")
            for u, lab, s in G.specs():
                lines.append(f'    {u} [label="{lab.name}"];')
            lines.append("  }")
        edges = set()
        for G in (self.lhs, self.rhs):
            for u, _, s in G.specs():
                edges.update((u, v, i) for i, v in enumerate(s, 1))
        lines += [f'  {u} -> {v} [label="{i}"];' for u, v, i in sorted(edges)]
        lines.append("}")
        return "\n".join(lines) + "\n"

    def __str__(self):
        return str(self.rule) if self.rule is not None else f"{self.lhs.dump()} -> {self.rhs.dump()}"


def _shift(G: TermGraph, offset: int) -> TermGraph:
    return TermGraph({u + offset: G.label(u) for u in G.nodes},
                     {u + offset: [v + offset for v in G.succ(u)] for u in G.nodes},
                     G.root + offset, check=False)


@dataclass(frozen=True)
class Grs:
    rules: tuple[GraphRule, ...]
    delta: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))
        object.__setattr__(self, "delta", max((len(r.rhs) for r in self.rules), default=0))

    def __len__(self):
        return len(self.rules)

    def __iter__(self):
        return iter(self.rules)


def compile_rule(rule: Rule) -> GraphRule:
    """Tree-shaped sides; the right side reuses the left side's variable nodes."""
    L = mk_tree(rule.lhs)
    var_ids = L.variable_nodes()
    labels: dict[int, object] = {}
    succs: dict[int, tuple[int, ...]] = {}
    counter = [len(L) + 1]

    def go(t: Term) -> int:
        if isinstance(t, Var):
            u = var_ids[t.name]
            labels[u], succs[u] = t, ()
            return u
        u = counter[0]
        counter[0] += 1
        labels[u] = t.sym
        succs[u] = tuple(go(a) for a in t.args)
        return u

    root = go(rule.rhs)
    return GraphRule(L, TermGraph(labels, succs, root), rule)


def compile_trs(trs: Trs) -> Grs:
    return Grs(tuple(compile_rule(r) for r in trs.rules))


def rename_rule(rule: GraphRule, S: TermGraph) -> GraphRule:
    """Isomorphic copy of ``rule`` whose ids all lie above the ids of ``S``."""
    return rule.shifted(S.max_id)


def instantiate_rhs(S: TermGraph, rule: GraphRule, m: Morphism) -> TermGraph:
    """The graph at the root of ``m(R)`` inside ``S ∪ m(R)``.

    ``rule`` must already be renamed apart from ``S``.  Function nodes of the
    right-hand side keep their (fresh) ids; variable nodes are replaced by
    their images under ``m``.
    """
    R = rule.rhs
    f = {u: (m[u] if R.is_var_node(u) else u) for u in R.nodes}
    labels = {}
    succs = {}
    for u in R.nodes:
        if not R.is_var_node(u):
            labels[u] = R.label(u)
            succs[u] = tuple(f[v] for v in R.succ(u))
    root = f[R.root]
    if not labels:
        # collapsing rule (rhs is a variable): the instance is a subgraph of S
        return subgraph_at(S, root)
    H = TermGraph(labels, succs, root, check=False)
    return union(S, H, root)


def apply_rule_at(S: TermGraph, p: Position, rule: GraphRule) -> TermGraph | None:
    """Plain graph rewrite step at ``p``; None when the left-hand side does not match."""
    u = node_at(S, p)
    return apply_rule_at_node(S, u, rule)


def apply_rule_at_node(S: TermGraph, u: int, rule: GraphRule) -> TermGraph | None:
    if S.label(u) != rule.root_symbol:
        return None
    r = rename_rule(rule, S)
    m = match_at(r.lhs, S, u)
    if m is None:
        return None
    return replace_at(S, u, instantiate_rhs(S, r, m))


@dataclass
class Step:
    """Outcome and bookkeeping of one full step."""

    graph: TermGraph
    position: Position
    rule_index: int
    unfold: list[FoldStep]
    fold: list[FoldStep]
    size_before: int
    depth_before: int
    size_unfolded: int
    redex_size: int  # size of the subgraph at p right after unfolding
    size_folded: int

    @property
    def copies(self) -> int:
        return len(self.unfold)

    @property
    def collapses(self) -> int:
        return len(self.fold)


def full_step(S: TermGraph, p: Position, rule: GraphRule, rule_index: int = 0, *,
              unfold: bool = True, fold: bool = True) -> Step | None:
    """Unfold above ``p``, fold strictly below ``p``, then rewrite at ``p``.

    ``unfold`` / ``fold`` switch off the corresponding phase; they exist so
    that tests can reproduce what goes wrong without them.
    """
    u = node_at(S, p)
    if S.label(u) != rule.root_symbol:
        return None
    U, ufl = unfold_above(S, p) if unfold else (S, [])
    redex_size = len(U.reachable(node_at(U, p)))
    V, fl = fold_below(U, p) if fold else (U, [])
    T = apply_rule_at(V, p, rule)
    if T is None:
        return None
    return Step(T, p, rule_index, ufl, fl, len(S), S.depth, len(U), redex_size, len(V))


def redex_nodes(G: Grs, S: TermGraph) -> dict[int, list[int]]:
    """Nodes of ``S`` at which some full step succeeds, with the applicable rule indices.

    Whether a full step at ``p`` succeeds depends only on the term at ``p``,
    so it is decided once per node on the maximally shared version of ``S``.
    """
    M, steps = fold_below(S, ())
    rep = {s.node: s.target for s in steps}
    memo: dict[int, list[int]] = {}
    out = {}
    for u in S.nodes:
        r = rep.get(u, u)
        hits = memo.get(r)
        if hits is None:
            lab = M.label(r)
            hits = [i for i, rule in enumerate(G.rules)
                    if rule.root_symbol == lab and match_at(rule.lhs, M, r) is not None]
            memo[r] = hits
        if hits:
            out[u] = hits
    return out


def all_full_reducts(G: Grs, S: TermGraph, *, all_positions: bool = False,
                     unfold: bool = True, fold: bool = True,
                     innermost: bool = False) -> Iterator[Step]:
    """Every full step from ``S``.

    By default one position per node (its length-lexicographically least
    one) is used.  That finds every redex node but not every reduct: two
    positions of a shared node lead to different terms.  Pass
    ``all_positions=True`` for the complete reduct set.  ``innermost``
    keeps only redexes with no redex strictly below them.
    """
    canon = canonical_positions(S)
    redexes = redex_nodes(G, S)
    if innermost:
        redexes = {u: h for u, h in redexes.items()
                   if not any(v in redexes for v in S.reachable(u) if v != u)}
    for u, hits in sorted(redexes.items()):
        ps = sorted(positions_of(S, u), key=lambda q: (len(q), q)) if all_positions else [canon[u]]
        for p in ps:
            for i in hits:
                st = full_step(S, p, G.rules[i], i, unfold=unfold, fold=fold)
                if st is not None:
                    yield st
