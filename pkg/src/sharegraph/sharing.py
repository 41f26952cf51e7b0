"""Folding (collapsing equal nodes) and unfolding (copying shared nodes).

Both kinds of step preserve the represented term.  ``fold_below`` and
``unfold_above`` compute the normal forms of the position-restricted
relations used by the full rewrite step; they also report the individual
steps so that callers can audit step counts.
"""

from __future__ import annotations

import functools
from collections import defaultdict
from dataclasses import dataclass
from typing import Literal

from .graph import GraphError, TermGraph, node_at, redirect
from .terms import Position, Var


@dataclass(frozen=True)
class FoldStep:
    """One collapse (``node`` merged onto ``target``) or copy (``node`` copied to fresh ``target``)."""

    kind: Literal["collapse", "copy"]
    node: int
    target: int
    edge: tuple[int, int] | None = None

    def to_json(self) -> dict:
        d = {"kind": self.kind, "node": self.node, "target": self.target}
        if self.edge is not None:
            d["edge"] = list(self.edge)
        return d


def collapse_step(S: TermGraph, u: int, v: int) -> TermGraph:
    """Merge ``u`` onto ``v``; requires ``u > v`` with equal label and successors."""
    if u not in S or v not in S:
        raise GraphError(f"unknown node in collapse {u} -> {v}")
    if u <= v:
        raise GraphError(f"collapse must go from a larger id onto a smaller one, got {u} -> {v}")
    if S.label(u) != S.label(v) or S.succ(u) != S.succ(v):
        raise GraphError(f"nodes {u} and {v} differ in label or successors")
    labels, succs = redirect(S, u, v)
    return TermGraph(labels, succs, v if S.root == u else S.root, check=False)


def copy_step(S: TermGraph, v: int, edge: tuple[int, int]) -> tuple[TermGraph, int]:
    """Give the edge ``(w, i)`` into ``v`` its own fresh copy of ``v``.

    ``v`` must have at least one other incoming edge, otherwise the original
    would become garbage and the step would not be the inverse of a collapse.
    Returns the new graph and the fresh node.
    """
    w, i = edge
    if w not in S or not 1 <= i <= len(S.succ(w)) or S.succ(w)[i - 1] != v:
        raise GraphError(f"{edge} is not an edge into node {v}")
    if S.is_var_node(v):
        raise GraphError(f"variable node {v} cannot be copied")
    if len(S.in_edges()[v]) < 2:
        raise GraphError(f"node {v} has a single incoming edge; copying would orphan it")
    fresh = S.max_id + 1
    labels = dict(S._label)
    succs = dict(S._succ)
    labels[fresh], succs[fresh] = labels[v], succs[v]
    s = list(succs[w])
    s[i - 1] = fresh
    succs[w] = tuple(s)
    return TermGraph(labels, succs, S.root, check=False), fresh


def unfold_above(S: TermGraph, p: Position) -> tuple[TermGraph, list[FoldStep]]:
    """Copy shared nodes along the path to ``p`` until every node on it is unshared.

    Walks the path from the root; the current node is always unshared, so
    its ``i``-th successor is shared exactly when it has another incoming
    edge.  Variable nodes are never copied (they must stay unique).
    """
    node_at(S, p)  # validates p
    labels = dict(S._label)
    succs = dict(S._succ)
    indeg: dict[int, int] = defaultdict(int)
    for s in succs.values():
        for x in s:
            indeg[x] += 1
    steps: list[FoldStep] = []
    fresh = S.max_id
    v = S.root
    for i in p:
        vi = succs[v][i - 1]
        if indeg[vi] >= 2 and not isinstance(labels[vi], Var):
            fresh += 1
            labels[fresh], succs[fresh] = labels[vi], succs[vi]
            s = list(succs[v])
            s[i - 1] = fresh
            succs[v] = tuple(s)
            indeg[vi] -= 1
            indeg[fresh] = 1
            for c in succs[vi]:
                indeg[c] += 1
            steps.append(FoldStep("copy", vi, fresh, (v, i)))
            vi = fresh
        v = vi
    if not steps:
        return S, steps
    return TermGraph(labels, succs, S.root, check=False), steps


def _strictly_below(S: TermGraph, p: Position) -> set[int]:
    w = node_at(S, p)
    return S.reachable(w) - {w}


def fold_candidates(S: TermGraph, p: Position = ()) -> set[tuple[int, int]]:
    """All legal collapse pairs ``(u, v)``, ``u > v``, strictly below ``p``."""
    below = sorted(_strictly_below(S, p))
    groups: dict[tuple, list[int]] = defaultdict(list)
    for u in below:
        groups[(S.label(u), S.succ(u))].append(u)
    return {(u, v) for g in groups.values() for v in g for u in g if u > v}


def fold_below(S: TermGraph, p: Position = ()) -> tuple[TermGraph, list[FoldStep]]:
    """Collapse strictly below ``p`` until the subgraph at ``p`` is maximally shared.

    Bottom-up by node height: within one height, nodes with equal label and
    (already merged) successors form a class that is collapsed onto its
    smallest member.  Heights do not change under collapsing, so one pass
    suffices.
    """
    below = _strictly_below(S, p)
    heights = S.heights()
    labels = dict(S._label)
    succs = dict(S._succ)
    parents: dict[int, set[int]] = defaultdict(set)
    for u, s in succs.items():
        for x in s:
            parents[x].add(u)
    by_height: dict[int, list[int]] = defaultdict(list)
    for u in below:
        by_height[heights[u]].append(u)
    steps: list[FoldStep] = []
    for h in sorted(by_height):
        classes: dict[tuple, list[int]] = defaultdict(list)
        for u in sorted(by_height[h]):
            classes[(labels[u], succs[u])].append(u)
        for members in classes.values():
            keep = members[0]
            for x in reversed(members[1:]):
                for q in parents.pop(x, ()):
                    succs[q] = tuple(keep if y == x else y for y in succs[q])
                    parents[keep].add(q)
                for c in set(succs[x]):
                    parents[c].discard(x)
                del labels[x], succs[x]
                steps.append(FoldStep("collapse", x, keep))
    if not steps:
        return S, steps
    return TermGraph(labels, succs, S.root, check=False), steps


def maximally_shared(S: TermGraph) -> TermGraph:
    return fold_below(S, ())[0]


def sharing_key(S: TermGraph) -> tuple:
    """Key identifying the represented term: canonical form of the maximal sharing."""
    return maximally_shared(S).canonical()


def collapse_candidates(S: TermGraph) -> set[tuple[int, int]]:
    """All collapse steps applicable anywhere in ``S``."""
    groups: dict[tuple, list[int]] = defaultdict(list)
    for u in S.nodes:
        groups[(S.label(u), S.succ(u))].append(u)
    return {(u, v) for g in groups.values() for v in g for u in g if u > v}


def copy_candidates(S: TermGraph) -> list[tuple[int, tuple[int, int]]]:
    """All copy steps applicable anywhere in ``S`` as ``(node, edge)``."""
    out = []
    for v, edges in S.in_edges().items():
        if len(edges) >= 2 and not S.is_var_node(v):
            out.extend((v, e) for e in edges)
    return out


def _collapse_reducts(S: TermGraph) -> list[TermGraph]:
    return [collapse_step(S, u, v) for u, v in sorted(collapse_candidates(S))]


def _copy_reducts(S: TermGraph) -> list[TermGraph]:
    return [copy_step(S, v, e)[0] for v, e in copy_candidates(S)]


Kind = Literal["collapse", "copy", "any"]


def _reducts(S: TermGraph, kind: Kind) -> list[TermGraph]:
    if kind == "collapse":
        return _collapse_reducts(S)
    if kind == "copy":
        return _copy_reducts(S)
    return _collapse_reducts(S) + _copy_reducts(S)


def joins_in_one_step(T1: TermGraph, T2: TermGraph, kind: Kind) -> bool:
    """Whether ``T1`` and ``T2`` have a common reduct, up to isomorphism, using at most
    one step of ``kind`` on each side (``any`` allows either kind)."""
    step = functools.partial(_reducts, kind=kind)
    keys = {G.canonical() for G in [T1] + step(T1)}
    return any(G.canonical() in keys for G in [T2] + step(T2))


def peaks(S: TermGraph, kind: Kind) -> list[tuple[TermGraph, TermGraph]]:
    """All pairs of distinct one-step reducts of ``S`` by steps of ``kind``."""
    rs = _reducts(S, kind)
    return [(rs[i], rs[j]) for i in range(len(rs)) for j in range(i + 1, len(rs))]
