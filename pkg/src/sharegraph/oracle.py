"""Reference term rewriter.

Everything here works on plain trees and is deliberately naive; it is the
ground truth the graph engine is checked against.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

from .terms import (
    App, FunSym, Position, Term, Trs, Var, apply_subst, match, positions,
    replace_subterm, size, subterm_at,
)

HOLE_SYM = FunSym("□", 0)
HOLE = App(HOLE_SYM, ())


class EnumerationLimit(RuntimeError):
    """Raised when basic-term enumeration would exceed its cap."""


@dataclass(frozen=True)
class Context:
    """A term over the signature extended by the hole constant."""

    term: Term

    @property
    def holes(self) -> list[Position]:
        return [p for p in positions(self.term) if subterm_at(self.term, p) == HOLE]

    def fill(self, ts: Sequence[Term]) -> Term:
        return fill_context(self, ts)

    def __str__(self):
        return str(self.term)


def context_at(t: Term, p: Position) -> Context:
    return Context(replace_subterm(t, p, HOLE))


def fill_context(c: Context, ts: Sequence[Term]) -> Term:
    holes = c.holes
    if len(holes) != len(ts):
        raise ValueError(f"context has {len(holes)} holes, got {len(ts)} terms")
    out = c.term
    for p, t in zip(holes, ts):
        out = replace_subterm(out, p, t)
    return out


def term_reducts(trs: Trs, s: Term) -> set[tuple[Position, int, Term]]:
    """All one-step reducts of ``s`` as (position, rule index, reduct)."""
    out = set()
    for p in positions(s):
        sub = subterm_at(s, p)
        if isinstance(sub, Var):
            continue
        for i, rule in enumerate(trs.rules):
            sigma = match(rule.lhs, sub)
            if sigma is not None:
                out.add((p, i, replace_subterm(s, p, apply_subst(rule.rhs, sigma))))
    return out


def reducts_at(trs: Trs, s: Term, p: Position) -> set[Term]:
    return {t for q, _, t in term_reducts(trs, s) if q == p}


def derivation_length(trs: Trs, s: Term, fuel: int = 10_000,
                      max_size: int | None = None) -> int | None:
    """Length of the longest rewrite sequence from ``s``.

    Returns None when some sequence is longer than ``fuel`` (this includes
    every non-terminating start term: a cycle is detected as revisiting a
    term on the current path), or reaches a term larger than ``max_size``.
    """
    memo: dict[Term, int] = {}
    on_path: set[Term] = set()

    class _Exceeded(Exception):
        pass

    # iterative DFS: frames are (term, depth, pending successors, best so far)
    def succs(t):
        if max_size is not None and size(t) > max_size:
            raise _Exceeded
        return list({r for _, _, r in term_reducts(trs, t)})

    try:
        stack = [[s, 0, succs(s), 0]]
        on_path.add(s)
        while stack:
            frame = stack[-1]
            t, depth, pending, best = frame
            if depth > fuel:
                raise _Exceeded
            if pending:
                u = pending.pop()
                if u in on_path:
                    raise _Exceeded
                known = memo.get(u)
                if known is not None:
                    if depth + 1 + known > fuel:
                        raise _Exceeded
                    frame[3] = max(best, known + 1)
                else:
                    on_path.add(u)
                    stack.append([u, depth + 1, succs(u), 0])
                continue
            stack.pop()
            on_path.discard(t)
            memo[t] = best
            if stack:
                stack[-1][3] = max(stack[-1][3], best + 1)
    except _Exceeded:
        return None
    return memo[s]


def normal_forms(trs: Trs, s: Term, limit: int = 100_000,
                 max_size: int | None = None) -> set[Term] | None:
    """All normal forms reachable from ``s``.

    None if more than ``limit`` terms are reachable or one of them is
    larger than ``max_size``.
    """
    seen = {s}
    frontier = [s]
    nfs = set()
    while frontier:
        nxt = []
        for t in frontier:
            if max_size is not None and size(t) > max_size:
                return None
            rs = {r for _, _, r in term_reducts(trs, t)}
            if not rs:
                nfs.add(t)
            for r in rs - seen:
                seen.add(r)
                nxt.append(r)
            if len(seen) > limit:
                return None
        frontier = nxt
    return nfs


def _constructor_terms(constructors: Sequence[FunSym], n: int) -> Iterator[Term]:
    """Constructor terms of size exactly ``n`` with variable leaves as placeholders.

    Placeholder leaves are ``Var('?')``; they are renamed afterwards.
    """
    if n == 1:
        yield Var("?")
        for c in constructors:
            if c.arity == 0:
                yield App(c, ())
        return
    for c in constructors:
        if c.arity == 0 or c.arity > n - 1:
            continue
        for args in _tuples(constructors, c.arity, n - 1):
            yield App(c, args)


def _tuples(constructors, k, n):
    if k == 0:
        if n == 0:
            yield ()
        return
    for first in range(1, n - k + 2):
        for a in _constructor_terms(constructors, first):
            for rest in _tuples(constructors, k - 1, n - first):
                yield (a,) + rest


def _name_placeholders(t: Term) -> Iterator[Term]:
    """All ways to name the placeholder leaves, up to variable renaming."""
    holes = [p for p in positions(t) if subterm_at(t, p) == Var("?")]
    if not holes:
        yield t
        return
    # restricted growth strings enumerate set partitions of the holes
    def rgs(k):
        if k == 0:
            yield ()
            return
        for rest in rgs(k - 1):
            top = max(rest, default=-1)
            for v in range(top + 2):
                yield rest + (v,)

    for assignment in rgs(len(holes)):
        out = t
        for p, v in zip(holes, assignment):
            out = replace_subterm(out, p, Var(f"x{v + 1}"))
        yield out


def basic_terms(trs: Trs, n: int, cap: int = 20_000) -> list[Term]:
    """All basic terms of size at most ``n``, variables up to renaming."""
    cons = sorted(trs.constructors)
    out: list[Term] = []
    for f in sorted(trs.defined):
        for m in range(f.arity + 1, n + 1):
            for args in _tuples(cons, f.arity, m - 1):
                for t in _name_placeholders(App(f, args)):
                    out.append(t)
                    if len(out) > cap:
                        raise EnumerationLimit(
                            f"more than {cap} basic terms of size <= {n}; "
                            f"lower the size bound or raise the cap")
    return out


def runtime_complexity(trs: Trs, n: int, fuel: int = 10_000,
                       cap: int = 20_000) -> list[tuple[int, int | None]]:
    """Table of (m, max derivation length over basic terms of size <= m).

    An entry of None means some start term exceeded ``fuel``.
    """
    by_size: dict[int, int | None] = {}
    for t in basic_terms(trs, n, cap):
        d = derivation_length(trs, t, fuel)
        m = size(t)
        prev = by_size.get(m, 0)
        by_size[m] = None if d is None or prev is None else max(prev, d)
    table = []
    best: int | None = 0
    for m in range(1, n + 1):
        cur = by_size.get(m, 0)
        best = None if best is None or cur is None else max(best, cur)
        table.append((m, best))
    return table
