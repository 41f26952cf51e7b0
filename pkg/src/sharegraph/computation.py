"""Relations computed by a TRS: normal forms of ``f(v)`` that are accepting values.

Ships the FSAT system and the clause-list encoding it expects, plus a
brute-force SAT oracle to check it against.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Iterator, Sequence

from .engine import all_normal_forms
from .graph import TermGraph, find_morphism, mk_shared, mk_tree
from .grs import compile_trs
from .parser import parse_trs
from .sharing import maximally_shared
from .terms import App, FunSym, Term, Trs, is_ground, is_value

Clause = tuple[int, ...]  # DIMACS style: 3 is x3, -3 is its negation
Cnf = tuple[Clause, ...]


class ComputationError(ValueError):
    pass


@dataclass(frozen=True)
class PatternSet:
    """Non-accepting patterns: a normal form matching any of them is not a result."""

    patterns: tuple[Term, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "patterns", tuple(self.patterns))

    def check(self, trs: Trs) -> None:
        for p in self.patterns:
            if not is_value(p, trs.defined):
                raise ComputationError(f"pattern {p} is not a value")

    def __iter__(self):
        return iter(self.patterns)

    def __len__(self):
        return len(self.patterns)


def is_accepting(t: Term, na: PatternSet | Iterable[Term]) -> bool:
    """True iff no pattern has an instance equal to ``t``, decided by graph morphisms."""
    patterns = list(na)
    if not patterns:
        return True
    return is_accepting_graph(mk_shared(t), patterns)


def is_accepting_graph(T: TermGraph, na: PatternSet | Iterable[Term]) -> bool:
    """Same test on a graph; the graph is maximally shared first so non-linear patterns work."""
    M = maximally_shared(T)
    return all(find_morphism(mk_tree(p), M) is None for p in na)


@dataclass
class ComputationSpec:
    trs: Trs
    entry: FunSym
    na: PatternSet = field(default_factory=PatternSet)
    fuel: int = 1_000
    width: int = 500_000

    def __post_init__(self):
        if self.entry not in self.trs.defined:
            raise ComputationError(f"entry symbol {self.entry.name} is not a defined symbol")
        if self.entry.arity != 1:
            raise ComputationError(f"entry symbol {self.entry.name} must be unary")
        self.na.check(self.trs)


@dataclass
class ComputeResult:
    accepted: set[Term]
    rejected: set[Term]  # values matched by a non-accepting pattern
    stuck: set[Term]  # normal forms that are not values
    complete: bool
    states: int

    def __iter__(self) -> Iterator[Term]:
        return iter(sorted(self.accepted, key=str))


def compute(spec: ComputationSpec, v: Term, *, innermost: bool = False) -> ComputeResult:
    """All accepting value normal forms of ``entry(v)`` under full graph rewriting.

    ``innermost`` explores innermost steps only; that is not the relation
    the system is defined by, and is offered for comparison.
    """
    if not is_value(v, spec.trs.defined) or not is_ground(v):
        raise ComputationError(f"input {v} is not a ground value")
    start = App(spec.entry, (v,))
    ex = all_normal_forms(compile_trs(spec.trs), mk_tree(start), spec.fuel, spec.width,
                          innermost=innermost)
    acc, rej, stuck = set(), set(), set()
    for t, T in ex.normal_forms.items():
        if not is_value(t, spec.trs.defined):
            stuck.add(t)
        elif is_accepting_graph(T, spec.na):
            acc.add(t)
        else:
            rej.add(t)
    return ComputeResult(acc, rej, stuck, ex.complete, ex.states)


# -- FSAT ---------------------------------------------------------------------

def load_rsat(fuel: int = 1_000, width: int = 500_000) -> ComputationSpec:
    text = resources.files(__package__).joinpath("data", "rsat.trs").read_text(encoding="utf-8")
    trs = parse_trs(text)
    return ComputationSpec(trs, trs.symbol("issat"), PatternSet((App(trs.symbol("unsat"), ()),)),
                           fuel, width)


_NIL = App(FunSym("nil", 0), ())
_EPS = App(FunSym("eps", 0), ())
_CONS = FunSym("cons", 2)
_O = FunSym("O", 1)
_Z = FunSym("Z", 1)


def bits_for(nvars: int) -> int:
    return math.ceil(math.log2(nvars)) if nvars > 1 else 0


def encode_list(items: Sequence[Term]) -> Term:
    out = _NIL
    for t in reversed(items):
        out = App(_CONS, (t, out))
    return out


def decode_list(t: Term) -> list[Term]:
    out = []
    while isinstance(t, App) and t.sym == _CONS:
        out.append(t.args[0])
        t = t.args[1]
    if t != _NIL:
        raise ComputationError(f"not a cons/nil list: {t}")
    return out


def encode_literal(lit: int, nvars: int) -> Term:
    """``x_i`` becomes the binary string of ``i - 1`` (O = 1, Z = 0) under O or Z."""
    if lit == 0 or abs(lit) > nvars:
        raise ComputationError(f"literal {lit} out of range for {nvars} variables")
    k = bits_for(nvars)
    s = _EPS
    for bit in reversed(format(abs(lit) - 1, f"0{k}b") if k else ""):
        s = App(_O if bit == "1" else _Z, (s,))
    return App(_O if lit > 0 else _Z, (s,))


def decode_literal(t: Term) -> int:
    if not (isinstance(t, App) and t.sym in (_O, _Z)):
        raise ComputationError(f"not a literal: {t}")
    sign = 1 if t.sym == _O else -1
    bits = []
    s = t.args[0]
    while isinstance(s, App) and s.sym in (_O, _Z):
        bits.append("1" if s.sym == _O else "0")
        s = s.args[0]
    if s != _EPS:
        raise ComputationError(f"not a literal: {t}")
    return sign * (int("".join(bits) or "0", 2) + 1)


def encode_cnf(cnf: Sequence[Sequence[int]], nvars: int | None = None) -> Term:
    if nvars is None:
        nvars = max((abs(l) for c in cnf for l in c), default=1)
    return encode_list([encode_list([encode_literal(l, nvars) for l in c]) for c in cnf])


def decode_assignment(t: Term) -> list[int]:
    return [decode_literal(x) for x in decode_list(t)]


def parse_dimacs_clauses(text: str) -> list[list[int]]:
    """Clauses from DIMACS-like text: integers, each clause terminated by 0.

    Comment lines (``c``) and the problem line (``p``) are ignored.
    """
    clauses, cur = [], []
    for line in text.splitlines():
        line = line.strip()
        if not line or line[0] in "cp%":
            continue
        for tok in line.split():
            n = int(tok)
            if n == 0:
                clauses.append(cur)
                cur = []
            else:
                cur.append(n)
    if cur:
        clauses.append(cur)
    return clauses


def satisfies(literals: Iterable[int], cnf: Sequence[Sequence[int]]) -> bool:
    """Whether the (consistent) set of literals makes every clause true."""
    lits = set(literals)
    if any(-l in lits for l in lits):
        return False
    return all(any(l in lits for l in c) for c in cnf)


def brute_force_sat(cnf: Sequence[Sequence[int]], nvars: int) -> list[dict[int, bool]]:
    """All satisfying total assignments."""
    out = []
    for bits in itertools.product((False, True), repeat=nvars):
        a = {i + 1: b for i, b in enumerate(bits)}
        if all(any(a[abs(l)] == (l > 0) for l in c) for c in cnf):
            out.append(a)
    return out


def enumerate_cnfs(max_vars: int = 3, max_clauses: int = 3) -> Iterator[tuple[int, Cnf]]:
    """CNFs up to renaming and polarity flips of variables, as (nvars, clauses).

    Clauses are non-empty sets of literals without complementary pairs and
    a formula is a set of clauses using every one of its ``nvars``
    variables.  One representative per symmetry class is produced: the
    least image under all renamings and polarity flips.
    """
    seen = set()
    for n in range(1, max_vars + 1):
        lits = [l for v in range(1, n + 1) for l in (v, -v)]
        clauses = [tuple(sorted(c, key=lambda l: (abs(l), -l)))
                   for k in range(1, n + 1) for c in itertools.combinations(lits, k)
                   if not any(-l in c for l in c)]
        for m in range(1, max_clauses + 1):
            for cnf in itertools.combinations(clauses, m):
                key = _canonical_cnf(cnf)
                if key is None or key in seen:
                    continue
                if len({abs(l) for c in key for l in c}) != n:
                    continue
                seen.add(key)
                yield n, key


def _canonical_cnf(cnf: Cnf) -> Cnf | None:
    best = None
    vs = sorted({abs(l) for c in cnf for l in c})
    for perm in itertools.permutations(range(1, len(vs) + 1)):
        ren = dict(zip(vs, perm))
        for flips in itertools.product((1, -1), repeat=len(vs)):
            fl = dict(zip(vs, flips))
            c2 = tuple(sorted(tuple(sorted((ren[abs(l)] * (1 if l > 0 else -1) * fl[abs(l)]
                                            for l in c), key=lambda l: (abs(l), -l)))
                              for c in cnf))
            if best is None or c2 < best:
                best = c2
    return best
