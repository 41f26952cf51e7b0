"""First-order terms, substitutions, positions and term rewrite systems."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Union

Position = tuple[int, ...]
Substitution = Mapping[str, "Term"]


@dataclass(frozen=True, order=True)
class FunSym:
    name: str
    arity: int

    def __post_init__(self):
        if self.arity < 0:
            raise ValueError(f"negative arity for {self.name!r}")

    def __str__(self):
        return self.name


class Term:
    """Base class of :class:`Var` and :class:`App`.

    Terms are immutable and hash-consed only lazily: the hash is cached on
    first use so that deeply shared terms read back from graphs stay cheap
    to put in sets and dicts.
    """

    __slots__ = ()

    def is_var(self) -> bool:
        return isinstance(self, Var)


class Var(Term):
    __slots__ = ("name",)

    def __init__(self, name: str):
        object.__setattr__(self, "name", name)

    def __setattr__(self, key, value):
        raise AttributeError("terms are immutable")

    def __eq__(self, other):
        return isinstance(other, Var) and other.name == self.name

    def __hash__(self):
        return hash(("var", self.name))

    def __repr__(self):
        return f"Var({self.name!r})"

    def __str__(self):
        return self.name


class App(Term):
    __slots__ = ("sym", "args", "_hash", "_size")

    def __init__(self, sym: FunSym, args: Iterable[Term] = ()):
        args = tuple(args)
        if len(args) != sym.arity:
            raise ValueError(
                f"{sym.name} expects {sym.arity} arguments, got {len(args)}")
        object.__setattr__(self, "sym", sym)
        object.__setattr__(self, "args", args)
        object.__setattr__(self, "_hash", None)
        object.__setattr__(self, "_size", None)

    def __setattr__(self, key, value):
        raise AttributeError("terms are immutable")

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, App):
            return False
        if hash(self) != hash(other):
            return False
        return self.sym == other.sym and self.args == other.args

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash((self.sym.name, self.sym.arity, self.args))
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self):
        return f"App({self.sym.name!r}, {list(self.args)!r})"

    def __str__(self):
        return render(self)


def fn(name: str, *args: Term) -> App:
    """Build ``name(args...)`` with the arity taken from the argument count."""
    return App(FunSym(name, len(args)), args)


def render(t: Term) -> str:
    out: list[str] = []

    def go(s):
        if isinstance(s, Var):
            out.append(s.name)
            return
        out.append(s.sym.name)
        if s.args:
            out.append("(")
            for i, a in enumerate(s.args):
                if i:
                    out.append(",")
                go(a)
            out.append(")")

    go(t)
    return "".join(out)


def size(t: Term) -> int:
    """Number of symbol and variable occurrences."""
    if isinstance(t, Var):
        return 1
    n = t._size
    if n is None:
        n = 1 + sum(size(a) for a in t.args)
        object.__setattr__(t, "_size", n)
    return n


def variables(t: Term) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    out: set[str] = set()
    for a in t.args:
        out |= variables(a)
    return out


def symbols(t: Term) -> set[FunSym]:
    if isinstance(t, Var):
        return set()
    out = {t.sym}
    for a in t.args:
        out |= symbols(a)
    return out


def is_ground(t: Term) -> bool:
    return not variables(t)


def apply_subst(t: Term, sigma: Substitution) -> Term:
    if isinstance(t, Var):
        return sigma.get(t.name, t)
    if not t.args:
        return t
    return App(t.sym, [apply_subst(a, sigma) for a in t.args])


def positions(t: Term) -> Iterator[Position]:
    """All positions of ``t`` in preorder (left to right)."""
    yield ()
    if isinstance(t, App):
        for i, a in enumerate(t.args, 1):
            for q in positions(a):
                yield (i,) + q


def subterm_at(t: Term, p: Position) -> Term:
    s = t
    for depth, i in enumerate(p):
        if isinstance(s, Var) or not 1 <= i <= len(s.args):
            raise IndexError(f"position {list(p)} invalid in {t} (at index {depth})")
        s = s.args[i - 1]
    return s


def replace_subterm(t: Term, p: Position, s: Term) -> Term:
    if not p:
        return s
    if isinstance(t, Var) or not 1 <= p[0] <= len(t.args):
        raise IndexError(f"position {list(p)} invalid in {t}")
    i = p[0] - 1
    args = list(t.args)
    args[i] = replace_subterm(args[i], p[1:], s)
    return App(t.sym, args)


def match(pattern: Term, t: Term, sigma: dict[str, Term] | None = None) -> dict[str, Term] | None:
    """Syntactic matching: return ``sigma`` with ``pattern sigma == t`` or None."""
    sigma = {} if sigma is None else sigma
    stack = [(pattern, t)]
    while stack:
        l, s = stack.pop()
        if isinstance(l, Var):
            bound = sigma.get(l.name)
            if bound is None:
                sigma[l.name] = s
            elif bound != s:
                return None
        elif isinstance(s, App) and s.sym == l.sym:
            stack.extend(zip(l.args, s.args))
        else:
            return None
    return sigma


@dataclass(frozen=True)
class Rule:
    lhs: Term
    rhs: Term

    def __post_init__(self):
        if isinstance(self.lhs, Var):
            raise ValueError(f"left-hand side {self.lhs} is a variable")
        extra = variables(self.rhs) - variables(self.lhs)
        if extra:
            raise ValueError(
                f"rule {self}: variables {sorted(extra)} occur only on the right")

    def __str__(self):
        return f"{self.lhs} -> {self.rhs}"


@dataclass(frozen=True)
class Trs:
    """A finite, ordered list of rules over an inferred signature.

    Rule order is significant: deterministic strategies try rules in this
    order.
    """

    rules: tuple[Rule, ...]
    signature: frozenset[FunSym] = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))
        sig = set(self.signature or ())
        for r in self.rules:
            sig |= symbols(r.lhs) | symbols(r.rhs)
        check_signature(sig)
        object.__setattr__(self, "signature", frozenset(sig))

    @property
    def defined(self) -> frozenset[FunSym]:
        return frozenset(r.lhs.sym for r in self.rules)

    @property
    def constructors(self) -> frozenset[FunSym]:
        return self.signature - self.defined

    def symbol(self, name: str) -> FunSym | None:
        for f in self.signature:
            if f.name == name:
                return f
        return None

    def is_basic(self, t: Term) -> bool:
        return is_basic(t, self.defined)

    def is_value(self, t: Term) -> bool:
        return is_value(t, self.defined)

    def __str__(self):
        return "\n".join(map(str, self.rules))


def check_signature(sig: Iterable[FunSym]) -> None:
    seen: dict[str, int] = {}
    for f in sig:
        if seen.setdefault(f.name, f.arity) != f.arity:
            raise ValueError(
                f"symbol {f.name!r} used with arities {seen[f.name]} and {f.arity}")


def is_value(t: Term, defined: Iterable[FunSym]) -> bool:
    """True iff ``t`` is a constructor term (variables allowed)."""
    defined = set(defined)
    if isinstance(t, Var):
        return True
    return t.sym not in defined and all(is_value(a, defined) for a in t.args)


def is_basic(t: Term, defined: Iterable[FunSym]) -> bool:
    defined = set(defined)
    if isinstance(t, Var) or t.sym not in defined:
        return False
    return all(is_value(a, defined) for a in t.args)


Label = Union[FunSym, Var]
