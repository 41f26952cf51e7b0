"""Reader and printer for the ``.trs`` text format.

The format is the classic termination-competition one, restricted to the
blocks we need::

    (VAR x y)
    (RULES
      f(x) -> eq(x,a)
      eq(x,x) -> top
    )

Identifiers listed in ``VAR`` are variables; every other identifier is a
function symbol whose arity is fixed by its first use.  ``#`` starts a
comment that runs to the end of the line.  ``(COMMENT ...)`` blocks are
skipped.
"""

from __future__ import annotations

import re
from typing import Iterable

from .terms import App, FunSym, Rule, Term, Trs, Var, variables

_TOKEN = re.compile(
    r"""
      (?P<ws>[ \t\r\f\v]+)
    | (?P<nl>\n)
    | (?P<comment>\#[^\n]*)
    | (?P<arrow>->)
    | (?P<punct>[(),])
    | (?P<ident>(?:(?!->)[^\s(),\#])+)
    """,
    re.VERBOSE,
)


class TrsSyntaxError(ValueError):
    def __init__(self, msg: str, line: int | None = None, col: int | None = None):
        self.line, self.col = line, col
        where = f"line {line}, column {col}: " if line is not None else ""
        super().__init__(where + msg)


class _Tok:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind, self.text, self.line, self.col = kind, text, line, col

    def __repr__(self):
        return f"{self.kind}:{self.text!r}@{self.line}:{self.col}"


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise TrsSyntaxError(f"unexpected character {text[pos]!r}",
                                 line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line, line_start = line + 1, m.end()
        elif kind not in ("ws", "comment"):
            toks.append(_Tok(kind, m.group(), line, pos - line_start + 1))
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text: str, variables: Iterable[str] = (),
                 arities: dict[str, int] | None = None):
        self.toks = _tokenize(text)
        self.i = 0
        self.vars = set(variables)
        # name -> (arity, line, col) of first use
        self.arities: dict[str, tuple[int, int, int]] = {
            k: (v, 0, 0) for k, v in (arities or {}).items()}

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def advance(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, kind: str, text: str | None = None) -> _Tok:
        t = self.tok
        if t.kind != kind or (text is not None and t.text != text):
            want = text or kind
            got = t.text or "end of input"
            raise TrsSyntaxError(f"expected {want!r}, found {got!r}", t.line, t.col)
        return self.advance()

    def term(self) -> Term:
        head = self.expect("ident")
        args: list[Term] = []
        if self.tok.kind == "punct" and self.tok.text == "(":
            self.advance()
            if not (self.tok.kind == "punct" and self.tok.text == ")"):
                args.append(self.term())
                while self.tok.kind == "punct" and self.tok.text == ",":
                    self.advance()
                    args.append(self.term())
            self.expect("punct", ")")
        name = head.text
        if name in self.vars:
            if args:
                raise TrsSyntaxError(f"variable {name!r} applied to arguments",
                                     head.line, head.col)
            return Var(name)
        known = self.arities.get(name)
        if known is None:
            self.arities[name] = (len(args), head.line, head.col)
        elif known[0] != len(args):
            first = f" (first used with arity {known[0]} at line {known[1]})" if known[1] else ""
            raise TrsSyntaxError(
                f"arity clash: {name!r} used with {len(args)} arguments{first}",
                head.line, head.col)
        return App(FunSym(name, len(args)), args)

    def rule(self) -> Rule:
        start = self.tok
        lhs = self.term()
        self.expect("arrow")
        rhs = self.term()
        if isinstance(lhs, Var):
            raise TrsSyntaxError(f"left-hand side {lhs} is a variable",
                                 start.line, start.col)
        extra = variables(rhs) - variables(lhs)
        if extra:
            raise TrsSyntaxError(
                f"variables {sorted(extra)} occur on the right but not on the left",
                start.line, start.col)
        return Rule(lhs, rhs)

    def skip_block(self):
        depth = 1
        while depth:
            t = self.advance()
            if t.kind == "eof":
                raise TrsSyntaxError("unterminated block", t.line, t.col)
            if t.kind == "punct" and t.text == "(":
                depth += 1
            elif t.kind == "punct" and t.text == ")":
                depth -= 1

    def trs(self) -> Trs:
        rules: list[Rule] = []
        seen_var = seen_rules = False
        while self.tok.kind != "eof":
            self.expect("punct", "(")
            kw = self.expect("ident")
            if kw.text == "VAR":
                if seen_rules:
                    raise TrsSyntaxError("VAR block must precede RULES", kw.line, kw.col)
                while self.tok.kind == "ident":
                    self.vars.add(self.advance().text)
                self.expect("punct", ")")
                seen_var = True
            elif kw.text == "RULES":
                if not seen_var:
                    raise TrsSyntaxError(
                        "missing (VAR ...) declaration before RULES; undeclared "
                        "identifiers would silently become constants "
                        "(write (VAR) for a ground system)", kw.line, kw.col)
                while not (self.tok.kind == "punct" and self.tok.text == ")"):
                    if self.tok.kind == "eof":
                        raise TrsSyntaxError("unterminated RULES block",
                                             self.tok.line, self.tok.col)
                    rules.append(self.rule())
                self.advance()
                seen_rules = True
            elif kw.text == "COMMENT":
                self.skip_block()
            else:
                raise TrsSyntaxError(f"unsupported block {kw.text!r}", kw.line, kw.col)
        if not seen_rules:
            raise TrsSyntaxError("no RULES block", self.tok.line, self.tok.col)
        clash = self.vars & set(self.arities)
        if clash:
            raise TrsSyntaxError(f"identifiers declared as variables and used as symbols: {sorted(clash)}")
        return Trs(tuple(rules))


def parse_trs(text: str) -> Trs:
    return _Parser(text).trs()


def parse_term(text: str, variables: Iterable[str] = (), trs: Trs | None = None) -> Term:
    """Parse a single term.  With ``trs`` given, arities must agree with it."""
    arities = {f.name: f.arity for f in trs.signature} if trs is not None else None
    p = _Parser(text, variables, arities)
    t = p.term()
    if p.tok.kind != "eof":
        raise TrsSyntaxError(f"trailing input {p.tok.text!r}", p.tok.line, p.tok.col)
    return t


def format_trs(trs: Trs) -> str:
    vs: set[str] = set()
    for r in trs.rules:
        vs |= variables(r.lhs)
    clash = vs & {f.name for f in trs.signature}
    if clash:
        raise ValueError(f"names used both as variables and symbols: {sorted(clash)}")
    lines = ["(VAR " + " ".join(sorted(vs)) + ")" if vs else "(VAR)", "(RULES"]
    lines += [f"  {r.lhs} -> {r.rhs}" for r in trs.rules]
    lines.append(")")
    return "\n".join(lines) + "\n"
