"""Term graph rewriting with folding and unfolding, checked against term rewriting."""

from importlib import resources

from .graph import GraphError, TermGraph, graph, mk_shared, mk_tree, read_term
from .grs import Grs, GraphRule, compile_rule, compile_trs, full_step
from .parser import TrsSyntaxError, format_trs, parse_term, parse_trs
from .sharing import fold_below, unfold_above
from .terms import App, FunSym, Rule, Term, Trs, Var, fn

__version__ = "0.1.0"


def load_example(name: str) -> Trs:
    """One of the shipped systems: ``rf``, ``rg``, ``rsat`` or ``mult``."""
    text = resources.files(__package__).joinpath("data", f"{name}.trs").read_text(encoding="utf-8")
    return parse_trs(text)


__all__ = [
    "App", "FunSym", "GraphError", "GraphRule", "Grs", "Rule", "Term", "TermGraph", "Trs",
    "TrsSyntaxError", "Var", "compile_rule", "compile_trs", "fn", "fold_below", "format_trs",
    "full_step", "graph", "load_example", "mk_shared", "mk_tree", "parse_term", "parse_trs",
    "read_term", "unfold_above",
]
