"""Seeded random terms, rewrite systems and term graphs for property tests."""

from __future__ import annotations

import os
import random
from dataclasses import dataclass

from .graph import TermGraph, mk_tree
from .sharing import collapse_candidates, collapse_step, copy_candidates, copy_step
from .terms import App, FunSym, Rule, Term, Trs, Var, variables

DEFAULT_SIGNATURE = (
    FunSym("a", 0), FunSym("b", 0), FunSym("f", 1), FunSym("g", 1),
    FunSym("h", 2), FunSym("k", 2),
)


def seed_from_env(default: int) -> int:
    """``SHAREGRAPH_SEED`` wins over ``default`` when set."""
    env = os.environ.get("SHAREGRAPH_SEED")
    return int(env) if env not in (None, "") else default


def random_term(rng: random.Random, size: int, signature=DEFAULT_SIGNATURE,
                var_names=(), ground_bias: float = 0.0) -> Term:
    """A term of exactly ``size`` symbols when the signature allows it."""
    consts = [f for f in signature if f.arity == 0]
    leaves: list[Term] = [App(c, ()) for c in consts] + [Var(x) for x in var_names]
    if size <= 1:
        if var_names and rng.random() >= ground_bias:
            return Var(rng.choice(var_names))
        return rng.choice(leaves)
    fs = [f for f in signature if 0 < f.arity <= size - 1]
    if not fs:
        return rng.choice(leaves)
    f = rng.choice(fs)
    # split size - 1 among the arguments, each at least 1
    rest = size - 1
    cuts = sorted(rng.sample(range(1, rest), f.arity - 1)) if f.arity > 1 else []
    parts = [b - a for a, b in zip([0] + cuts, cuts + [rest])]
    return App(f, tuple(random_term(rng, n, signature, var_names, ground_bias) for n in parts))


def random_rule(rng: random.Random, max_lhs: int = 4, max_rhs: int = 6,
                signature=DEFAULT_SIGNATURE, var_names=("x", "y")) -> Rule:
    while True:
        lhs = random_term(rng, rng.randint(1, max_lhs), signature, var_names, ground_bias=0.3)
        if isinstance(lhs, Var):
            continue
        vs = sorted(variables(lhs))
        rhs = random_term(rng, rng.randint(1, max_rhs), signature, vs, ground_bias=0.4)
        return Rule(lhs, rhs)


def random_trs(rng: random.Random, max_rules: int = 4, max_lhs: int = 4, max_rhs: int = 6,
               signature=DEFAULT_SIGNATURE) -> Trs:
    rules = [random_rule(rng, max_lhs, max_rhs, signature) for _ in range(rng.randint(1, max_rules))]
    return Trs(rules, signature=signature)


def random_graph(rng: random.Random, size: int = 8, moves: int = 6,
                 signature=DEFAULT_SIGNATURE) -> TermGraph:
    """``Tree(t)`` for a random ``t`` followed by random collapse and copy steps."""
    S = mk_tree(random_term(rng, size, signature, ("x", "y"), ground_bias=0.8))
    for _ in range(moves):
        cols = sorted(collapse_candidates(S))
        cops = copy_candidates(S)
        if cols and (not cops or rng.random() < 0.7):
            S = collapse_step(S, *rng.choice(cols))
        elif cops:
            S = copy_step(S, *rng.choice(cops))[0]
    return S


@dataclass
class Instance:
    """A random rewrite system with a start term."""

    trs: Trs
    term: Term


def random_instances(seed: int, n: int, max_rules: int = 4, max_rhs: int = 6,
                     max_term: int = 7) -> list[Instance]:
    rng = random.Random(seed)
    out = []
    for _ in range(n):
        trs = random_trs(rng, max_rules, 4, max_rhs)
        t = random_term(rng, rng.randint(1, max_term), ground_bias=1.0)
        out.append(Instance(trs, t))
    return out
