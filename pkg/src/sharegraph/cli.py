"""Command-line front end.

Exit codes: 0 success, 1 usage or parse error, 2 fuel or width exhausted,
3 a checked property failed (adequacy or a size bound).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .computation import (
    ComputationError, ComputationSpec, PatternSet, compute, encode_cnf, parse_dimacs_clauses,
)
from .engine import Strategy, adequacy_check, all_normal_forms, audit_bounds, normalize
from .gen import random_instances, seed_from_env
from .graph import GraphError, mk_tree, read_term
from .grs import compile_trs
from .oracle import EnumerationLimit, runtime_complexity
from .parser import TrsSyntaxError, parse_term, parse_trs
from .terms import Trs

EXIT_OK, EXIT_USAGE, EXIT_FUEL, EXIT_PROPERTY = 0, 1, 2, 3
SHIPPED = ("rf", "rg", "rsat", "mult")


@dataclass
class RunConfig:
    command: str
    path: str | None = None
    strategy: Strategy = Strategy.LEFTMOST_INNERMOST
    fuel: int = 10_000
    width: int = 200_000
    output: str = "text"  # text | json
    seed: int = 0

    def __post_init__(self):
        if self.fuel < 0:
            raise ValueError("fuel must be non-negative")

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        return cls(args.command, getattr(args, "file", None),
                   Strategy.parse(getattr(args, "strategy", "li")),
                   getattr(args, "fuel", 0), getattr(args, "width", 0),
                   "json" if getattr(args, "json", False) else "text",
                   seed_from_env(getattr(args, "seed", 0)))


def load_trs(path: str) -> Trs:
    """Read a TRS file; names of the shipped examples (``rf.trs``, ``rsat``...) also work."""
    p = Path(path)
    if p.exists():
        return parse_trs(p.read_text(encoding="utf-8"))
    stem = p.name[:-4] if p.name.endswith(".trs") else p.name
    if stem in SHIPPED:
        data = resources.files(__package__).joinpath("data", f"{stem}.trs")
        return parse_trs(data.read_text(encoding="utf-8"))
    raise FileNotFoundError(f"no such file: {path}")


def _emit_json(obj) -> None:
    json.dump(obj, sys.stdout, ensure_ascii=False)
    sys.stdout.write("\n")


def cmd_normalize(args) -> int:
    trs = load_trs(args.file)
    t = parse_term(args.term, trs=trs)
    G = compile_trs(trs)
    S = mk_tree(t)
    strategy = Strategy.parse(args.strategy)
    if strategy is Strategy.EXHAUSTIVE:
        ex = all_normal_forms(G, S, args.fuel, args.width)
        if args.json:
            _emit_json({"normal_forms": sorted(map(str, ex.terms)), "complete": ex.complete,
                        "states": ex.states})
        else:
            for nf in sorted(map(str, ex.terms)):
                print(nf)
            print(f"# {len(ex.normal_forms)} normal forms, {ex.states} states"
                  + ("" if ex.complete else ", exploration incomplete"))
        if ex.violations:
            return EXIT_PROPERTY
        return EXIT_OK if ex.complete else EXIT_FUEL
    trace = normalize(G, S, strategy, args.fuel, keep_graphs=bool(args.dot),
                      fold=not args.no_fold, unfold=not args.no_unfold)
    failed = [v for v in audit_bounds(trace) if not v.ok]
    if args.dot:
        out = Path(args.dot)
        out.mkdir(parents=True, exist_ok=True)
        for k, T in enumerate(trace.graphs):
            (out / f"step{k:04d}.dot").write_text(T.to_dot(f"T{k}"), encoding="utf-8")
    if args.json:
        _emit_json(trace.to_json())
    else:
        verdict = "bounds OK" if not failed else f"{len(failed)} bound violations"
        status = "" if trace.normal_form else ", fuel exhausted"
        noun = "step" if trace.length == 1 else "steps"
        print(f"{read_term(trace.final)} ({trace.length} {noun}, {verdict}{status})")
        for v in failed:
            print(f"  {v}")
    if failed:
        return EXIT_PROPERTY
    return EXIT_OK if trace.normal_form else EXIT_FUEL


def cmd_adequacy(args) -> int:
    trs = load_trs(args.file)
    t = parse_term(args.term, trs=trs)
    rep = adequacy_check(trs, t, args.depth, max_graphs=args.max_graphs,
                         fold=not args.no_fold, unfold=not args.no_unfold)
    if args.json:
        _emit_json({"passed": rep.passed, "graphs": rep.graphs, "positions": rep.positions,
                    "steps": rep.steps, "truncated": rep.truncated,
                    "counterexamples": [str(c) for c in rep.counterexamples],
                    "violations": [str(v) for v in rep.violations]})
    else:
        print(rep.summary())
        if rep.counterexamples:
            print(f"first counterexample: {rep.counterexamples[0]}")
        for v in rep.violations[:5]:
            print(f"  {v}")
    return EXIT_OK if rep.passed and not rep.violations else EXIT_PROPERTY


def cmd_compute(args) -> int:
    trs = load_trs(args.file)
    if args.cnf is not None:
        text = Path(args.cnf).read_text() if Path(args.cnf).exists() else args.cnf
        v = encode_cnf(parse_dimacs_clauses(text))
    elif args.value is not None:
        v = parse_term(args.value, trs=trs)
    else:
        raise ComputationError("give a value or --cnf")
    if args.entry not in {f.name for f in trs.defined}:
        raise ComputationError(f"entry symbol {args.entry} is not a defined symbol")
    na = PatternSet(tuple(parse_term(p, variables=args.var, trs=trs) for p in args.na))
    spec = ComputationSpec(trs, trs.symbol(args.entry), na, args.fuel, args.width)
    res = compute(spec, v, innermost=args.innermost)
    if args.json:
        _emit_json({"accepted": sorted(map(str, res.accepted)),
                    "rejected": sorted(map(str, res.rejected)),
                    "stuck": sorted(map(str, res.stuck)),
                    "complete": res.complete, "states": res.states})
    else:
        for t in res:
            print(t)
        note = ""
        if not res.accepted and res.rejected:
            note = f"; {', '.join(sorted(map(str, res.rejected)))} reached"
        print(f"# {len(res.accepted)} accepted, {len(res.rejected)} rejected, "
              f"{len(res.stuck)} stuck, {res.states} states"
              + ("" if res.complete else ", exploration incomplete") + note)
    return EXIT_OK if res.complete else EXIT_FUEL


def cmd_rc(args) -> int:
    trs = load_trs(args.file)
    table = runtime_complexity(trs, args.size, args.fuel)
    if args.json:
        _emit_json([{"size": m, "rc": d} for m, d in table])
    else:
        for m, d in table:
            print(f"{m}\t{'>' + str(args.fuel) if d is None else d}")
    return EXIT_FUEL if any(d is None for _, d in table) else EXIT_OK


def cmd_fuzz(args) -> int:
    seed = seed_from_env(args.seed)
    bad = 0
    for k, ins in enumerate(random_instances(seed, args.count)):
        rep = adequacy_check(ins.trs, ins.term, args.depth, max_graphs=args.max_graphs)
        if not rep.passed or rep.violations:
            bad += 1
            print(f"instance {k}: {ins.term} under {[str(r) for r in ins.trs.rules]}")
            print(f"  {rep.summary()}")
            if rep.counterexamples:
                print(f"  {rep.counterexamples[0]}")
    print(f"seed {seed}: {args.count - bad}/{args.count} instances passed")
    return EXIT_OK if bad == 0 else EXIT_PROPERTY


def cmd_show(args) -> int:
    trs = load_trs(args.file)
    G = compile_trs(trs)
    for i, r in enumerate(G.rules):
        print(f"{i}: {r.rule}")
        print(f"   L = {r.lhs.dump()}")
        print(f"   R = {r.rhs.dump()}")
    print(f"Delta = {G.delta}")
    if args.dot:
        out = Path(args.dot)
        out.mkdir(parents=True, exist_ok=True)
        for i, r in enumerate(G.rules):
            (out / f"rule{i}.dot").write_text(r.to_dot(f"rule{i}"), encoding="utf-8")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sharegraph",
                                 description="Term graph rewriting with folding and unfolding.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, term=True):
        p.add_argument("file", help="TRS file in (VAR ...)(RULES ...) syntax, or a shipped example name")
        if term:
            p.add_argument("term")
        p.add_argument("--fuel", type=int, default=10_000)
        p.add_argument("--json", action="store_true")

    p = sub.add_parser("normalize", help="rewrite a term to normal form")
    common(p)
    p.add_argument("--strategy", default="li", choices=["li", "lo", "ff", "all"])
    p.add_argument("--width", type=int, default=200_000)
    p.add_argument("--dot", metavar="DIR", help="write one DOT file per intermediate graph")
    p.add_argument("--no-fold", action="store_true", help=argparse.SUPPRESS)
    p.add_argument("--no-unfold", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("adequacy", help="compare graph and term one-step reducts")
    common(p)
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--max-graphs", type=int, default=5_000)
    p.add_argument("--no-fold", action="store_true", help=argparse.SUPPRESS)
    p.add_argument("--no-unfold", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_adequacy)

    p = sub.add_parser("compute", help="accepted normal forms of entry(value)")
    common(p, term=False)
    p.add_argument("value", nargs="?")
    p.add_argument("--entry", required=True)
    p.add_argument("--na", action="append", default=[], metavar="PATTERN",
                   help="non-accepting pattern (repeatable)")
    p.add_argument("--var", action="append", default=[], help="variable name used in patterns")
    p.add_argument("--cnf", help="DIMACS-like clauses (text or file) encoded as the value")
    p.add_argument("--width", type=int, default=200_000)
    p.add_argument("--innermost", action="store_true", help="explore innermost steps only")
    p.set_defaults(func=cmd_compute, fuel=1_000)

    p = sub.add_parser("rc", help="runtime complexity table by brute force")
    common(p, term=False)
    p.add_argument("--size", type=int, required=True)
    p.set_defaults(func=cmd_rc)

    p = sub.add_parser("fuzz", help="adequacy on seeded random systems")
    p.add_argument("--seed", type=int, default=0, help="overridden by SHAREGRAPH_SEED")
    p.add_argument("--count", type=int, default=50)
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--max-graphs", type=int, default=400)
    p.set_defaults(func=cmd_fuzz)

    p = sub.add_parser("show", help="print the compiled graph rules")
    p.add_argument("file")
    p.add_argument("--dot", metavar="DIR")
    p.set_defaults(func=cmd_show)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args, rest = ap.parse_known_args(argv)
        # the optional compute value may follow the options
        if rest and args.command == "compute" and args.value is None and len(rest) == 1 \
                and not rest[0].startswith("-"):
            args.value, rest = rest[0], []
        if rest:
            ap.error(f"unrecognized arguments: {' '.join(rest)}")
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        RunConfig.from_args(args)
        return args.func(args)
    except TrsSyntaxError as e:
        print(f"parse error: {e}", file=sys.stderr)
    except (FileNotFoundError, ComputationError, GraphError, EnumerationLimit, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
