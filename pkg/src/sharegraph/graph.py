"""Term graphs: ordered, labelled, rooted DAGs representing terms.

Nodes are positive integers.  Their numeric order doubles as the total
order used to orient collapse steps (a larger id is collapsed onto a
smaller one).  Graphs are values: every operation returns a new graph.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence, Union

from .terms import App, FunSym, Position, Term, Var

Label = Union[FunSym, Var]
Morphism = dict[int, int]


class GraphError(ValueError):
    """A graph violates the term-graph invariants or an operation's precondition."""


class TermTooLarge(RuntimeError):
    pass


@dataclass(frozen=True)
class GraphMetrics:
    size: int
    depth: int
    rsize: int


class TermGraph:
    """An acyclic rooted graph over function symbols and variables.

    ``labels`` maps node -> FunSym or Var, ``succs`` maps node -> tuple of
    successor nodes.  Construction validates all invariants unless
    ``check=False`` is passed (internal fast path).
    """

    __slots__ = ("_label", "_succ", "root", "_cache")

    def __init__(self, labels: Mapping[int, Label], succs: Mapping[int, Sequence[int]],
                 root: int, *, check: bool = True):
        self._label = dict(labels)
        self._succ = {u: tuple(succs.get(u, ())) for u in self._label}
        self.root = root
        self._cache: dict = {}
        if check:
            self.validate()

    # -- basic access -----------------------------------------------------

    @property
    def nodes(self) -> tuple[int, ...]:
        c = self._cache.get("nodes")
        if c is None:
            c = self._cache["nodes"] = tuple(sorted(self._label))
        return c

    def label(self, u: int) -> Label:
        return self._label[u]

    def succ(self, u: int) -> tuple[int, ...]:
        return self._succ[u]

    def is_var_node(self, u: int) -> bool:
        return isinstance(self._label[u], Var)

    def __contains__(self, u) -> bool:
        return u in self._label

    def __len__(self) -> int:
        return len(self._label)

    @property
    def size(self) -> int:
        return len(self._label)

    @property
    def max_id(self) -> int:
        return max(self._label)

    def specs(self) -> Iterator[tuple[int, Label, tuple[int, ...]]]:
        for u in self.nodes:
            yield u, self._label[u], self._succ[u]

    def variable_nodes(self) -> dict[str, int]:
        return {lab.name: u for u, lab in self._label.items() if isinstance(lab, Var)}

    def __eq__(self, other):
        return (isinstance(other, TermGraph) and self.root == other.root
                and self._label == other._label and self._succ == other._succ)

    def __hash__(self):
        return hash(self.canonical())

    def __repr__(self):
        return f"TermGraph({self.dump()})"

    # -- structure ----------------------------------------------------------

    def validate(self) -> None:
        lab, suc = self._label, self._succ
        if self.root not in lab:
            raise GraphError(f"root {self.root} is not a node")
        seen_vars: dict[str, int] = {}
        for u, l in lab.items():
            if not isinstance(u, int) or u < 1:
                raise GraphError(f"node ids must be positive integers, got {u!r}")
            if isinstance(l, Var):
                if suc[u]:
                    raise GraphError(f"variable node {u} has successors")
                other = seen_vars.setdefault(l.name, u)
                if other != u:
                    raise GraphError(f"variable {l.name} labels two nodes {other} and {u}")
            elif isinstance(l, FunSym):
                if len(suc[u]) != l.arity:
                    raise GraphError(
                        f"node {u}: {l.name} has arity {l.arity} but {len(suc[u])} successors")
            else:
                raise GraphError(f"node {u} has invalid label {l!r}")
            for v in suc[u]:
                if v not in lab:
                    raise GraphError(f"node {u} points to missing node {v}")
        order = self.topological_order()  # raises on cycles
        if len(order) != len(lab):
            missing = sorted(set(lab) - set(order))
            raise GraphError(f"nodes {missing} are unreachable from the root")

    def topological_order(self) -> tuple[int, ...]:
        """Nodes reachable from the root, every node before its successors."""
        c = self._cache.get("topo")
        if c is not None:
            return c
        WHITE, GREY, BLACK = 0, 1, 2
        color: dict[int, int] = {}
        post: list[int] = []
        stack = [(self.root, iter(self._succ[self.root]))]
        color[self.root] = GREY
        while stack:
            u, it = stack[-1]
            for v in it:
                cv = color.get(v, WHITE)
                if cv == GREY:
                    raise GraphError(f"cycle through node {v}")
                if cv == WHITE:
                    color[v] = GREY
                    stack.append((v, iter(self._succ[v])))
                    break
            else:
                stack.pop()
                color[u] = BLACK
                post.append(u)
        c = self._cache["topo"] = tuple(reversed(post))
        return c

    def heights(self) -> dict[int, int]:
        c = self._cache.get("heights")
        if c is None:
            c = {}
            for u in reversed(self.topological_order()):
                s = self._succ[u]
                c[u] = 1 + max(c[v] for v in s) if s else 0
            self._cache["heights"] = c
        return c

    @property
    def depth(self) -> int:
        """Length of the longest path from the root."""
        return self.heights()[self.root]

    @property
    def rsize(self) -> int:
        n = len(self)
        return n * math.ceil(math.log2(n + 1))

    def metrics(self) -> GraphMetrics:
        return GraphMetrics(len(self), self.depth, self.rsize)

    def in_edges(self) -> dict[int, list[tuple[int, int]]]:
        """node -> list of (parent, 1-based argument index)."""
        c = self._cache.get("in_edges")
        if c is None:
            c = {u: [] for u in self._label}
            for u in self.nodes:
                for i, v in enumerate(self._succ[u], 1):
                    c[v].append((u, i))
            self._cache["in_edges"] = c
        return c

    def reachable(self, u: int) -> set[int]:
        if u not in self._label:
            raise GraphError(f"unknown node {u}")
        seen = {u}
        todo = [u]
        while todo:
            for v in self._succ[todo.pop()]:
                if v not in seen:
                    seen.add(v)
                    todo.append(v)
        return seen

    # -- canonical form and output -----------------------------------------

    def canonical(self) -> tuple:
        """Isomorphism-invariant key: preorder renumbering from the root."""
        c = self._cache.get("canon")
        if c is not None:
            return c
        ids: dict[int, int] = {}
        order: list[int] = []
        stack = [self.root]
        while stack:
            u = stack.pop()
            if u in ids:
                continue
            ids[u] = len(order) + 1
            order.append(u)
            stack.extend(reversed(self._succ[u]))
        out = []
        for u in order:
            lab = self._label[u]
            key = ("v", lab.name) if isinstance(lab, Var) else (lab.name, lab.arity)
            out.append((key, tuple(ids[v] for v in self._succ[u])))
        c = self._cache["canon"] = tuple(out)
        return c

    def renumbered(self) -> "TermGraph":
        """The isomorphic graph with ids 1..n in root-first preorder."""
        ids: dict[int, int] = {}
        stack = [self.root]
        while stack:
            u = stack.pop()
            if u in ids:
                continue
            ids[u] = len(ids) + 1
            stack.extend(reversed(self._succ[u]))
        return TermGraph({ids[u]: l for u, l in self._label.items()},
                         {ids[u]: [ids[v] for v in s] for u, s in self._succ.items()},
                         1, check=False)

    def dump(self) -> str:
        """Increasing list of node specifications ``⟨id, label, [succs]⟩``."""
        parts = []
        for u, lab, s in self.specs():
            parts.append(f"⟨{u}, {_label_str(lab)}, [{', '.join(map(str, s))}]⟩")
        return f"root {self.root}: " + " ".join(parts)

    def to_dot(self, name: str = "G") -> str:
        lines = [f"digraph {name} {{", "  node [shape=circle];"]
        for u, lab, s in self.specs():
            shape = ", shape=box" if isinstance(lab, Var) else ""
            peri = ", peripheries=2" if u == self.root else ""
            lines.append(f'  {u} [label="{_escape(_label_str(lab))}"{shape}{peri}];')
        for u, _, s in self.specs():
            for i, v in enumerate(s, 1):
                lines.append(f'  {u} -> {v} [label="{i}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {
            "root": self.root,
            "variables": sorted(self.variable_nodes()),
            "nodes": [[u, _label_str(lab), list(s)] for u, lab, s in self.specs()],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "TermGraph":
        vs = set(data.get("variables", ()))
        labels, succs = {}, {}
        for u, name, s in data["nodes"]:
            labels[u] = Var(name) if name in vs else FunSym(name, len(s))
            succs[u] = s
        return cls(labels, succs, data["root"])


def _label_str(lab: Label) -> str:
    return lab.name


def _escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


def graph(specs: Mapping[int, tuple[str, Sequence[int]]], root: int | None = None,
          variables: Iterable[str] = ()) -> TermGraph:
    """Convenience constructor: ``graph({1: ('f', [2]), 2: ('x', [])}, variables='x')``.

    Arities are taken from the successor lists.  The root defaults to the
    smallest id.
    """
    vs = set(variables)
    labels, succs = {}, {}
    for u, (name, s) in specs.items():
        labels[u] = Var(name) if name in vs else FunSym(name, len(s))
        succs[u] = tuple(s)
    return TermGraph(labels, succs, min(specs) if root is None else root)


# -- reading back and building from terms ------------------------------------

def term_size(S: TermGraph, u: int | None = None) -> int:
    """Size of the represented term, computed without unravelling."""
    sizes: dict[int, int] = {}
    for v in reversed(S.topological_order()):
        sizes[v] = 1 + sum(sizes[w] for w in S.succ(v))
    return sizes[S.root if u is None else u]


def read_term(S: TermGraph, u: int | None = None, max_size: int | None = None) -> Term:
    """The term represented by ``S`` (or by the subgraph at ``u``).

    Subterms that are shared in the graph are shared in memory too, so the
    result is cheap to build; ``max_size`` guards callers that will walk it.
    """
    start = S.root if u is None else u
    if start not in S:
        raise GraphError(f"unknown node {start}")
    if max_size is not None:
        n = term_size(S, start)
        if n > max_size:
            raise TermTooLarge(f"represented term has {n} symbols (cap {max_size})")
    memo = S._cache.get("terms")
    if memo is None:
        memo = S._cache["terms"] = {}
        for v in reversed(S.topological_order()):
            lab = S.label(v)
            memo[v] = lab if isinstance(lab, Var) else App(lab, [memo[w] for w in S.succ(v)])
    return memo[start]


def mk_tree(t: Term, start: int = 1) -> TermGraph:
    """A minimally sharing graph for ``t``: ids in preorder, variables shared."""
    labels: dict[int, Label] = {}
    succs: dict[int, tuple[int, ...]] = {}
    var_ids: dict[str, int] = {}
    counter = [start]

    def go(s: Term) -> int:
        if isinstance(s, Var):
            u = var_ids.get(s.name)
            if u is None:
                u = var_ids[s.name] = counter[0]
                counter[0] += 1
                labels[u], succs[u] = s, ()
            return u
        u = counter[0]
        counter[0] += 1
        labels[u] = s.sym
        succs[u] = tuple(go(a) for a in s.args)
        return u

    root = go(t)
    return TermGraph(labels, succs, root, check=False)


def mk_shared(t: Term) -> TermGraph:
    """The maximally sharing graph for ``t`` (hash-consing), ids in preorder."""
    labels: dict[int, Label] = {}
    succs: dict[int, tuple[int, ...]] = {}
    table: dict[tuple, int] = {}

    def go(s: Term) -> int:
        if isinstance(s, Var):
            key = ("v", s.name)
            lab, kids = s, ()
        else:
            kids = tuple(go(a) for a in s.args)
            key = (s.sym, kids)
            lab = s.sym
        u = table.get(key)
        if u is None:
            u = table[key] = len(table) + 1
            labels[u], succs[u] = lab, kids
        return u

    root = go(t)
    return TermGraph(labels, succs, root, check=False).renumbered()


# -- positions ------------------------------------------------------------

def positions_of(S: TermGraph, u: int) -> set[Position]:
    if u not in S:
        raise GraphError(f"unknown node {u}")
    pos: dict[int, set[Position]] = {S.root: {()}}
    for v in S.topological_order():
        pv = pos.get(v)
        if pv is None or v == u:
            continue
        for i, w in enumerate(S.succ(v), 1):
            pos.setdefault(w, set()).update(p + (i,) for p in pv)
    return pos.get(u, set())


def position_count(S: TermGraph) -> dict[int, int]:
    """Number of positions of every node (cheap sharing test: count > 1)."""
    cnt = {u: 0 for u in S.nodes}
    cnt[S.root] = 1
    for v in S.topological_order():
        for w in S.succ(v):
            cnt[w] += cnt[v]
    return cnt


def all_positions(S: TermGraph) -> Iterator[tuple[Position, int]]:
    """Every position of the represented term with its node, in preorder."""
    stack = [((), S.root)]
    while stack:
        p, u = stack.pop()
        yield p, u
        s = S.succ(u)
        for i in range(len(s), 0, -1):
            stack.append((p + (i,), s[i - 1]))


def canonical_positions(S: TermGraph) -> dict[int, Position]:
    """For every node its least position in length-lexicographic order."""
    out = {S.root: ()}
    queue = deque([S.root])
    while queue:
        u = queue.popleft()
        for i, v in enumerate(S.succ(u), 1):
            if v not in out:
                out[v] = out[u] + (i,)
                queue.append(v)
    return out


def node_at(S: TermGraph, p: Position) -> int:
    u = S.root
    for depth, i in enumerate(p):
        s = S.succ(u)
        if not 1 <= i <= len(s):
            raise GraphError(f"position {list(p)} invalid (index {depth})")
        u = s[i - 1]
    return u


def is_shared(S: TermGraph, u: int) -> bool:
    return position_count(S)[u] > 1


# -- subgraphs and replacement ---------------------------------------------

def subgraph_at(S: TermGraph, u: int) -> TermGraph:
    keep = S.reachable(u)
    return TermGraph({v: S.label(v) for v in keep}, {v: S.succ(v) for v in keep},
                     u, check=False)


def _properly_sharing(S: TermGraph, H: TermGraph) -> None:
    for v in H.nodes:
        if v in S and (S.label(v) != H.label(v) or S.succ(v) != H.succ(v)):
            raise GraphError(f"graphs disagree on shared node {v}")


def redirect(S: TermGraph, u: int, v: int) -> tuple[dict, dict]:
    """Redirect every edge into ``u`` to ``v`` and drop ``u`` (as raw dicts)."""
    labels = {w: l for w, l in S._label.items() if w != u}
    succs = {}
    for w, s in S._succ.items():
        if w != u:
            succs[w] = tuple(v if x == u else x for x in s) if u in s else s
    return labels, succs


def _restrict(labels: dict, succs: dict, root: int) -> TermGraph:
    keep = {root}
    todo = [root]
    while todo:
        for v in succs[todo.pop()]:
            if v not in keep:
                keep.add(v)
                todo.append(v)
    return TermGraph({v: labels[v] for v in keep}, {v: succs[v] for v in keep}, root)


def replace_at(S: TermGraph, u: int, H: TermGraph) -> TermGraph:
    """``S[u <- H]``: redirect ``u`` to the root of ``H``, add ``H``, collect garbage."""
    if u not in S:
        raise GraphError(f"unknown node {u}")
    if u in H:
        raise GraphError(f"node {u} occurs in the replacing graph")
    _properly_sharing(S, H)
    v = H.root
    labels, succs = redirect(S, u, v)
    for w, lab, s in H.specs():
        labels[w] = lab
        succs[w] = s
    root = v if u == S.root else S.root
    return _restrict(labels, succs, root)


def union(S: TermGraph, H: TermGraph, root: int) -> TermGraph:
    """The subgraph of ``S ∪ H`` reachable from ``root``."""
    _properly_sharing(S, H)
    labels, succs = dict(S._label), dict(S._succ)
    labels.update(H._label)
    succs.update(H._succ)
    return _restrict(labels, succs, root)


# -- morphisms ----------------------------------------------------------------

def match_at(L: TermGraph, S: TermGraph, u: int) -> Morphism | None:
    """Top-down construction of a morphism from ``L`` into ``S`` rooted at ``u``."""
    m = {L.root: u}
    todo = [L.root]
    while todo:
        a = todo.pop()
        lab = L.label(a)
        if isinstance(lab, Var):
            continue
        b = m[a]
        if S.label(b) != lab:
            return None
        for x, y in zip(L.succ(a), S.succ(b)):
            img = m.get(x)
            if img is None:
                m[x] = y
                todo.append(x)
            elif img != y:
                return None
    return m


def find_morphism(L: TermGraph, S: TermGraph) -> Morphism | None:
    return match_at(L, S, S.root)


def is_morphism(m: Mapping[int, int], L: TermGraph, S: TermGraph, root: int | None = None) -> bool:
    if set(m) != set(L.nodes) or m[L.root] != (S.root if root is None else root):
        return False
    for a in L.nodes:
        if m[a] not in S:
            return False
        if L.is_var_node(a):
            continue
        if L.label(a) != S.label(m[a]) or tuple(m[x] for x in L.succ(a)) != S.succ(m[a]):
            return False
    return True


def induced_substitution(m: Mapping[int, int], L: TermGraph, S: TermGraph) -> dict[str, Term]:
    return {L.label(a).name: read_term(S, m[a]) for a in L.nodes if L.is_var_node(a)}


def is_isomorphic(S: TermGraph, T: TermGraph) -> bool:
    """Synchronised traversal from both roots building a bijection."""
    if len(S) != len(T):
        return False
    fwd = {S.root: T.root}
    bwd = {T.root: S.root}
    todo = [S.root]
    while todo:
        a = todo.pop()
        b = fwd[a]
        if S.label(a) != T.label(b):
            return False
        sa, sb = S.succ(a), T.succ(b)
        if len(sa) != len(sb):
            return False
        for x, y in zip(sa, sb):
            fx, by = fwd.get(x), bwd.get(y)
            if fx is None and by is None:
                fwd[x], bwd[y] = y, x
                todo.append(x)
            elif fx != y or by != x:
                return False
    return len(fwd) == len(S)
