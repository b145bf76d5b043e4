"""Finite labelled posets with brute-force structural oracles.

A :class:`FinPoset` stores a finite strict order, transitively closed, with
two optional node labels: a colour tag and an "irrational" flag.  On top of
it this module provides tree validation (downward linearity plus common
lower bounds), meets, cones and ramification orders, exhaustive
automorphism/orbit enumeration by backtracking, tuple completion under
meets, isomorphism testing with a witness, an exhaustive catalogue of tree
shapes, and a small line-based file format plus DOT output.

Everything here is deliberately brute force and deterministic: it is the
ground-truth oracle the symbolic machinery elsewhere is tested against, so
it must stay simple rather than fast.  Default budgets (12 nodes for the
automorphism search, 10**6 tuples for orbit enumeration) keep worst cases
at desk scale.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .errors import (
    BudgetError,
    CycleError,
    MeetAbsentError,
    NotATreeError,
    ParseError,
)

AUT_NODE_BOUND = 12
ORBIT_TUPLE_BUDGET = 10**6


def node_key(x):
    """Total order on node ids: ints first (numeric), then strings."""
    if isinstance(x, bool):  # bools are ints; keep them out of surprises
        return (0, int(x), "")
    if isinstance(x, int):
        return (0, x, "")
    return (1, 0, str(x))


class FinPoset:
    """A finite strict partial order with optional colour/irrational labels.

    ``lt`` is the full transitively closed set of strict pairs.  Elements are
    kept in a canonical sorted order; construction rejects cycles.
    """

    __slots__ = ("elements", "lt", "colour", "irrational", "_down", "_up")

    def __init__(
        self,
        elements: Iterable,
        pairs: Iterable[tuple],
        colour: Mapping | None = None,
        irrational: Iterable | None = None,
    ):
        els = sorted(set(elements), key=node_key)
        index = set(els)
        rel = set()
        for a, b in pairs:
            if a not in index or b not in index:
                raise ParseError(f"edge references unknown node {a!r} or {b!r}")
            rel.add((a, b))
        # Warshall transitive closure
        succ = {x: {b for (a, b) in rel if a == x} for x in els}
        changed = True
        while changed:
            changed = False
            for x in els:
                grow = set()
                for y in succ[x]:
                    grow |= succ[y] - succ[x]
                if grow:
                    succ[x] |= grow
                    changed = True
        for x in els:
            if x in succ[x]:
                raise CycleError(f"cycle through node {x!r}")
        self.elements = tuple(els)
        self.lt = frozenset((a, b) for a in els for b in succ[a])
        self.colour = dict(colour or {})
        self.irrational = frozenset(irrational or ())
        for x in self.colour:
            if x not in index:
                raise ParseError(f"colour given for unknown node {x!r}")
        for x in self.irrational:
            if x not in index:
                raise ParseError(f"irrational flag for unknown node {x!r}")
        self._down = {x: frozenset(a for (a, b) in self.lt if b == x) for x in els}
        self._up = {x: frozenset(b for (a, b) in self.lt if a == x) for x in els}

    # -- basic queries -----------------------------------------------------

    def less(self, a, b) -> bool:
        return (a, b) in self.lt

    def leq(self, a, b) -> bool:
        return a == b or (a, b) in self.lt

    def comparable(self, a, b) -> bool:
        return a == b or (a, b) in self.lt or (b, a) in self.lt

    def down(self, x) -> frozenset:
        """Strict lower set of ``x``."""
        return self._down[x]

    def up(self, x) -> frozenset:
        """Strict upper set of ``x``."""
        return self._up[x]

    def label(self, x) -> tuple:
        return (self.colour.get(x), x in self.irrational)

    def restrict(self, keep: Iterable) -> "FinPoset":
        keep = set(keep)
        return FinPoset(
            keep,
            [(a, b) for (a, b) in self.lt if a in keep and b in keep],
            colour={x: c for x, c in self.colour.items() if x in keep},
            irrational=self.irrational & keep,
        )

    def relabel(self, mapping: Mapping) -> "FinPoset":
        return FinPoset(
            [mapping[x] for x in self.elements],
            [(mapping[a], mapping[b]) for (a, b) in self.lt],
            colour={mapping[x]: c for x, c in self.colour.items()},
            irrational={mapping[x] for x in self.irrational},
        )

    def __len__(self):
        return len(self.elements)

    def __repr__(self):  # pragma: no cover - debugging aid
        return f"FinPoset({len(self.elements)} nodes, {len(self.lt)} pairs)"


# -------------------------------------------------------------- validation


@dataclass(frozen=True)
class TreeReport:
    ok: bool
    violations: tuple


def validate_tree(p: FinPoset) -> TreeReport:
    """Check the two tree axioms and return witnesses for failures.

    Axiom 1 (downward linearity): any two elements below a common element
    are comparable.  Axiom 2: any two elements have a common lower bound.
    """
    bad = []
    els = p.elements
    for z in els:
        below = sorted(p.down(z) | {z}, key=node_key)
        for x, y in itertools.combinations(below, 2):
            if not p.comparable(x, y):
                bad.append(("down-linearity", (x, y, z)))
    for x, y in itertools.combinations(els, 2):
        if not any(p.leq(t, x) and p.leq(t, y) for t in els):
            bad.append(("common-lower-bound", (x, y)))
    return TreeReport(ok=not bad, violations=tuple(bad))


# -------------------------------------------------------------- meets/cones


def meet(p: FinPoset, x, y):
    """Maximum of the common lower bounds of x and y, or None."""
    common = [t for t in p.elements if p.leq(t, x) and p.leq(t, y)]
    for m in common:
        if all(p.leq(t, m) for t in common):
            return m
    return None


def cones_above(p: FinPoset, t) -> tuple:
    """Partition of the strict upper set of ``t`` into cones.

    Two points above ``t`` share a cone iff their meet lies strictly above
    ``t``.  Requires tree-like input: every pair above ``t`` must have a
    meet.
    """
    above = sorted(p.up(t), key=node_key)
    parent = {x: x for x in above}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in itertools.combinations(above, 2):
        m = meet(p, a, b)
        if m is None:
            raise NotATreeError(f"no meet for {a!r}, {b!r} above {t!r}")
        if p.less(t, m):
            parent[find(a)] = find(b)
    groups: dict = {}
    for x in above:
        groups.setdefault(find(x), []).append(x)
    cones = sorted(
        (tuple(sorted(g, key=node_key)) for g in groups.values()),
        key=lambda c: node_key(c[0]),
    )
    return tuple(cones)


def ramification_order(p: FinPoset, t) -> int:
    return len(cones_above(p, t))


# -------------------------------------------------------------- search core


def _signature(p: FinPoset, x, invariants):
    sig = (p.colour.get(x), x in p.irrational, len(p.down(x)), len(p.up(x)))
    if invariants is not None:
        sig = sig + (invariants.get(x),)
    return sig


def _extend(p: FinPoset, q: FinPoset, order, images, assigned, used, sigs_q, sig_x, find_all, out):
    if len(assigned) == len(order):
        out.append(dict(assigned))
        return not find_all
    x = order[len(assigned)]
    for y in images:
        if y in used or sigs_q[y] != sig_x[x]:
            continue
        ok = True
        for u, v in assigned.items():
            if ((u, x) in p.lt) != ((v, y) in q.lt) or ((x, u) in p.lt) != ((y, v) in q.lt):
                ok = False
                break
        if ok:
            assigned[x] = y
            used.add(y)
            if _extend(p, q, order, images, assigned, used, sigs_q, sig_x, find_all, out):
                return True
            del assigned[x]
            used.discard(y)
    return False


def _search(p: FinPoset, q: FinPoset, find_all: bool, invariants_p=None, invariants_q=None):
    if len(p) != len(q):
        return []
    sig_p = {x: _signature(p, x, invariants_p) for x in p.elements}
    sig_q = {y: _signature(q, y, invariants_q) for y in q.elements}
    if sorted(sig_p.values(), key=repr) != sorted(sig_q.values(), key=repr):
        return []
    # most-constrained-first ordering: rare signatures first, then node id
    freq: dict = {}
    for s in sig_p.values():
        freq[s] = freq.get(s, 0) + 1
    order = sorted(p.elements, key=lambda x: (freq[sig_p[x]], node_key(x)))
    out: list = []
    _extend(p, q, order, q.elements, {}, set(), sig_q, sig_p, find_all, out)
    return out


def automorphisms(p: FinPoset, bound: int = AUT_NODE_BOUND, invariants=None) -> list:
    """All label- and order-preserving permutations, canonically sorted.

    ``invariants`` may map nodes to extra hashable labels that automorphisms
    must additionally preserve.  Raises BudgetError beyond ``bound`` nodes.
    """
    if len(p) > bound:
        raise BudgetError(f"automorphism search limited to {bound} nodes, got {len(p)}")
    maps = _search(p, p, find_all=True, invariants_p=invariants, invariants_q=invariants)
    maps.sort(key=lambda f: tuple(node_key(f[x]) for x in p.elements))
    return maps


def is_isomorphic(a: FinPoset, b: FinPoset, bound: int = AUT_NODE_BOUND):
    """(flag, witness map a->b or None)."""
    if len(a) > bound or len(b) > bound:
        raise BudgetError(f"isomorphism search limited to {bound} nodes")
    found = _search(a, b, find_all=False)
    if found:
        return True, found[0]
    return False, None


@dataclass(frozen=True)
class OrbitReport:
    arity: int
    orbits: tuple  # tuple of orbits; each orbit a sorted tuple of tuples
    count: int


def orbits(p: FinPoset, n: int, budget: int = ORBIT_TUPLE_BUDGET, bound: int = AUT_NODE_BOUND) -> OrbitReport:
    """Exhaustive n-tuple orbits under the full automorphism group."""
    total = len(p) ** n
    if total > budget:
        raise BudgetError(f"{total} tuples exceed budget {budget}")
    auts = automorphisms(p, bound=bound)
    seen = set()
    orbs = []
    for tup in itertools.product(p.elements, repeat=n):
        if tup in seen:
            continue
        orbit = {tuple(f[x] for x in tup) for f in auts}
        seen |= orbit
        orbs.append(tuple(sorted(orbit, key=lambda t: tuple(node_key(x) for x in t))))
    orbs.sort(key=lambda o: tuple(node_key(x) for x in o[0]))
    return OrbitReport(arity=n, orbits=tuple(orbs), count=len(orbs))


def complete_tuple(p: FinPoset, t: Sequence) -> tuple:
    """Close a tuple under meets; added points in ascending node order."""
    have = list(t)
    members = set(have)
    added = set()
    changed = True
    while changed:
        changed = False
        for x, y in itertools.combinations(sorted(members, key=node_key), 2):
            m = meet(p, x, y)
            if m is None:
                raise MeetAbsentError(f"no meet of {x!r} and {y!r} in the poset")
            if m not in members:
                members.add(m)
                added.add(m)
                changed = True
    return tuple(have) + tuple(sorted(added, key=node_key))


# -------------------------------------------------------------- chains


def covers(p: FinPoset) -> tuple:
    """The covering (Hasse) relation, sorted."""
    out = []
    for a, b in p.lt:
        if not any(p.less(a, c) and p.less(c, b) for c in p.elements):
            out.append((a, b))
    out.sort(key=lambda e: (node_key(e[0]), node_key(e[1])))
    return tuple(out)


def maximal_chains(p: FinPoset) -> tuple:
    """All maximal chains, each as a tuple from bottom to top, sorted."""
    cov = covers(p)
    succ: dict = {x: [] for x in p.elements}
    for a, b in cov:
        succ[a].append(b)
    for a in succ:
        succ[a].sort(key=node_key)
    minimal = [x for x in p.elements if not p.down(x)]
    chains = []

    def walk(path):
        nxt = succ[path[-1]]
        if not nxt:
            chains.append(tuple(path))
            return
        for y in nxt:
            walk(path + [y])

    for m in minimal:
        walk([m])
    chains.sort(key=lambda c: tuple(node_key(x) for x in c))
    return tuple(chains)


def chains_between(p: FinPoset, a, b) -> tuple:
    """Maximal chains of the closed interval [a, b] (requires a <= b)."""
    if not p.leq(a, b):
        return ()
    if a == b:
        return ((a,),)
    interval = [x for x in p.elements if p.leq(a, x) and p.leq(x, b)]
    sub = p.restrict(interval)
    return maximal_chains(sub)


# -------------------------------------------------------------- catalogue


@lru_cache(maxsize=None)
def _forest_shapes(total: int, cap_nodes: int) -> tuple:
    """Multisets (sorted tuples) of rooted-tree shapes totalling ``total`` nodes."""
    if total == 0:
        return ((),)
    out = set()
    for size in range(1, min(total, cap_nodes) + 1):
        for shape in _tree_shapes(size):
            for rest in _forest_shapes(total - size, cap_nodes):
                out.add(tuple(sorted((shape,) + rest)))
    return tuple(sorted(out))


@lru_cache(maxsize=None)
def _tree_shapes(n: int) -> tuple:
    """Canonical shapes (nested sorted tuples of child shapes) of rooted trees."""
    if n == 1:
        return ((),)
    return tuple(sorted(_forest_shapes(n - 1, n - 1)))


def _shape_to_poset(shape) -> FinPoset:
    pairs = []
    counter = itertools.count()

    def build(sh, ancestors):
        me = next(counter)
        pairs.extend((a, me) for a in ancestors)
        for child in sh:
            build(child, ancestors + [me])
        return me

    build(shape, [])
    n = next(counter)
    return FinPoset(range(n), pairs)


def all_trees(max_nodes: int) -> list:
    """Exhaustive catalogue of tree posets with 1..max_nodes nodes."""
    out = []
    for n in range(1, max_nodes + 1):
        for shape in _tree_shapes(n):
            out.append(_shape_to_poset(shape))
    return out


# -------------------------------------------------------------- file format


def load_poset(text: str) -> FinPoset:
    """Parse the line-based poset format.

    ``node <id> [colour=<tag>] [irrational]`` declares a node;
    ``edge <a> <b>`` declares a covering pair a < b.  '#' starts a comment.
    """
    nodes: list = []
    colour: dict = {}
    irrational: set = set()
    edges: list = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "node":
            if len(parts) < 2:
                raise ParseError("node line needs an id", lineno)
            name = parts[1]
            if name in set(nodes):
                raise ParseError(f"duplicate node {name!r}", lineno)
            nodes.append(name)
            for opt in parts[2:]:
                if opt == "irrational":
                    irrational.add(name)
                elif opt.startswith("colour="):
                    colour[name] = opt.split("=", 1)[1]
                else:
                    raise ParseError(f"unknown node option {opt!r}", lineno)
        elif parts[0] == "edge":
            if len(parts) != 3:
                raise ParseError("edge line needs exactly two node ids", lineno)
            a, b = parts[1], parts[2]
            known = set(nodes)
            if a not in known or b not in known:
                raise ParseError(f"edge uses undeclared node {a!r} or {b!r}", lineno)
            edges.append((a, b))
        else:
            raise ParseError(f"unknown directive {parts[0]!r}", lineno)
    return FinPoset(nodes, edges, colour=colour, irrational=irrational)


def dump_poset(p: FinPoset) -> str:
    lines = []
    for x in p.elements:
        opts = []
        if x in p.colour:
            opts.append(f"colour={p.colour[x]}")
        if x in p.irrational:
            opts.append("irrational")
        lines.append(" ".join(["node", str(x)] + opts))
    for a, b in covers(p):
        lines.append(f"edge {a} {b}")
    return "\n".join(lines) + "\n"


def _dot_quote(s: str) -> str:
    return '"' + str(s).replace('"', '\\"') + '"'


def to_dot(p: FinPoset, name: str = "poset") -> str:
    """DOT digraph over the covering relation; irrational nodes dashed."""
    lines = [f"digraph {name} {{", "  rankdir=BT;"]
    for x in p.elements:
        attrs = []
        label = str(x)
        if x in p.colour:
            label += f":{p.colour[x]}"
        attrs.append(f"label={_dot_quote(label)}")
        if x in p.irrational:
            attrs.append("style=dashed")
        lines.append(f"  {_dot_quote(x)} [{', '.join(attrs)}];")
    for a, b in covers(p):
        lines.append(f"  {_dot_quote(a)} -> {_dot_quote(b)};")
    lines.append("}")
    return "\n".join(lines) + "\n"
