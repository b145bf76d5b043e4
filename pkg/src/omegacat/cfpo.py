"""Cycle-free partial orders on finite diagrams.

A partial order is cycle-free when any two points are linked by at most
one path, where a path is assembled from maximal chains between the
members of a *connecting set* — an alternating zigzag of turning points,
pairwise incomparable except between neighbours.  Paths may pass through
*irrational* points that only exist in the path completion: the smallest
extension closing the order under meets of downward-bounded pairs and
joins of upward-bounded pairs.

The alternating zigzag on ``n`` points and its order reversal measure how
far an order is from a tree: the rank of an order is the largest zigzag
that embeds into it (preserving comparability and incomparability), and
ranked orders reduce to coloured trees for classification purposes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .errors import BudgetError
from .posets import FinPoset, maximal_chains, node_key

__all__ = [
    "AMBIGUOUS",
    "ConnectingSet",
    "AltPattern",
    "join",
    "path_completion",
    "connecting_sets",
    "path",
    "validate_cfpo",
    "alt",
    "embeds_alt",
    "alt_rank",
]

AMBIGUOUS = "ambiguous"

_MAX_COMPLETION_POINTS = 4096


@dataclass(frozen=True)
class ConnectingSet:
    """An alternating tuple of turning points linking two query points.

    ``directions[k]`` is ``"up"`` when ``nodes[k] < nodes[k+1]`` and
    ``"down"`` otherwise; interior nodes reverse direction, and nodes that
    are not neighbours in the tuple are incomparable.
    """

    nodes: Tuple
    directions: Tuple[str, ...]

    def __post_init__(self):
        if len(self.nodes) < 2:
            raise ValueError("a connecting set needs at least two nodes")
        if len(self.directions) != len(self.nodes) - 1:
            raise ValueError("one direction per consecutive pair required")


@dataclass(frozen=True)
class AltPattern:
    """The alternating zigzag on ``length`` points, or its reversal."""

    length: int
    reversed: bool = False

    def __post_init__(self):
        if self.length < 1:
            raise ValueError("pattern length must be >= 1")

    def realize(self) -> FinPoset:
        return alt(self.length, self.reversed)


def _require(p: FinPoset, *xs):
    els = set(p.elements)
    for x in xs:
        if x not in els:
            raise ValueError(f"unknown node {x!r}")


def join(p: FinPoset, x, y):
    """Minimum of the common upper bounds of ``x`` and ``y``, or None
    when the pair is unbounded above or the bound set has no minimum."""
    _require(p, x, y)
    uppers = [t for t in p.elements if p.leq(x, t) and p.leq(y, t)]
    for m in uppers:
        if all(p.leq(m, t) for t in uppers):
            return m
    return None


# ---------------------------------------------------------------------------
# path completion


def _first_defect(p: FinPoset):
    """First pair (in node order) whose forced join or meet is missing."""
    ordered = sorted(p.elements, key=node_key)
    for x, y in itertools.combinations(ordered, 2):
        uppers = [t for t in p.elements if p.leq(x, t) and p.leq(y, t)]
        if uppers and not any(
            all(p.leq(m, t) for t in uppers) for m in uppers
        ):
            return "join", x, y
        lowers = [t for t in p.elements if p.leq(t, x) and p.leq(t, y)]
        if lowers and not any(
            all(p.leq(t, m) for t in lowers) for m in lowers
        ):
            return "meet", x, y
    return None


def _fresh_id(taken, counter):
    while True:
        name = f"i{counter}"
        if name not in taken:
            return name, counter + 1
        counter += 1


def path_completion(p: FinPoset) -> FinPoset:
    """Smallest extension of ``p`` with all forced meets and joins.

    Whenever two points have a common upper bound but no least one, the
    infimum of that bound set is adjoined (dually for lower bounds).  The
    new point sits above exactly the common lower bounds of the bound set
    and below the bound set itself; nothing else is related to it.  Added
    points are flagged irrational and named ``i0``, ``i1``, ... skipping
    names already present.
    """
    cur = p
    counter = 0
    added = 0
    while True:
        defect = _first_defect(cur)
        if defect is None:
            return cur
        kind, x, y = defect
        if kind == "join":
            bound = [t for t in cur.elements if cur.leq(x, t) and cur.leq(y, t)]
            downs = [
                z
                for z in cur.elements
                if all(cur.leq(z, t) for t in bound)
            ]
            ups = bound
        else:
            bound = [t for t in cur.elements if cur.leq(t, x) and cur.leq(t, y)]
            ups = [
                z
                for z in cur.elements
                if all(cur.leq(t, z) for t in bound)
            ]
            downs = bound
        name, counter = _fresh_id(set(cur.elements), counter)
        pairs = (
            list(cur.lt)
            + [(d, name) for d in downs]
            + [(name, u) for u in ups]
        )
        cur = FinPoset(
            list(cur.elements) + [name],
            pairs,
            colour=dict(cur.colour),
            irrational=set(cur.irrational) | {name},
        )
        added += 1
        if added > _MAX_COMPLETION_POINTS:
            raise RuntimeError("path completion did not close")


# ---------------------------------------------------------------------------
# connecting sets and paths


def connecting_sets(p: FinPoset, a, b) -> List[ConnectingSet]:
    """All alternating tuples linking ``a`` to ``b`` in ``p``.

    Neighbouring members are strictly comparable, direction reverses at
    every interior member, and non-neighbours are incomparable (which
    forces all members distinct).  Run this on the path completion when
    interior turning points may be irrational.  Result is sorted by
    length, then by node order.
    """
    _require(p, a, b)
    ordered = sorted(p.elements, key=node_key)
    out: List[ConnectingSet] = []
    bound = 2 * len(p.elements)

    def extend(tup, dirs):
        if len(tup) >= bound:
            return
        last = tup[-1]
        for z in ordered:
            if p.less(last, z):
                d = "up"
            elif p.less(z, last):
                d = "down"
            else:
                continue
            if dirs and d == dirs[-1]:
                continue
            if any(p.comparable(z, c) for c in tup[:-1]):
                continue
            if z == b:
                out.append(ConnectingSet(tup + (z,), dirs + (d,)))
            else:
                extend(tup + (z,), dirs + (d,))

    extend((a,), ())
    out.sort(
        key=lambda cs: (
            len(cs.nodes),
            tuple(node_key(x) for x in cs.nodes),
        )
    )
    return out


def _interval_chains(p: FinPoset, u, v) -> List[frozenset]:
    lo, hi = (u, v) if p.less(u, v) else (v, u)
    nodes = [z for z in p.elements if p.leq(lo, z) and p.leq(z, hi)]
    sub = p.restrict(nodes)
    return [frozenset(ch) for ch in maximal_chains(sub)]


def _paths(p: FinPoset, a, b, limit: int = 2) -> List[frozenset]:
    """Distinct path node-sets between ``a`` and ``b``, at most ``limit``."""
    found: List[frozenset] = []
    for cs in connecting_sets(p, a, b):
        segs = [
            _interval_chains(p, cs.nodes[k], cs.nodes[k + 1])
            for k in range(len(cs.nodes) - 1)
        ]

        def assemble(k, chosen):
            if len(found) >= limit:
                return
            if k == len(segs):
                union = frozenset().union(*chosen)
                if union not in found:
                    found.append(union)
                return
            for seg in segs[k]:
                ok = True
                for i, prev in enumerate(chosen):
                    inter = prev & seg
                    if i == k - 1:
                        if inter != {cs.nodes[k]}:
                            ok = False
                            break
                    elif inter:
                        ok = False
                        break
                if ok:
                    assemble(k + 1, chosen + [seg])

        assemble(0, [])
        if len(found) >= limit:
            break
    return found


def path(p: FinPoset, a, b):
    """The unique path between ``a`` and ``b`` as a frozenset of nodes,
    ``AMBIGUOUS`` when several distinct paths exist, or None when the two
    points cannot be linked.  Run on the path completion."""
    _require(p, a, b)
    if a == b:
        return frozenset({a})
    ps = _paths(p, a, b, limit=2)
    if not ps:
        return None
    if len(ps) > 1:
        return AMBIGUOUS
    return ps[0]


def validate_cfpo(p: FinPoset):
    """Check that every pair of original points has at most one path in
    the path completion.  Returns ``(True, None)`` or ``(False, pair)``
    with the first offending pair in node order."""
    q = path_completion(p)
    for x, y in itertools.combinations(sorted(p.elements, key=node_key), 2):
        if len(_paths(q, x, y, limit=2)) > 1:
            return False, (x, y)
    return True, None


# ---------------------------------------------------------------------------
# the alternating zigzag and its rank


def alt(n: int, reversed: bool = False) -> FinPoset:
    """The alternating zigzag on points ``0..n-1``: odd points sit below
    both neighbours (peaks at even positions).  ``reversed`` flips the
    order, which changes the shape when ``n`` is finite."""
    if n < 1:
        raise ValueError("the zigzag needs at least one point")
    pairs = []
    for i in range(1, n, 2):
        pairs.append((i, i - 1))
        if i + 1 < n:
            pairs.append((i, i + 1))
    if reversed:
        pairs = [(b, a) for (a, b) in pairs]
    return FinPoset(list(range(n)), pairs)


def _tick(counter):
    if counter["left"] is None:
        return
    counter["left"] -= 1
    if counter["left"] < 0:
        raise BudgetError("embedding search budget exhausted")


def _embed(p: FinPoset, pattern: AltPattern, counter) -> Optional[Dict]:
    """Backtracking search for an induced copy of the pattern zigzag."""
    target = alt(pattern.length, pattern.reversed)
    candidates = sorted(p.elements, key=node_key)
    img: Dict[int, object] = {}
    used = set()

    def place(i: int) -> bool:
        if i == pattern.length:
            return True
        for z in candidates:
            _tick(counter)
            if z in used:
                continue
            ok = True
            for j in range(i):
                zj = img[j]
                if target.less(j, i):
                    if not p.less(zj, z):
                        ok = False
                        break
                elif target.less(i, j):
                    if not p.less(z, zj):
                        ok = False
                        break
                elif p.comparable(z, zj):
                    ok = False
                    break
            if ok:
                img[i] = z
                used.add(z)
                if place(i + 1):
                    return True
                used.discard(z)
                del img[i]
        return False

    return dict(img) if place(0) else None


def embeds_alt(
    p: FinPoset, pattern: AltPattern, budget: Optional[int] = None
) -> Optional[Dict]:
    """An induced embedding of the pattern zigzag into ``p`` as a map
    from pattern position to node, or None.  Comparabilities and
    incomparabilities are both preserved.  ``budget`` bounds the number
    of candidate placements tried (BudgetError beyond it)."""
    return _embed(p, pattern, {"left": budget})


def alt_rank(p: FinPoset, budget: int = 200_000) -> int:
    """Largest ``n`` such that the zigzag on ``n`` points (in either
    orientation) embeds into ``p``.  Raises ValueError on the empty
    order and BudgetError (reporting the best lower bound) when the
    search budget runs out."""
    if len(p) == 0:
        raise ValueError("the empty order has no zigzag rank")
    counter = {"left": budget}
    n = 1
    while True:
        nxt = n + 1
        if nxt > len(p):
            break
        try:
            found = _embed(p, AltPattern(nxt, False), counter) or _embed(
                p, AltPattern(nxt, True), counter
            )
        except BudgetError as e:
            raise BudgetError(
                f"zigzag-rank search budget exhausted; best lower bound {n}"
            ) from e
        if found is None:
            break
        n = nxt
    return n
