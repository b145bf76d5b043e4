"""Terms denoting countable coloured linear orders, with a canonical normal form.

A term is one of

- ``Singleton(tag)`` — a single point.  Tag ``"1"`` is the uncoloured point,
  ``"I"`` is the reserved irrational-point marker, any other tag is a colour.
- ``Concat(factors)`` — the ordered sum of two or more factors, left to right.
- ``Shuffle(constituents)`` — the dense shuffle of a finite set of
  constituents: a dense, unbounded interleaving in which between any two
  points there is a stretch of every constituent.

Two terms denote isomorphic orders iff they have the same normal form
(:func:`normalize`).  The rewrite system behind the normal form has four
sound steps; the first two (constituent-set ordering and de-duplication) are
baked into the :class:`Shuffle` constructor, the other two are

- absorbing a nested shuffle whose constituent set already covers its
  siblings, and
- collapsing ``S ^ t ^ S`` to ``S`` when ``S`` is a shuffle and ``t`` is
  empty or a single constituent of ``S``.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from .errors import BudgetError, ParseError
from .posets import FinPoset

__all__ = [
    "Singleton",
    "Shuffle",
    "Concat",
    "Term",
    "OrbitDescriptor",
    "term_key",
    "shuffle",
    "concat",
    "factors",
    "is_finite",
    "min_size",
    "normalize",
    "is_normal",
    "equivalent",
    "applicable_rewrites",
    "law4_redexes",
    "collapse_factors",
    "parse_term",
    "render_term",
    "one_orbits",
    "orbit_paths",
    "subterm_at",
    "initial_segment",
    "final_segment",
    "materialize",
]

UNCOLOURED = "1"
IRRATIONAL = "I"


@dataclass(frozen=True)
class Singleton:
    tag: str


@dataclass(frozen=True)
class Shuffle:
    constituents: Tuple["Term", ...]


@dataclass(frozen=True)
class Concat:
    factors: Tuple["Term", ...]


Term = Union[Singleton, Shuffle, Concat]


def term_key(t: Term):
    """Total order on terms: singletons < shuffles < concatenations,
    recursively lexicographic within each kind."""
    if isinstance(t, Singleton):
        return (0, t.tag)
    if isinstance(t, Shuffle):
        return (1, tuple(term_key(c) for c in t.constituents))
    return (2, tuple(term_key(f) for f in t.factors))


def shuffle(constituents: Iterable[Term]) -> Shuffle:
    """Smart constructor: sorts and de-duplicates the constituent set."""
    items = sorted(set(constituents), key=term_key)
    if not items:
        raise ValueError("shuffle needs at least one constituent")
    return Shuffle(tuple(items))


def concat(parts: Iterable[Term]) -> Term:
    """Smart constructor: flattens nested concatenations, drops the wrapper
    for a single part."""
    flat: List[Term] = []
    for p in parts:
        if isinstance(p, Concat):
            flat.extend(p.factors)
        else:
            flat.append(p)
    if not flat:
        raise ValueError("empty concatenation")
    if len(flat) == 1:
        return flat[0]
    return Concat(tuple(flat))


def factors(t: Term) -> Tuple[Term, ...]:
    """Top-level factor list (a non-concatenation is its own single factor)."""
    if isinstance(t, Concat):
        return t.factors
    return (t,)


def is_finite(t: Term) -> bool:
    """True iff the denoted order is finite (no shuffle anywhere)."""
    if isinstance(t, Singleton):
        return True
    if isinstance(t, Shuffle):
        return False
    return all(is_finite(f) for f in t.factors)


def min_size(t: Term) -> int:
    """Smallest sample size that contains every constituent at least once.
    For a finite term this is its exact size."""
    if isinstance(t, Singleton):
        return 1
    if isinstance(t, Shuffle):
        return sum(min_size(c) for c in t.constituents)
    return sum(min_size(f) for f in t.factors)


# ---------------------------------------------------------------------------
# rewriting and normal form


def law4_redexes(fs: Sequence[Term]) -> List[Tuple[int, int]]:
    """Positions ``(i, j)`` in the factor list where ``fs[i] == fs[j]`` is a
    shuffle and the factors strictly between them are empty or concatenate to
    a single constituent of that shuffle."""
    out = []
    for i, f in enumerate(fs):
        if not isinstance(f, Shuffle):
            continue
        js = {i + 1}
        for c in f.constituents:
            js.add(i + 1 + len(factors(c)))
        for j in sorted(js):
            if j >= len(fs) or fs[j] != f:
                continue
            seg = fs[i + 1 : j]
            if not seg or concat(seg) in f.constituents:
                out.append((i, j))
    return sorted(out)


def collapse_factors(fs: Sequence[Term]) -> List[Term]:
    """Apply flanked-shuffle collapses until none remain."""
    fs = list(fs)
    while True:
        rs = law4_redexes(fs)
        if not rs:
            return fs
        i, j = rs[0]
        fs = fs[: i + 1] + fs[j + 1 :]


def _absorbing_constituent(s: Shuffle) -> Optional[Shuffle]:
    """The nested shuffle constituent that already covers all its siblings,
    if any.  (At most one such constituent can exist.)"""
    cs = set(s.constituents)
    for c in s.constituents:
        if isinstance(c, Shuffle) and cs - {c} <= set(c.constituents):
            return c
    return None


def normalize(t: Term) -> Term:
    """The canonical normal form; two terms denote isomorphic orders iff
    their normal forms are equal."""
    if isinstance(t, Singleton):
        return t
    if isinstance(t, Shuffle):
        s = shuffle(normalize(c) for c in t.constituents)
        inner = _absorbing_constituent(s)
        return inner if inner is not None else s
    fs: List[Term] = []
    for f in t.factors:
        fs.extend(factors(normalize(f)))
    return concat(collapse_factors(fs))


def is_normal(t: Term) -> bool:
    """True iff no rewrite applies anywhere in ``t`` (including the
    representational invariants of hand-built values)."""
    if isinstance(t, Singleton):
        return True
    if isinstance(t, Shuffle):
        if list(t.constituents) != sorted(set(t.constituents), key=term_key):
            return False
        if not all(is_normal(c) for c in t.constituents):
            return False
        return _absorbing_constituent(t) is None
    fs = t.factors
    if len(fs) < 2 or any(isinstance(f, Concat) for f in fs):
        return False
    if not all(is_normal(f) for f in fs):
        return False
    return not law4_redexes(fs)


def equivalent(a: Term, b: Term) -> bool:
    """Do the two terms denote isomorphic orders?"""
    return normalize(a) == normalize(b)


def applicable_rewrites(t: Term) -> List[Tuple[str, Term]]:
    """Every single rewrite step applicable anywhere in ``t``, as
    ``(rule-name, result)`` pairs."""
    out: List[Tuple[str, Term]] = []
    if isinstance(t, Shuffle):
        inner = _absorbing_constituent(t)
        if inner is not None:
            out.append(("absorb-nested-shuffle", inner))
        for idx, c in enumerate(t.constituents):
            for name, r in applicable_rewrites(c):
                new = shuffle(
                    r if k == idx else d for k, d in enumerate(t.constituents)
                )
                out.append((name, new))
    elif isinstance(t, Concat):
        fs = list(t.factors)
        for i, j in law4_redexes(fs):
            out.append(
                ("collapse-flanked-shuffle", concat(fs[: i + 1] + fs[j + 1 :]))
            )
        for idx in range(len(fs)):
            for name, r in applicable_rewrites(fs[idx]):
                out.append((name, concat(fs[:idx] + [r] + fs[idx + 1 :])))
    return out


# ---------------------------------------------------------------------------
# parsing and rendering


_TOKEN = re.compile(r"[A-Za-z_][A-Za-z0-9_]*|[1^(),\[\]*]")


def _tokenize(text: str) -> List[Tuple[str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", column=pos)
        tokens.append((m.group(), pos))
        pos = m.end()
    return tokens


class _TermParser:
    def __init__(self, text: str, alphabet=None):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0
        self.alphabet = None if alphabet is None else set(alphabet)

    def peek(self):
        if self.pos < len(self.tokens):
            return self.tokens[self.pos][0]
        return None

    def here(self) -> int:
        if self.pos < len(self.tokens):
            return self.tokens[self.pos][1]
        return len(self.text)

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, sym: str):
        if self.peek() != sym:
            raise ParseError(f"expected {sym!r}", column=self.here())
        return self.take()

    def term(self) -> Term:
        parts = [self.factor()]
        while self.peek() == "^":
            self.take()
            parts.append(self.factor())
        return concat(parts)

    def factor(self) -> Term:
        tok = self.peek()
        if tok is None:
            raise ParseError("expected a term", column=self.here())
        if tok == "Q":
            self.take()
            if self.peek() != "(":
                raise ParseError(
                    "Q is reserved for shuffles and needs arguments",
                    column=self.here(),
                )
            self.take()
            cs = [self.term()]
            while self.peek() == ",":
                self.take()
                cs.append(self.term())
            self.expect(")")
            return shuffle(cs)
        if tok in "^(),[]*":
            raise ParseError(f"unexpected {tok!r}", column=self.here())
        _, col = self.take()
        if self.alphabet is not None and tok != UNCOLOURED and tok not in self.alphabet:
            raise ParseError(f"tag {tok!r} not in the declared alphabet", column=col)
        return Singleton(tok)


def parse_term(text: str, alphabet=None) -> Term:
    """Parse the textual term syntax: singleton tags, ``a^b`` concatenation,
    ``Q(a, b)`` shuffles.  ``alphabet``, when given, restricts which tags are
    accepted (``"1"`` is always allowed)."""
    p = _TermParser(text, alphabet)
    t = p.term()
    if p.peek() is not None:
        raise ParseError(f"unexpected {p.peek()!r} after term", column=p.here())
    return t


def render_term(t: Term) -> str:
    """Inverse of :func:`parse_term` (up to whitespace)."""
    if isinstance(t, Singleton):
        return t.tag
    if isinstance(t, Shuffle):
        return "Q(" + ",".join(render_term(c) for c in t.constituents) + ")"
    return "^".join(render_term(f) for f in t.factors)


# ---------------------------------------------------------------------------
# orbits of a normal-form term


@dataclass(frozen=True)
class OrbitDescriptor:
    """One orbit of the automorphism group on points, identified by the
    address ``path`` of the corresponding singleton / shuffle-constituent
    slot inside the term."""

    index: int
    path: Tuple[int, ...]


def orbit_paths(t: Term) -> List[Tuple[int, ...]]:
    """Addresses of the singleton leaves of ``t`` in left-to-right reading
    order (shuffle constituents in their canonical order)."""
    if isinstance(t, Singleton):
        return [()]
    if isinstance(t, Shuffle):
        return [
            (i,) + p
            for i, c in enumerate(t.constituents)
            for p in orbit_paths(c)
        ]
    return [(i,) + p for i, f in enumerate(t.factors) for p in orbit_paths(f)]


def one_orbits(t: Term) -> List[OrbitDescriptor]:
    """The 1-orbits of the denoted order.  For a normal-form term these are
    exactly the singleton leaves, one orbit per address."""
    if not is_normal(t):
        raise ValueError("one_orbits requires a term in normal form")
    return [OrbitDescriptor(i, p) for i, p in enumerate(orbit_paths(t))]


def subterm_at(t: Term, path: Sequence[int]) -> Term:
    for i in path:
        if isinstance(t, Singleton):
            raise ValueError(f"path {tuple(path)} leaves the term")
        t = (t.constituents if isinstance(t, Shuffle) else t.factors)[i]
    return t


def initial_segment(
    t: Term, path: Sequence[int], strict: bool = False
) -> Optional[Term]:
    """Term for the set of points at or before (strictly before, if
    ``strict``) a point in the leaf at ``path``.  None denotes the empty
    segment."""
    if isinstance(t, Singleton):
        return None if strict else t
    if isinstance(t, Shuffle):
        sub = initial_segment(t.constituents[path[0]], path[1:], strict)
        parts = [t] + ([sub] if sub is not None else [])
        return concat(parts)
    j = path[0]
    sub = initial_segment(t.factors[j], path[1:], strict)
    parts = list(t.factors[:j]) + ([sub] if sub is not None else [])
    return concat(parts) if parts else None


def final_segment(t: Term, path: Sequence[int]) -> Optional[Term]:
    """Term for the set of points strictly after a point in the leaf at
    ``path``.  None denotes the empty segment."""
    if isinstance(t, Singleton):
        return None
    if isinstance(t, Shuffle):
        sub = final_segment(t.constituents[path[0]], path[1:])
        parts = ([sub] if sub is not None else []) + [t]
        return concat(parts)
    j = path[0]
    sub = final_segment(t.factors[j], path[1:])
    parts = ([sub] if sub is not None else []) + list(t.factors[j + 1 :])
    return concat(parts) if parts else None


# ---------------------------------------------------------------------------
# materialization


def _emit(t: Term, budget: int, rng: random.Random, path, out) -> None:
    """Append (path, tag) points for a sample of ``t`` of exactly ``budget``
    points when ``t`` is infinite (caller guarantees budget >= min_size)."""
    if isinstance(t, Singleton):
        out.append((path, t.tag))
        return
    if isinstance(t, Concat):
        allocs = []
        infinite = []
        for i, f in enumerate(t.factors):
            m = min_size(f)
            allocs.append(m)
            if not is_finite(f):
                infinite.append(i)
        leftover = budget - sum(allocs)
        if infinite:
            share, rem = divmod(leftover, len(infinite))
            for k, i in enumerate(infinite):
                allocs[i] += share + (1 if k < rem else 0)
        for i, f in enumerate(t.factors):
            _emit(f, allocs[i], rng, path + (i,), out)
        return
    cs = t.constituents
    mins = [min_size(c) for c in cs]
    remaining = budget
    while remaining >= min(mins):
        order = list(range(len(cs)))
        rng.shuffle(order)
        progressed = False
        for i in order:
            if mins[i] <= remaining:
                _emit(cs[i], mins[i], rng, path + (i,), out)
                remaining -= mins[i]
                progressed = True
        if not progressed:
            break


def materialize(t: Term, budget: int, seed: int = 0):
    """Build a finite sample of the denoted order.

    Returns ``(poset, annotations)``: a totally ordered :class:`FinPoset`
    over ids ``0..n-1`` in order, and a dict mapping each id to the
    :class:`OrbitDescriptor`-style address of the leaf it came from.

    Finite terms are realized exactly.  A shuffle cycles through fresh random
    arrangements of its full constituent set, so every constituent appears
    and (given enough budget) every pair appears in both relative orders.
    Raises :class:`BudgetError` when ``budget`` cannot fit one point of every
    leaf.
    """
    need = min_size(t)
    if budget < need:
        raise BudgetError(
            f"budget {budget} is below the minimum sample size {need}"
        )
    rng = random.Random(seed)
    pts: List[Tuple[Tuple[int, ...], str]] = []
    _emit(t, budget, rng, (), pts)
    n = len(pts)
    path_index = {p: i for i, p in enumerate(orbit_paths(t))}
    colour = {}
    irrational = set()
    annotations = {}
    for node, (path, tag) in enumerate(pts):
        if tag == IRRATIONAL:
            irrational.add(node)
        elif tag != UNCOLOURED:
            colour[node] = tag
        annotations[node] = OrbitDescriptor(path_index[path], path)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    poset = FinPoset(range(n), pairs, colour=colour, irrational=irrational)
    return poset, annotations
