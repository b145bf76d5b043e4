"""Eventually periodic concatenations of terms, with a canonical form.

A sequence ``[p1, .., pm] * [q1, .., qk] w`` denotes the order
``p1 ^ .. ^ pm ^ (q1 ^ .. ^ qk) ^ (q1 ^ .. ^ qk) ^ ..`` — a finite prefix
followed by an order-type-omega repetition of a period.  ``[p1, .., pm]``
alone denotes the finite concatenation.

:func:`normalize_sequence` brings any such presentation to a canonical
:class:`NfSequence` with one of three tail kinds:

- ``"none"`` — the whole order is denoted by the (normal-form) prefix;
- ``"ones"`` — the prefix is followed by an endless run of uncoloured
  single points (a discrete tail);
- ``"periodic"`` — the prefix is followed by endless repetitions of a
  non-trivial period.

The only infinite presentations that collapse to ``"none"`` are those whose
repetition is absorbed by a shuffle: periods whose cyclic factor word
contains a flanked-shuffle collapse across the junction between copies.
The denoted order has a finite axiomatizable description exactly when the
tail is ``"none"``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple

from .errors import ParseError
from .terms import (
    Shuffle,
    Singleton,
    Term,
    UNCOLOURED,
    _TermParser,
    collapse_factors,
    concat,
    factors,
    final_segment,
    initial_segment,
    law4_redexes,
    normalize,
    orbit_paths,
    render_term,
    term_key,
)

__all__ = [
    "NfSequence",
    "normalize_sequence",
    "is_categorical_chain",
    "parse_sequence",
    "render_sequence",
    "seq_factors",
    "sequence_orbits",
]

_ONE = Singleton(UNCOLOURED)


@dataclass(frozen=True)
class NfSequence:
    """Canonical presentation of an eventually periodic concatenation.

    ``prefix`` and ``period`` are tuples of member terms: maximal finite
    stretches are merged into single factors, so members alternate between
    finite terms and shuffles, with no two finite members adjacent.
    """

    prefix: Tuple[Term, ...]
    tail: str  # "none" | "ones" | "periodic"
    period: Tuple[Term, ...] = field(default=())

    def __post_init__(self):
        if self.tail not in ("none", "ones", "periodic"):
            raise ValueError(f"unknown tail kind {self.tail!r}")
        if self.tail == "periodic" and not self.period:
            raise ValueError("periodic tail needs a period")
        if self.tail != "periodic" and self.period:
            raise ValueError("only a periodic tail carries a period")


def _members(word: Sequence[Term]) -> List[Term]:
    """Merge maximal runs of finite factors into single member terms."""
    out: List[Term] = []
    run: List[Term] = []
    for f in word:
        if isinstance(f, Shuffle):
            if run:
                out.append(concat(run))
                run = []
            out.append(f)
        else:
            run.append(f)
    if run:
        out.append(concat(run))
    return out


def _primitive_root(per: List[Term]) -> List[Term]:
    n = len(per)
    for d in range(1, n + 1):
        if n % d == 0 and per == per[:d] * (n // d):
            return per[:d]
    return per


def _period_redex(per: List[Term]) -> Optional[Tuple[int, int]]:
    """First flanked-shuffle collapse inside the infinite repetition of
    ``per``, located in the doubled word; start position is within the first
    copy."""
    doubled = per + per
    k = len(per)
    for i, j in law4_redexes(doubled):
        if i < k:
            return i, j
    return None


def _prefix_redex(pre: List[Term], per: List[Term]):
    """First collapse whose shuffle start lies in the prefix.  The word is
    extended by two period copies so redexes spanning the junction are
    seen."""
    word = pre + per + per
    for i, j in law4_redexes(word):
        if i < len(pre):
            return i, j
    return None


def _rotate_canonical(pre: List[Term], per: List[Term]):
    """Rotate the period to its canonical starting point, moving the
    rotation head into the prefix.  Periods containing a shuffle start at
    one; all-finite periods use the lexicographically least rotation."""
    starts = [i for i, f in enumerate(per) if isinstance(f, Shuffle)]
    if not starts:
        starts = list(range(len(per)))
    best = min(starts, key=lambda r: [term_key(f) for f in per[r:] + per[:r]])
    return pre + per[:best], per[best:] + per[:best]


def _periodic_pipeline(pre: List[Term], per: List[Term]):
    """Reduce an eventually periodic factor word to canonical form.

    Returns ``(pre, per)`` with ``per = None`` when the repetition was
    absorbed into the prefix (the shuffle flanking each junction swallows
    copy after copy, leaving a finite word).
    """
    for _ in range(200):
        per = _primitive_root(per)
        r = _period_redex(per)
        if r is not None:
            i, j = r
            k = len(per)
            if j < k:
                per = per[: i + 1] + per[j + 1 :]
            else:
                jp = j - k
                pre = pre + per[: i + 1]
                per = per[jp + 1 : i + 1]
                if not per:
                    return pre, None
            continue
        pre, per = _rotate_canonical(pre, per)
        r = _prefix_redex(pre, per)
        if r is None:
            return pre, per
        i, j = r
        if j < len(pre):
            pre = pre[: i + 1] + pre[j + 1 :]
        else:
            m = (j - len(pre) + 1) % len(per)
            pre = pre[: i + 1]
            per = per[m:] + per[:m]
    raise RuntimeError("periodic normalization did not stabilize")


def normalize_sequence(
    prefix: Iterable[Term], period: Optional[Iterable[Term]] = None
) -> NfSequence:
    """Canonical form of ``prefix`` followed by endless repetitions of
    ``period`` (or of the finite ``prefix`` alone when ``period`` is None or
    empty)."""
    pre: List[Term] = []
    for t in prefix:
        pre.extend(factors(normalize(t)))
    per: Optional[List[Term]] = None
    if period is not None:
        per = []
        for t in period:
            per.extend(factors(normalize(t)))
        if not per:
            per = None
    if per is not None:
        pre = collapse_factors(pre)
        pre, per = _periodic_pipeline(pre, per)
    if per is None:
        if not pre:
            raise ValueError("empty sequence")
        word = collapse_factors(pre)
        return NfSequence(tuple(_members(word)), "none")
    while len(pre) >= len(per) and pre[-len(per) :] == per:
        del pre[-len(per) :]
    if per == [_ONE]:
        while pre and pre[-1] == _ONE:
            pre.pop()
        return NfSequence(tuple(_members(pre)), "ones")
    return NfSequence(tuple(_members(pre)), "periodic", tuple(_members(per)))


def is_categorical_chain(s: NfSequence) -> bool:
    """Does the denoted order have a finite description that pins it down
    among countable orders?  Exactly the sequences whose tail collapsed."""
    return s.tail == "none"


def seq_factors(s: NfSequence):
    """The sequence as a flat factor word: ``(prefix_factors, period_factors)``
    with ``period_factors = None`` for a tail-free sequence."""
    pre = [f for m in s.prefix for f in factors(m)]
    if s.tail == "none":
        return pre, None
    if s.tail == "ones":
        return pre, [_ONE]
    return pre, [f for m in s.period for f in factors(m)]


def sequence_orbits(s: NfSequence):
    """Point orbits of the denoted order that live in the prefix.

    Returns ``(orbits, tail_positions)`` where each orbit is a pair
    ``(down, up)``: ``down`` is the normal-form term of the points at or
    below the position, ``up`` the :class:`NfSequence` of the points
    strictly above (None when empty).  ``tail_positions`` is True when the
    sequence has a tail, whose positions form an unbounded family not
    enumerated here.
    """
    orbits = []
    pre_factors = [list(factors(m)) for m in s.prefix]
    if s.tail == "none":
        period = None
    elif s.tail == "ones":
        period = [_ONE]
    else:
        period = [f for m in s.period for f in factors(m)]
    for i, member in enumerate(s.prefix):
        before = [f for fs in pre_factors[:i] for f in fs]
        after = [f for fs in pre_factors[i + 1 :] for f in fs]
        for path in orbit_paths(member):
            down_t = initial_segment(member, path, strict=False)
            down = normalize(concat(before + list(factors(down_t))))
            up_t = final_segment(member, path)
            up_word = (list(factors(up_t)) if up_t is not None else []) + after
            if up_word or period is not None:
                up = normalize_sequence(up_word, period)
            else:
                up = None
            orbits.append((down, up))
    return orbits, s.tail != "none"


def render_sequence(s: NfSequence) -> str:
    body = "[" + ", ".join(render_term(m) for m in s.prefix) + "]"
    if s.tail == "none":
        return body
    if s.tail == "ones":
        return body + " * [1] w"
    return body + " * [" + ", ".join(render_term(m) for m in s.period) + "] w"


def _parse_bracket_list(p: _TermParser) -> List[Term]:
    p.expect("[")
    items: List[Term] = []
    if p.peek() != "]":
        items.append(p.term())
        while p.peek() == ",":
            p.take()
            items.append(p.term())
    p.expect("]")
    return items


def parse_sequence(text: str, alphabet=None) -> NfSequence:
    """Parse ``[t1, .., tn]`` or ``[t1, .., tn] * [u1, .., uk] w`` and
    normalize."""
    p = _TermParser(text, alphabet)
    if p.peek() != "[":
        raise ParseError("a sequence starts with '['", column=p.here())
    prefix = _parse_bracket_list(p)
    period = None
    if p.peek() == "*":
        p.take()
        period = _parse_bracket_list(p)
        if p.peek() != "w":
            raise ParseError(
                "a periodic tail ends with the marker 'w'", column=p.here()
            )
        p.take()
    if p.peek() is not None:
        raise ParseError(
            f"unexpected {p.peek()!r} after sequence", column=p.here()
        )
    return normalize_sequence(prefix, period)
