"""Independent test oracles shared across the suite.

- random term generation with a seeded RNG
- single-step random-order reduction (for confluence checks)
- a sampled back-and-forth soundness check: finite samples of either side
  of a rewrite must embed in the other side's order (equivalent terms
  denote the same order, so a sound step can never fail this)
"""

from __future__ import annotations

import random

from omegacat.terms import (
    Concat,
    Singleton,
    applicable_rewrites,
    concat,
    materialize,
    shuffle,
)


def random_term(rng: random.Random, depth: int, colours=("a", "b", "c")):
    """A random term of nesting depth at most ``depth``."""
    tags = ("1",) + tuple(colours)
    if depth <= 0 or rng.random() < 0.3:
        return Singleton(rng.choice(tags))
    if rng.random() < 0.5:
        k = rng.randint(1, 3)
        return shuffle([random_term(rng, depth - 1, colours) for _ in range(k)])
    k = rng.randint(2, 3)
    return concat([random_term(rng, depth - 1, colours) for _ in range(k)])


def reduce_random(t, rng: random.Random, max_steps: int = 200):
    """Apply applicable rewrites in a random order until none remain."""
    for _ in range(max_steps):
        steps = applicable_rewrites(t)
        if not steps:
            return t
        t = rng.choice(steps)[1]
    raise AssertionError("reduction did not terminate")


def rewrite_trace(t, rng: random.Random, max_steps: int = 200):
    """Like reduce_random but yields every (before, after) step fired."""
    trace = []
    for _ in range(max_steps):
        steps = applicable_rewrites(t)
        if not steps:
            return t, trace
        nxt = rng.choice(steps)[1]
        trace.append((t, nxt))
        t = nxt
    raise AssertionError("reduction did not terminate")


def _leaf_the_label(t):
    """The (colour, irrational) pair a one-point sample of ``t`` carries."""
    if t.tag == "1":
        return (None, False)
    if t.tag == "I":
        return (None, True)
    return (t.tag, False)


def chain_embeds(labels, t) -> bool:
    """Decide exactly whether a finite coloured chain embeds into the
    countable order denoted by ``t``.

    ``labels`` is the bottom-to-top tuple of (colour, irrational) pairs.
    A singleton absorbs at most one matching point; a concatenation
    splits the chain into consecutive (possibly empty) parts, one per
    factor; a shuffle splits it into consecutive blocks, each embedded in
    some constituent (the dense mixture realises every such pattern).
    """
    from functools import lru_cache

    @lru_cache(maxsize=None)
    def embeds(seg, term):
        if isinstance(term, Singleton):
            if not seg:
                return True
            return len(seg) == 1 and seg[0] == _leaf_the_label(term)
        if isinstance(term, Concat):
            parts = term.factors

            @lru_cache(maxsize=None)
            def split(i, j):
                if j == len(parts):
                    return i == len(seg)
                for k in range(i, len(seg) + 1):
                    if embeds(seg[i:k], parts[j]) and split(k, j + 1):
                        return True
                return False

            return split(0, 0)
        blocks = term.constituents

        @lru_cache(maxsize=None)
        def rest(i):
            if i == len(seg):
                return True
            for k in range(i + 1, len(seg) + 1):
                if any(embeds(seg[i:k], c) for c in blocks) and rest(k):
                    return True
            return False

        return rest(0)

    return embeds(tuple(labels), t)


def samples_agree(t1, t2, budget: int, seed: int) -> bool:
    """A sampled back-and-forth check between two terms.

    Every challenge point of a finite sample of one term must be
    answerable inside the other term's order, jointly with the rest of
    the sample; that is, each sample must embed in the opposing order.
    Both directions are checked.
    """
    p1, _ = materialize(t1, budget=budget, seed=seed)
    p2, _ = materialize(t2, budget=budget, seed=seed + 1)
    l1 = tuple(p1.label(x) for x in range(len(p1)))
    l2 = tuple(p2.label(x) for x in range(len(p2)))
    return chain_embeds(l1, t2) and chain_embeds(l2, t1)
