"""Tests for the finite-poset core: tree validation, meets, cones,
brute-force automorphism/orbit oracles, and the poset file format.

Expected values are frozen: tiny cases are worked by hand, and the
automorphism/orbit machinery is cross-checked against an independent
permutation-filter oracle defined in this file.
"""

from __future__ import annotations

import itertools
import random

import pytest

from omegacat.errors import BudgetError, CycleError, NotATreeError, ParseError
from omegacat.posets import (
    FinPoset,
    all_trees,
    automorphisms,
    complete_tuple,
    cones_above,
    covers,
    dump_poset,
    is_isomorphic,
    load_poset,
    maximal_chains,
    meet,
    orbits,
    ramification_order,
    to_dot,
    validate_tree,
)


# ---------------------------------------------------------------- fixtures


def chain(n, colours=None):
    els = list(range(n))
    pairs = [(i, j) for i in els for j in els if i < j]
    return FinPoset(els, pairs, colour=colours or {})


def v_poset():
    # r below two incomparable leaves a, b
    return FinPoset(["a", "b", "r"], [("r", "a"), ("r", "b")])


def n_poset():
    # a < b, c < b, c < d  (the classic N shape)
    return FinPoset(["a", "b", "c", "d"], [("a", "b"), ("c", "b"), ("c", "d")])


def antichain(n):
    return FinPoset(list(range(n)), [])


def bowtie():
    # a, b both below x and y; a || b, x || y
    return FinPoset(
        ["a", "b", "x", "y"],
        [("a", "x"), ("a", "y"), ("b", "x"), ("b", "y")],
    )


def leg_poset():
    # 3-chain 0 < 1 < 2 with an extra leaf 3 above 0
    return FinPoset([0, 1, 2, 3], [(0, 1), (1, 2), (0, 3)])


def brute_automorphisms(p):
    """Independent oracle: filter all |p|! permutations."""
    els = list(p.elements)
    out = []
    for perm in itertools.permutations(els):
        f = dict(zip(els, perm))
        if any(p.colour.get(x) != p.colour.get(f[x]) for x in els):
            continue
        if any((x in p.irrational) != (f[x] in p.irrational) for x in els):
            continue
        if all(((f[x], f[y]) in p.lt) == ((x, y) in p.lt) for x in els for y in els):
            out.append(f)
    return out


# ---------------------------------------------------------------- structure


def test_transitive_closure_and_elements_are_canonical():
    p = FinPoset([2, 0, 1], [(0, 1), (1, 2)])
    assert p.elements == (0, 1, 2)
    assert (0, 2) in p.lt  # closed transitively


def test_cycle_rejected():
    with pytest.raises(CycleError):
        FinPoset([0, 1], [(0, 1), (1, 0)])


def test_validate_tree_accepts_chains_and_v():
    assert validate_tree(chain(4)).ok
    assert validate_tree(v_poset()).ok
    assert validate_tree(FinPoset([0], [])).ok


def test_validate_tree_rejects_n_poset_with_witnesses():
    rep = validate_tree(n_poset())
    assert not rep.ok
    kinds = {v[0] for v in rep.violations}
    assert "down-linearity" in kinds  # a, c below b but a || c
    assert "common-lower-bound" in kinds  # a, d share no lower bound


def test_validate_tree_rejects_antichain():
    rep = validate_tree(antichain(2))
    assert not rep.ok
    assert {v[0] for v in rep.violations} == {"common-lower-bound"}


# ---------------------------------------------------------------- meet / cones


def test_meet_in_v_and_chain():
    p = v_poset()
    assert meet(p, "a", "b") == "r"
    assert meet(p, "r", "a") == "r"
    assert meet(p, "a", "a") == "a"
    c = chain(3)
    assert meet(c, 0, 2) == 0


def test_meet_absent_in_bowtie():
    assert meet(bowtie(), "x", "y") is None  # {a, b} has no maximum


def test_cones_and_ramification_order():
    p = leg_poset()
    assert cones_above(p, 0) == ((1, 2), (3,))
    assert ramification_order(p, 0) == 2
    assert ramification_order(p, 1) == 1
    assert ramification_order(p, 2) == 0


def test_cones_rejects_non_tree():
    with pytest.raises(NotATreeError):
        cones_above(bowtie(), "a")


# ---------------------------------------------------------------- automorphisms


def test_automorphism_counts_frozen():
    assert len(automorphisms(antichain(3))) == 6
    assert len(automorphisms(chain(3))) == 1
    assert len(automorphisms(v_poset())) == 2
    star = FinPoset(list(range(4)), [(0, 1), (0, 2), (0, 3)])
    assert len(automorphisms(star)) == 6


def test_automorphisms_respect_colour_and_irrational():
    p = FinPoset(["a", "b", "r"], [("r", "a"), ("r", "b")], colour={"a": "red"})
    assert len(automorphisms(p)) == 1
    q = FinPoset(["a", "b", "r"], [("r", "a"), ("r", "b")], irrational={"a"})
    assert len(automorphisms(q)) == 1


def test_automorphisms_match_permutation_oracle_on_random_posets():
    rng = random.Random(7)
    for _ in range(25):
        n = rng.randint(1, 5)
        els = list(range(n))
        pairs = [(i, j) for i in els for j in els if i < j and rng.random() < 0.4]
        try:
            p = FinPoset(els, pairs)
        except CycleError:  # pragma: no cover - pairs above are acyclic
            continue
        got = automorphisms(p)
        want = brute_automorphisms(p)
        assert len(got) == len(want)
        assert {tuple(sorted(f.items())) for f in got} == {
            tuple(sorted(f.items())) for f in want
        }


def test_automorphisms_form_a_group():
    for p in (v_poset(), leg_poset(), antichain(3)):
        auts = automorphisms(p)
        keys = {tuple(sorted(f.items())) for f in auts}
        for f in auts:
            for g in auts:
                comp = {x: g[f[x]] for x in p.elements}
                assert tuple(sorted(comp.items())) in keys


def test_automorphism_node_bound():
    with pytest.raises(BudgetError):
        automorphisms(antichain(13))
    assert len(automorphisms(antichain(4), bound=20)) == 24


# ---------------------------------------------------------------- orbits


def test_orbit_report_v():
    rep1 = orbits(v_poset(), 1)
    assert rep1.count == 2
    assert rep1.orbits == ((("a",), ("b",)), (("r",),))
    rep2 = orbits(v_poset(), 2)
    assert rep2.count == 5  # (a,a)/(b,b); (a,b)/(b,a); (a,r)/(b,r); (r,a)/(r,b); (r,r)


def test_orbits_chain_all_singletons():
    rep = orbits(chain(3), 2)
    assert rep.count == 9  # rigid: every tuple its own orbit


def test_orbits_budget():
    with pytest.raises(BudgetError):
        orbits(antichain(10), 7, budget=10**6)


# ---------------------------------------------------------------- completion


def test_complete_tuple_adds_meet():
    p = leg_poset()
    assert complete_tuple(p, (3, 2)) == (3, 2, 0)
    assert complete_tuple(p, (3, 2, 0)) == (3, 2, 0)  # idempotent
    assert complete_tuple(p, (1, 2)) == (1, 2)  # already closed


def test_complete_tuple_every_tuple_completes_in_catalogue():
    for p in all_trees(5):
        for tup in itertools.product(p.elements, repeat=2):
            c = complete_tuple(p, tup)
            assert set(tup) <= set(c)
            # closed under meet
            for x, y in itertools.combinations(c, 2):
                assert meet(p, x, y) in c


# ---------------------------------------------------------------- isomorphism


def test_is_isomorphic_basic():
    ok, wit = is_isomorphic(chain(3), FinPoset(["x", "y", "z"], [("z", "y"), ("y", "x")]))
    assert ok
    assert wit == {0: "z", 1: "y", 2: "x"}
    ok, wit = is_isomorphic(chain(3), v_poset())
    assert not ok and wit is None


def test_is_isomorphic_respects_labels():
    a = FinPoset([0], [], colour={0: "red"})
    b = FinPoset([0], [])
    assert not is_isomorphic(a, b)[0]
    c = FinPoset([0], [], irrational={0})
    assert not is_isomorphic(b, c)[0]


# ---------------------------------------------------------------- chains


def test_maximal_chains():
    assert maximal_chains(v_poset()) == ((("r", "a"), ("r", "b")))
    assert maximal_chains(chain(4)) == (((0, 1, 2, 3),))
    p = leg_poset()
    assert maximal_chains(p) == ((0, 1, 2), (0, 3))


# ---------------------------------------------------------------- catalogue


def test_catalogue_counts_match_hand_enumeration():
    # rooted-tree shape counts for 1..7 nodes, first four checked by hand:
    # 1 node: point; 2: edge; 3: chain, cherry; 4: chain4, Y, cherry+stem, claw
    assert [len(all_trees(n)) - len(all_trees(n - 1)) for n in range(1, 8)] == [
        1, 1, 2, 4, 9, 20, 48,
    ]


def test_catalogue_members_are_valid_and_distinct():
    trees = all_trees(5)
    for p in trees:
        assert validate_tree(p).ok
    for a, b in itertools.combinations(trees, 2):
        if len(a.elements) == len(b.elements):
            assert not is_isomorphic(a, b)[0]


# ---------------------------------------------------------------- file format


POSET_TEXT = """\
# tiny example
node r
node a colour=red
node b irrational
edge r a
edge r b
"""


def test_load_poset_round_trip():
    p = load_poset(POSET_TEXT)
    assert p.elements == ("a", "b", "r")
    assert p.colour == {"a": "red"}
    assert p.irrational == frozenset({"b"})
    assert ("r", "a") in p.lt
    q = load_poset(dump_poset(p))
    assert q.elements == p.elements and q.lt == p.lt
    assert q.colour == p.colour and q.irrational == p.irrational


def test_load_poset_errors():
    with pytest.raises(ParseError):
        load_poset("node a\nedge a b\n")  # unknown node b
    with pytest.raises(ParseError):
        load_poset("nod a\n")
    with pytest.raises(ParseError):
        load_poset("node a\nnode a\n")  # duplicate
    with pytest.raises(CycleError):
        load_poset("node a\nnode b\nedge a b\nedge b a\n")


def test_edges_are_covering_relation_on_dump():
    p = chain(3)
    text = dump_poset(p)
    assert "edge 0 1" in text and "edge 1 2" in text and "edge 0 2" not in text


def test_covers():
    assert covers(chain(3)) == ((0, 1), (1, 2))


def test_dot_output_marks_irrational_dashed():
    p = load_poset(POSET_TEXT)
    dot = to_dot(p)
    assert dot.startswith("digraph")
    assert "dashed" in dot
    # deterministic
    assert dot == to_dot(load_poset(POSET_TEXT))
