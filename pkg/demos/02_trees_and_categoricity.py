"""Recursive tree specifications: chain types, the categoricity checker,
ramification tables, finite samples, and the two-orbit tester.

Run with:  python3 demos/02_trees_and_categoricity.py
"""

from omegacat.posets import dump_poset
from omegacat.sequences import render_sequence
from omegacat.trees import (
    annotate_R,
    chain_types,
    check_categorical,
    materialize_tree,
    parse_spec,
    ramification_table,
    two_orbit_equiv,
)

DENSE = "T = spine Q(1) with omega x T at orbit 0\n"
OMEGA = "T = spine 1 with omega x T at orbit 0\n"
VSPEC = "R = spine 1 with 2 x L at orbit 0\nL = spine 1\n"


def show(title):
    print()
    print(f"== {title}")


show("A specification names definitions; each has a spine term and")
print("   attachments of child copies at orbit or cut sites.")
print(DENSE.strip())

show("Maximal chain types are eventually periodic sequences of terms")
for name, text in [("dense", DENSE), ("omega-chain", OMEGA), ("V", VSPEC)]:
    rendered = [render_sequence(t) for t in chain_types(parse_spec(text))]
    print(f"  {name:12} {rendered}")

show("The checker: every chain type must itself be a term (no genuine")
print("   infinite tail), the family must be finite, ramification bounded")
for name, text in [("dense", DENSE), ("omega-chain", OMEGA)]:
    v = check_categorical(parse_spec(text))
    print(f"  {name:12} categorical: {'yes' if v.categorical else 'no'}")
    for r in v.condition_reports:
        mark = "pass" if r.passed else "fail"
        extra = (
            f"  witness {render_sequence(r.witness)}"
            if r.witness is not None and not r.passed
            else ""
        )
        print(f"      {r.name:22} {mark}{extra}")

show("Ramification table of the V shape (two leaves over a root)")
table = ramification_table(parse_spec(VSPEC), cap=3)
for i, t in enumerate(table.chain_types):
    print(f"  type {i}: {render_sequence(t)}")
for count, (m, n) in table.realised:
    print(f"  along type {m}, position {n}: {count} branch(es)")

show("A finite sample of the V shape, with structural annotations")
p = materialize_tree(parse_spec(VSPEC), depth=1, width=2, seed=0)
print(dump_poset(p), end="")
ann = annotate_R(p)
for x in p.elements:
    print(f"  node {x}: {sorted(ann[x])}")

show("Two-orbit test: is (0,1) in the same orbit as (0,2)?")
ok, trace = two_orbit_equiv(p, (0, 1), (0, 2))
print(f"  verdict: {'equivalent' if ok else 'inequivalent'}")
for phase, a, b in trace:
    print(f"  {phase:5} {a} -> {b}")
print("  (the returned map is a full automorphism of the sample)")
