"""Linear-order terms: parsing, rewriting, normal forms, and sampling.

Run with:  python3 demos/01_terms_and_normal_forms.py
"""

from omegacat.posets import dump_poset
from omegacat.terms import (
    applicable_rewrites,
    equivalent,
    materialize,
    normalize,
    one_orbits,
    parse_term,
    render_term,
    subterm_at,
)


def show(title):
    print()
    print(f"== {title}")


show("Terms denote countable coloured linear orders")
print("  1        a single uncoloured point")
print("  a        a single point coloured 'a'")
print("  x^y      every point of x below every point of y")
print("  Q(x,y)   a dense shuffle: copies of x and y densely interleaved")

show("Normalization collapses redundant spellings")
for text in ["Q(1,1)", "Q(1,Q(1))", "Q(1)^Q(1)", "Q(1)^1^Q(1)", "a^Q(a,b)^1"]:
    nf = normalize(parse_term(text))
    print(f"  {text:14} ->  {render_term(nf)}")

show("Each step is a named rewrite; here is one term's worth of steps")
t = parse_term("Q(1)^1^Q(1)")
while True:
    steps = applicable_rewrites(t)
    if not steps:
        break
    rule, t = steps[0]
    print(f"  {rule:28} ->  {render_term(t)}")

show("Equivalence = identical normal forms")
for left, right in [("Q(1)^Q(1)", "Q(1)"), ("a^b", "b^a")]:
    verdict = "equivalent" if equivalent(parse_term(left), parse_term(right)) else "distinct"
    print(f"  {left:10} vs {right:10} ->  {verdict}")

show("One-point orbits of a normal term (with their addresses)")
t = normalize(parse_term("Q(a,b)^1"))
for d in one_orbits(t):
    leaf = render_term(subterm_at(t, d.path))
    print(f"  orbit {d.index}: subterm path {d.path or '()'}  leaf {leaf}")

show("Sampling: a finite chain with one point per orbit guaranteed")
p, ann = materialize(t, budget=6, seed=1)
print(dump_poset(p), end="")
print("  annotations (node -> orbit):",
      {x: ann[x].index for x in p.elements})
