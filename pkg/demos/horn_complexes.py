"""
Inner geometry of horns from labeled graphs
===========================================

A Hölder complex is a graph whose edges carry exponents.  Simplifying it
gives a canonical form, and two complexes describe inner-equivalent germs
exactly when their canonical forms are isomorphic.  A cycle always
simplifies to a bigon, and the germ is then a horn whose exponent is the
smallest label.
"""

from __future__ import annotations

from lipgeo.cli import HORN_PLAN
from lipgeo.complexes import HolderComplex, canonicalize, equivalent, horn_exponent, realize_model, to_dot
from lipgeo.exponents import format_exponent
from lipgeo.metriclab import horn_exponent_numeric

# A triangle and a square with different labels.
triangle = HolderComplex.cycle([2, 3, 5])
square = HolderComplex.cycle([2, 7, 9, 11])

# Both collapse to the bigon with both labels equal to 2.
for name, c in (("triangle", triangle), ("square", square)):
    canon = canonicalize(c)
    labels = ", ".join(format_exponent(e.beta) for e in canon.edges)
    print(f"{name}: {len(c.edges)} edges -> {len(canon.edges)} edges with labels {labels}")

same, witness = equivalent(triangle, square)
print("inner equivalent:", same)
print("vertex map of the canonical forms:", witness["vertices"])

# The horn exponent is read off symbolically ...
print("symbolic horn exponent:", format_exponent(horn_exponent(triangle)))

# ... and measured on a realized surface: the inner diameter of the link
# at scale t behaves like t^beta.
model = realize_model(triangle).model
print(f"measured horn exponent: {horn_exponent_numeric(model, HORN_PLAN):.4f}")

# A path is not a horn, and its canonical form is a single edge.
path = HolderComplex.build([("a", "b", 2), ("b", "c", 3)])
print(to_dot(canonicalize(path)))
