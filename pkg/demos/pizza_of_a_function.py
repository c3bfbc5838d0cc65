"""
Pizza of a Lipschitz function on a Hölder triangle
==================================================

The triangle T_beta = {0 <= w <= u^beta} is cut into slices.  On each slice
the order of f along an arc and the width of the arc (its contact with the
nearest arc where f changes behaviour) are tied by one affine law.  The
resulting pizza is a contact invariant of f.
"""

from __future__ import annotations

from lipgeo.exponents import U, W, Arc, format_exponent, ord_on_arc, scale, swap_boundary
from lipgeo.metriclab import function_order_numeric
from lipgeo.pizza import equivalent, extraction, width_at_arc

f = abs(W - U * U)
ex = extraction(f, 1)

# The arcs where f vanishes or changes its order law.
print("special arcs w =", ", ".join(str(s) for s in ex.special))


def describe(p):
    for i, s in enumerate(p.slices):
        law = "point slice" if s.mu is None else \
            f"mu(q) = {format_exponent(s.mu.a)} q + {format_exponent(s.mu.b)}"
        print(f"  slice {i}: q {format_exponent(s.q_in)} -> {format_exponent(s.q_out)}, "
              f"beta {format_exponent(s.beta)}, {law}")


print("pizza of |w - u^2| on T_1:")
describe(ex.pizza)

# Orders along a few arcs, checked against a high-precision evaluation.
for terms in ({2: 1, 3: -1}, {2: 1}, {1: 1}, {3: 1}):
    g = Arc.graph(terms)
    exact = ord_on_arc(f, g)
    print(f"  arc w = {g.coords[1]}: order {format_exponent(exact)}, "
          f"numeric {function_order_numeric(f, g):.4f}, width {format_exponent(width_at_arc(f, 1, g))}")

# Multiplying by a positive constant changes nothing; swapping the two
# boundary arcs reverses the slice order.
assert extraction(scale(f, 7), 1).pizza == ex.pizza
swapped = extraction(swap_boundary(f, 1), 1).pizza
print("after swapping the boundary arcs:")
describe(swapped)
print("equal as oriented pizzas:", equivalent(swapped, ex.pizza))
print("equal up to orientation:", equivalent(swapped, ex.pizza, oriented=False))

# On the thin triangle T_2 the function u has constant order 1.
print("pizza of u on T_2:")
describe(extraction(U, 2).pizza)
