"""Bi-Lipschitz invariants of semialgebraic surface germs.

Subpackages:

* :mod:`lipgeo.exponents` -- exact exponents, Puiseux arcs, tangency orders;
* :mod:`lipgeo.complexes` -- Hölder complexes and inner classification;
* :mod:`lipgeo.pizza` -- abstract pizzas and contact equivalence of functions;
* :mod:`lipgeo.metriclab` -- sampled germ models and numerical oracles.
"""

from .exponents import INF, LipgeoError, ResolutionBoundExceeded

__version__ = "0.1.0"
