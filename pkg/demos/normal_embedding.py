"""
Normal embedding, pancakes and projections on sampled surfaces
==============================================================

A surface germ is normally embedded (LNE) when inner and outer distances
are comparable.  The arc criterion compares the outer tangency order of
two arcs with the inner one.  Horns pass the test.  The two branches of the
cusp y^2 = x^3 fail it: they are 3/2-close in space but only 1-close
along the surface.
"""

from __future__ import annotations

import numpy as np

from lipgeo.metriclab import (
    PROJECTION_PLAN,
    ModelArc,
    PancakeDecomposition,
    cusp_model,
    horn_model,
    horn_sector_model,
    lne_report,
    meridian_arcs,
    pancake_check,
    projection_experiment,
    tangent_cone_sample,
)
from lipgeo.metriclab.experiments import projected_min_tord

# Arc criterion on a horn and on the cusp.
horn = horn_model(2)
print("2-horn passes the arc criterion:", lne_report(horn, meridian_arcs(horn, 6)).ok)

cusp = cusp_model()
report = lne_report(cusp, [ModelArc(0, 1.0), ModelArc(1, 1.0)])
(v,) = report.violations
print(f"cusp branches: tord {v.tord:.3f}, itord {v.itord:.3f}")

# Pancakes: each branch of the cusp is LNE, and their union is not, so the
# split is minimal.  Two halves of a horn sector are also LNE, but so is
# their union, so that split is not minimal.
print("cusp split:", pancake_check(cusp, PancakeDecomposition(((0,), (1,)), (1, 1))).label)
print("horn sector split:",
      pancake_check(horn_sector_model(2), PancakeDecomposition(((0,), (1,)), (2, 2))).label)

# A generic plane projection keeps the horn exponent.  The plane orthogonal
# to the horn axis flattens the link and sees only exponent 1.
proj = projection_experiment(horn, num_planes=20, seed=1, beta=2)
print(f"generic planes within 0.05 of 2: {proj.fraction_within:.0%}")
axis = projected_min_tord(horn, np.eye(3)[:, :2], meridian_arcs(horn, 4), PROJECTION_PLAN)
print(f"axis-orthogonal plane: {axis:.4f}")

# Rescaled links of a beta-horn shrink onto the axis direction at rate t^(beta-1).
for beta in ("3/2", 2):
    print(f"tangent cone decay for beta={beta}: {tangent_cone_sample(horn_model(beta)).decay:.4f}")
