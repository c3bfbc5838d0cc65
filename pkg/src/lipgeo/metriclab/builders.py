"""Concrete germ models: horns, horn sectors, Hölder triangles, the cusp pair."""

from __future__ import annotations

import math

import numpy as np

from ..exponents import LipgeoError, rational
from .model import GermModel, Patch, Term


def _polygon_terms(exp, angles: np.ndarray) -> tuple[Term, Term]:
    s = np.linspace(0.0, 1.0, len(angles))
    s[-1] = 1.0
    xs = tuple((float(a), float(b)) for a, b in zip(s, np.cos(angles)))
    ys = tuple((float(a), float(b)) for a, b in zip(s, np.sin(angles)))
    return Term(exp, xs), Term(exp, ys)


def horn_model(beta, *, sides: int = 96, patches: int = 2, dim: int = 3) -> GermModel:
    """Polygonal ``beta``-horn ``{z = t, (x, y) in t^beta * P}`` in ``R^dim``.

    ``P`` is a regular ``sides``-gon inscribed in the unit circle; the horn is
    bi-Lipschitz (outer) equivalent to the round one.  The link is split into
    ``patches`` arcs glued cyclically; ``z`` is coordinate 2.
    """
    beta = rational(beta)
    if beta < 1:
        raise LipgeoError("horn exponent must be >= 1")
    if dim < 3:
        raise LipgeoError("horns live in dimension >= 3")
    if sides % patches:
        raise LipgeoError("sides must be a multiple of patches")
    per = sides // patches
    out = []
    for k in range(patches):
        angles = 2 * math.pi * (k * per + np.arange(per + 1)) / sides
        x, y = _polygon_terms(beta, angles)
        coords = [(x,), (y,), (Term.const(1),)] + [()] * (dim - 3)
        out.append(Patch(tuple(coords)))
    glue = tuple(((k, 1), ((k + 1) % patches, 0)) for k in range(patches))
    return GermModel(dim, tuple(out), glue, param_coord=2, name=f"horn({beta})")


def horn_sector_model(beta, *, angle: float = math.pi, sides: int = 48, patches: int = 2,
                      dim: int = 3) -> GermModel:
    """Sector ``0 <= theta <= angle`` of the polygonal ``beta``-horn, cut into patches."""
    beta = rational(beta)
    if sides % patches:
        raise LipgeoError("sides must be a multiple of patches")
    per = sides // patches
    out = []
    for k in range(patches):
        angles = angle * (k * per + np.arange(per + 1)) / sides
        x, y = _polygon_terms(beta, angles)
        out.append(Patch(tuple([(x,), (y,), (Term.const(1),)] + [()] * (dim - 3))))
    glue = tuple(((k, 1), (k + 1, 0)) for k in range(patches - 1))
    return GermModel(dim, tuple(out), glue, param_coord=2, name=f"horn_sector({beta})")


def triangle_model(beta) -> GermModel:
    """Standard ``{u >= 0, 0 <= w <= u^beta}`` as a single plane patch."""
    beta = rational(beta)
    patch = Patch(((Term.const(1),), (Term.linear(beta, 0.0, 1.0),)))
    return GermModel(2, (patch,), (), param_coord=0, name=f"triangle({beta})")


def cusp_model(*, samples: int = 33) -> GermModel:
    """Two sheets of the cylinder ``y^2 = x^3`` meeting along the ``z``-axis.

    Sheet ``±``: ``x = s t``, ``z = (1 - s) t``, ``y = ±(s t)^{3/2}``; it is
    written in the coordinates ``(p, q, y) = (x + z, z - x, y)`` so that
    ``p = t``.  The factor ``s^{3/2}`` is interpolated on ``samples``
    breakpoints.  The branch arcs ``s = 1`` are ``(t, -t, ±t^{3/2})``.
    """
    s = np.linspace(0.0, 1.0, samples)
    s[-1] = 1.0
    patches = []
    for sign in (1.0, -1.0):
        ys = tuple((float(a), float(sign * a**1.5)) for a in s)
        patches.append(Patch((
            (Term.const(1),),
            (Term.linear(1, 1.0, -1.0),),
            (Term(rational("3/2"), ys),),
        )))
    return GermModel(3, tuple(patches), (((0, 0), (1, 0)),), param_coord=0, name="cusp")
