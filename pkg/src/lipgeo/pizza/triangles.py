"""Validator for the tangency condition between two Hölder triangles.

Two triangles ``T = T(g1, g2)`` and ``T' = T(g1', g2')`` are compatible when
each boundary arc is as close to the other triangle as to its partner arc:
``tord(g1, T') = tord(g1, g1') = tord(g1', T)`` and the same for ``g2``.
Triangles are represented by finite arc samples.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ..exponents import Arc, ArcFamily, Exponent, LipgeoError, PuiseuxSeries, arc_set_tord, arc_tord

#: interpolation weights used by :func:`triangle_sample`: constants and the
#: powers ``t^k`` crowding each boundary arc
DEFAULT_CONSTANTS = (Fraction(1, 3), Fraction(1, 2), Fraction(2, 3))
DEFAULT_POWERS = (Fraction(1, 2), Fraction(1), Fraction(2), Fraction(3))


def _arc(coords: Sequence[PuiseuxSeries], like: Arc) -> Arc:
    try:
        return Arc(tuple(coords), like.param)
    except LipgeoError as exc:
        raise LipgeoError(f"interpolated arc is not a valid arc ({exc}); pass explicit samples") from exc


def triangle_sample(g1: Arc, g2: Arc, constants: Sequence[Fraction] = DEFAULT_CONSTANTS,
                    powers: Sequence[Fraction] = DEFAULT_POWERS) -> ArcFamily:
    """Arcs ``g1 + lam (g2 - g1)`` for constant weights and for ``lam = t^k``, ``1 - t^k``.

    This samples the straight triangle spanned by the two arcs, so it is exact
    for planar or linear triangles and an approximation otherwise.
    """
    if g1.dim != g2.dim:
        raise LipgeoError("boundary arcs live in different dimensions")
    diff = [b - a for a, b in zip(g1.coords, g2.coords)]
    arcs = [g1, g2]
    for c in constants:
        arcs.append(_arc([a + d * c for a, d in zip(g1.coords, diff)], g1))
    for k in powers:
        arcs.append(_arc([a + d.shift(k) for a, d in zip(g1.coords, diff)], g1))
        arcs.append(_arc([b - d.shift(k) for b, d in zip(g2.coords, diff)], g1))
    return ArcFamily.of(arcs)


@dataclass(frozen=True)
class TwoTriangleCheck:
    """One chain ``tord(g, T') = tord(g, g') = tord(g', T)`` with its three values."""

    label: str
    to_other: Exponent
    pair: Exponent
    back: Exponent

    @property
    def ok(self) -> bool:
        return self.to_other == self.pair == self.back

    def failed_equalities(self) -> list[str]:
        out = []
        if self.to_other != self.pair:
            out.append(f"tord({self.label}, T') != tord({self.label}, {self.label}')")
        if self.pair != self.back:
            out.append(f"tord({self.label}, {self.label}') != tord({self.label}', T)")
        return out


@dataclass(frozen=True)
class TwoTriangleReport:
    checks: tuple[TwoTriangleCheck, ...]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def failures(self) -> list[str]:
        return [msg for c in self.checks for msg in c.failed_equalities()]

    def __bool__(self) -> bool:
        return self.ok


def check_two_triangle_condition(
    T_arcs: tuple[Arc, Arc],
    T2_arcs: tuple[Arc, Arc],
    samples: tuple[ArcFamily | Sequence[Arc], ArcFamily | Sequence[Arc]] | None = None,
) -> TwoTriangleReport:
    """Check both chains of equalities on finite samples of ``T`` and ``T'``.

    ``samples`` gives the arc samples of ``T`` and ``T'``; by default they are
    straight interpolations between the boundary arcs.
    """
    g1, g2 = T_arcs
    h1, h2 = T2_arcs
    dims = {g1.dim, g2.dim, h1.dim, h2.dim}
    if len(dims) != 1:
        raise LipgeoError("all four arcs must share one ambient dimension")
    if samples is None:
        sample_t, sample_t2 = triangle_sample(g1, g2), triangle_sample(h1, h2)
    else:
        sample_t, sample_t2 = (ArcFamily.of(s) for s in samples)
    checks = []
    for label, g, h in (("g1", g1, h1), ("g2", g2, h2)):
        checks.append(TwoTriangleCheck(label, arc_set_tord(g, sample_t2), arc_tord(g, h),
                                       arc_set_tord(h, sample_t)))
    return TwoTriangleReport(tuple(checks))


__all__ = [
    "TwoTriangleCheck",
    "TwoTriangleReport",
    "check_two_triangle_condition",
    "triangle_sample",
]
