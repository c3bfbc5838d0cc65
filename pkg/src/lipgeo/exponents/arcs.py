"""Arcs as vectors of Puiseux series, tangency orders and tangent vectors."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Literal, Mapping, Sequence

import numpy as np

from .series import (
    INF,
    Exponent,
    LipgeoError,
    PuiseuxSeries,
    Rational,
    series_from_json,
    series_to_json,
)

Param = Literal["distance", "coordinate"]

_T = PuiseuxSeries.monomial(1, 1)


def _as_series(x: PuiseuxSeries | Mapping[Rational, Rational] | Rational) -> PuiseuxSeries:
    if isinstance(x, PuiseuxSeries):
        return x
    if isinstance(x, Mapping):
        return PuiseuxSeries.from_terms(x)
    return PuiseuxSeries.constant(x) if x != 0 else PuiseuxSeries()


@dataclass(frozen=True)
class Arc:
    """A real arc germ ``t -> (coords[0](t), ..., coords[n-1](t))``.

    ``param="distance"`` means ``|gamma(t)| = t`` to first order: the
    exponent-1 coefficient vector has unit norm.  ``param="coordinate"``
    means one coordinate is exactly ``t``; tangency orders are unchanged by
    passing between the two conventions, so all arithmetic stays rational.
    """

    coords: tuple[PuiseuxSeries, ...]
    param: Param = "coordinate"

    def __post_init__(self) -> None:
        if len(self.coords) < 2:
            raise LipgeoError("arcs live in R^n with n >= 2")
        if self.param not in ("distance", "coordinate"):
            raise LipgeoError(f"unknown parameterization {self.param!r}")
        for s in self.coords:
            if s.terms and s.terms[0][0] < 1:
                raise LipgeoError("arc coordinates must have order >= 1")
        if self.param == "coordinate":
            if not any(s == _T for s in self.coords):
                raise LipgeoError("coordinate-parameterized arc needs a coordinate equal to t")
        else:
            norm2 = sum((s.coefficient(1) ** 2 for s in self.coords), Fraction(0))
            if norm2 != 1:
                raise LipgeoError(f"distance-parameterized arc has |gamma'(0)|^2 = {norm2}")

    @classmethod
    def of(
        cls, *coords: PuiseuxSeries | Mapping[Rational, Rational] | Rational,
        param: Param = "coordinate",
    ) -> "Arc":
        """``Arc.of({1: 1}, {2: 1})`` is the parabola arc ``(t, t^2)``."""
        return cls(tuple(_as_series(c) for c in coords), param)

    @classmethod
    def graph(cls, w: PuiseuxSeries | Mapping[Rational, Rational] | Rational) -> "Arc":
        """Plane arc ``u = t, w = w(t)``."""
        return cls((_T, _as_series(w)), "coordinate")

    @property
    def dim(self) -> int:
        return len(self.coords)

    def evaluate(self, t: float) -> np.ndarray:
        return np.array([s.evaluate(t) for s in self.coords])

    def evaluate_mp(self, t) -> list:
        return [s.evaluate_mp(t) for s in self.coords]

    def truncate(self, bound: Exponent) -> "Arc":
        return Arc(tuple(_exact_truncate(s, bound) for s in self.coords), self.param)


def _exact_truncate(s: PuiseuxSeries, bound: Exponent) -> PuiseuxSeries:
    return PuiseuxSeries(tuple((e, c) for e, c in s.terms if e <= bound), s.precision)


@dataclass(frozen=True)
class ArcFamily:
    """Finite sample of a Valette link."""

    arcs: tuple[Arc, ...]

    def __post_init__(self) -> None:
        if not self.arcs:
            raise LipgeoError("empty arc family")
        dims = {a.dim for a in self.arcs}
        if len(dims) != 1:
            raise LipgeoError(f"arc family mixes dimensions {sorted(dims)}")

    @classmethod
    def of(cls, arcs: Iterable[Arc]) -> "ArcFamily":
        return cls(tuple(arcs))

    def __iter__(self):
        return iter(self.arcs)

    def __len__(self) -> int:
        return len(self.arcs)


def arc_tord(g1: Arc, g2: Arc) -> Exponent:
    """Tangency order: order of ``|g1(t) - g2(t)|``."""
    if g1.dim != g2.dim:
        raise LipgeoError(f"dimension mismatch {g1.dim} vs {g2.dim}")
    if g1.param != g2.param:
        raise LipgeoError("mixed parameterization conventions")
    return min((a - b).order() for a, b in zip(g1.coords, g2.coords))


def set_tord(z1: ArcFamily | Sequence[Arc], z2: ArcFamily | Sequence[Arc]) -> Exponent:
    """``sup_{g in z1} sup_{l in z2} tord(g, l)`` over finite samples."""
    z1 = z1 if isinstance(z1, ArcFamily) else ArcFamily.of(z1)
    z2 = z2 if isinstance(z2, ArcFamily) else ArcFamily.of(z2)
    if z1.arcs[0].dim != z2.arcs[0].dim:
        raise LipgeoError("arc families of different dimension")
    return max(arc_tord(g, l) for g in z1 for l in z2)


def arc_set_tord(g: Arc, z: ArcFamily | Sequence[Arc]) -> Exponent:
    return set_tord([g], z)


def tangent_direction(g: Arc) -> tuple[Fraction, ...]:
    """Exact, unnormalized tangent direction: the exponent-1 coefficients."""
    v = tuple(s.coefficient(1) for s in g.coords)
    if not any(v):
        raise LipgeoError("degenerate arc: no exponent-1 term")
    return v


def tangent_vector(g: Arc) -> np.ndarray:
    """Unit tangent vector at the origin."""
    v = np.array([float(c) for c in tangent_direction(g)])
    return v / np.linalg.norm(v)


def arc_to_json(g: Arc) -> dict:
    return {"param": g.param, "coords": [series_to_json(s) for s in g.coords]}


def arc_from_json(data: Mapping) -> Arc:
    return Arc(tuple(series_from_json(c) for c in data["coords"]), data.get("param", "coordinate"))


__all__ = [
    "Arc",
    "ArcFamily",
    "INF",
    "arc_set_tord",
    "arc_tord",
    "arc_from_json",
    "arc_to_json",
    "set_tord",
    "tangent_direction",
    "tangent_vector",
]
