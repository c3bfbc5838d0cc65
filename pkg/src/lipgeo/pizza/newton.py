"""Branch resolution and Newton–Puiseux root search for functions on ``T_beta``.

Inside a region free of sign changes, an expression with abs/min/max equals
a fixed polynomial ``sum c u^p w^k`` (``p`` rational, ``k`` integer).  The
Newton polygon of ``g(u, phi + z)`` in ``z`` gives the exponents ``alpha``
and coefficients ``c`` of arcs ``phi + c u^alpha`` along which the leading
terms of ``g`` cancel.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, Mapping

import sympy

from ..exponents import INF, LipgeoError, PuiseuxSeries
from ..exponents.expr import Abs, Add, FunctionExpr, Max, Min, Mono, Mul, Sub


class NotAdmissible(LipgeoError):
    """The function falls outside the class the extractor can decide."""


Poly = Mapping[tuple[Fraction, int], Fraction]


def _clean(acc: dict) -> dict:
    return {k: v for k, v in acc.items() if v != 0}


def poly_add(a: Poly, b: Poly, sign: int = 1) -> dict:
    acc = dict(a)
    for k, v in b.items():
        acc[k] = acc.get(k, Fraction(0)) + sign * v
    return _clean(acc)


def poly_mul(a: Poly, b: Poly) -> dict:
    acc: dict = {}
    for (p1, k1), c1 in a.items():
        for (p2, k2), c2 in b.items():
            key = (p1 + p2, k1 + k2)
            acc[key] = acc.get(key, Fraction(0)) + c1 * c2
    return _clean(acc)


def poly_eval(g: Poly, w: PuiseuxSeries) -> PuiseuxSeries:
    """Exact ``g(t, w(t))`` for an exact finite series ``w``."""
    out = PuiseuxSeries()
    powers: dict[int, PuiseuxSeries] = {}
    for (p, k), c in g.items():
        if k not in powers:
            powers[k] = w.power(k) if k else PuiseuxSeries.constant(1)
        out = out + (powers[k] * c).shift(p)
    return out


def taylor(g: Poly, phi: PuiseuxSeries) -> dict[int, PuiseuxSeries]:
    """Coefficients ``g_j(u)`` with ``g(u, phi + z) = sum_j g_j(u) z^j`` (non-zero ones)."""
    out: dict[int, PuiseuxSeries] = {}
    powers: dict[int, PuiseuxSeries] = {}
    for (p, k), c in g.items():
        for j in range(k + 1):
            e = k - j
            if e and phi.is_zero():
                continue
            if e not in powers:
                powers[e] = phi.power(e) if e else PuiseuxSeries.constant(1)
            term = (powers[e] * (c * comb(k, j))).shift(p)
            out[j] = out.get(j, PuiseuxSeries()) + term
    return {j: s for j, s in sorted(out.items()) if not s.is_zero()}


# ---------------------------------------------------------------------------
# branch resolution


class _ZeroSign(Exception):
    pass


@dataclass(frozen=True)
class Resolution:
    """Polynomial form of ``f`` on a region plus the polynomials whose zeros bound it."""

    f: dict
    critical: tuple[dict, ...]


def resolve(f: FunctionExpr, w: PuiseuxSeries) -> Resolution:
    """Fix every abs/min/max branch by its sign along the sample arc ``w``.

    Raises :class:`_ZeroSign` when a branch argument vanishes on the sample
    arc without vanishing identically (the sample is a root: try another).
    """
    critical: list[dict] = []

    def sign(g: dict) -> int:
        if not g:
            return 0
        s = poly_eval(g, w)
        if s.is_zero():
            raise _ZeroSign
        return s.sign()

    def go(node: FunctionExpr) -> dict:
        if isinstance(node, Mono):
            if node.pw.denominator != 1:
                raise NotAdmissible("fractional powers of w are not supported by the extractor")
            return _clean({(node.pu, int(node.pw)): node.c})
        if isinstance(node, Add):
            acc: dict = {}
            for a in node.args:
                acc = poly_add(acc, go(a))
            return acc
        if isinstance(node, Sub):
            return poly_add(go(node.a), go(node.b), -1)
        if isinstance(node, Mul):
            acc = {(Fraction(0), 0): Fraction(1)}
            for a in node.args:
                acc = poly_mul(acc, go(a))
            return acc
        if isinstance(node, Abs):
            x = go(node.a)
            critical.append(x)
            return x if sign(x) >= 0 else {k: -v for k, v in x.items()}
        if isinstance(node, (Min, Max)):
            vals = [go(a) for a in node.args]
            best = vals[0]
            for v in vals[1:]:
                d = poly_add(v, best, -1)
                critical.append(d)
                s = sign(d)
                if (s < 0) if isinstance(node, Min) else (s > 0):
                    best = v
            return best
        raise LipgeoError(f"unknown expression node {type(node).__name__}")

    return Resolution(go(f), tuple(critical))


def resolve_in_sector(f: FunctionExpr, lo: PuiseuxSeries, hi: PuiseuxSeries) -> Resolution:
    """Resolution valid strictly between two arcs ``lo < hi`` free of branch changes."""
    d = hi - lo
    tau, lead = d.leading()
    for frac in (Fraction(1, 2), Fraction(1, 3), Fraction(2, 3), Fraction(1, 5), Fraction(4, 5),
                 Fraction(2, 7), Fraction(5, 7), Fraction(3, 11), Fraction(8, 11)):
        try:
            return resolve(f, lo + PuiseuxSeries.monomial(lead * frac, tau))
        except _ZeroSign:
            continue
    raise LipgeoError("could not find a sample arc avoiding branch zeros")


# ---------------------------------------------------------------------------
# Newton polygon


def newton_edges(coeffs: Mapping[int, PuiseuxSeries]) -> list[tuple[Fraction, dict[int, Fraction]]]:
    """Lower-hull edges of the points ``(j, ord g_j)``: ``(alpha, {j: lead g_j})`` on each edge.

    ``alpha`` is minus the slope; points on an edge share ``ord g_j + j alpha``.
    """
    pts = sorted((j, s.order(), s.leading()[1]) for j, s in coeffs.items())
    hull: list[tuple[int, Fraction, Fraction]] = []
    for p in pts:
        while len(hull) >= 2:
            (j1, o1, _), (j2, o2, _) = hull[-2], hull[-1]
            # drop hull[-1] if it is on or above the segment hull[-2] -> p
            if (o2 - o1) * (p[0] - j1) >= (p[1] - o1) * (j2 - j1):
                hull.pop()
            else:
                break
        hull.append(p)
    edges = []
    for (j1, o1, _), (j2, o2, _) in zip(hull, hull[1:]):
        alpha = (o1 - o2) / (j2 - j1)
        on = {j: c for j, o, c in pts if j1 <= j <= j2 and o + j * alpha == o1 + j1 * alpha}
        edges.append((alpha, on))
    return edges


def edge_roots(on: Mapping[int, Fraction]) -> tuple[list[Fraction], list]:
    """Non-zero real roots of ``sum c_j x^j``: rational ones and the remaining irrational ones."""
    x = sympy.Symbol("x")
    poly = sympy.Poly(sum(sympy.Rational(c.numerator, c.denominator) * x**j for j, c in on.items()), x)
    rational_roots, irrational = [], []
    for r in sympy.real_roots(poly):
        if r == 0:
            continue
        if r.is_Rational:
            rational_roots.append(Fraction(int(r.p), int(r.q)))
        else:
            irrational.append(r)
    return sorted(set(rational_roots)), irrational


def in_triangle_sign(w: PuiseuxSeries, beta: Fraction) -> int:
    """``1`` strictly inside ``T_beta`` (germ sense), ``0`` on a boundary arc, ``-1`` outside."""
    top = PuiseuxSeries.monomial(1, beta) - w
    if w.is_zero() or top.is_zero():
        return 0
    return 1 if (w.sign() > 0 and top.sign() > 0) else -1


def _irrational_inside(phi: PuiseuxSeries, alpha: Fraction, r, beta: Fraction) -> bool:
    """Whether ``phi + r u^alpha`` (``r`` algebraic) would lie in the closed triangle."""
    top = PuiseuxSeries.monomial(1, beta) - phi
    if phi.is_zero():
        low_ok = r > 0
    else:
        low_ok = phi.sign() > 0
    if top.is_zero():
        high_ok = r < 0
    elif top.order() < alpha:
        high_ok = top.sign() > 0
    else:  # phi == 0 and alpha == beta
        high_ok = sympy.Integer(1) - r >= 0
    return bool(low_ok and high_ok)


def newton_roots(g: Poly, beta: Fraction, depth: int,
                 phi: PuiseuxSeries | None = None, last: Fraction | None = None,
                 level: int = 0) -> list[PuiseuxSeries]:
    """Arcs in ``T_beta`` along which leading terms of ``g`` cancel.

    Every returned arc is a finite Puiseux polynomial; exact roots of ``g``
    are among them.  A cancellation chain longer than ``depth`` terms, or a
    relevant irrational coefficient, raises :class:`NotAdmissible`.
    """
    phi = phi if phi is not None else PuiseuxSeries()
    coeffs = taylor(g, phi)
    out: list[PuiseuxSeries] = []
    for alpha, on in newton_edges(coeffs):
        if (last is None and alpha < beta) or (last is not None and alpha <= last):
            continue
        roots, irr = edge_roots(on)
        for r in irr:
            if _irrational_inside(phi, alpha, r, beta):
                raise NotAdmissible(f"cancellation arc with irrational coefficient {r} at exponent {alpha}")
        for c in roots:
            new = phi + PuiseuxSeries.monomial(c, alpha)
            if in_triangle_sign(new, beta) < 0 and not _may_reenter(new, beta):
                continue
            if level + 1 > depth:
                raise NotAdmissible(f"cancellation locus is not a monomial arc within depth {depth}")
            out.append(new)
            out.extend(newton_roots(g, beta, depth, new, alpha, level + 1))
    return out


def _may_reenter(w: PuiseuxSeries, beta: Fraction) -> bool:
    """A prefix lying on a boundary arc may still have continuations inside."""
    return w.is_zero() or (PuiseuxSeries.monomial(1, beta) - w).is_zero()


def all_roots(polys: Iterable[Poly], beta: Fraction, depth: int) -> list[PuiseuxSeries]:
    out: dict[tuple, PuiseuxSeries] = {}
    for g in polys:
        if not g:
            continue
        for r in newton_roots(g, beta, depth):
            if in_triangle_sign(r, beta) >= 0:
                out[r.terms] = r
    return list(out.values())


__all__ = [
    "INF",
    "NotAdmissible",
    "Resolution",
    "all_roots",
    "edge_roots",
    "in_triangle_sign",
    "newton_edges",
    "newton_roots",
    "poly_eval",
    "resolve",
    "resolve_in_sector",
    "taylor",
]
