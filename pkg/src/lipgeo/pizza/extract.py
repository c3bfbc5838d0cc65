"""Minimal pizza of a function on the standard Hölder triangle ``T_beta``.

Arcs of ``T_beta = {u >= 0, 0 <= w <= u^beta}`` are ordered by their
``w``-series.  Special arcs (the boundary arcs and every arc along which a
branch argument or ``f`` itself has a leading-term cancellation) cut the
triangle into sectors.  Inside a sector ``(la, lb)`` with ``tau = tord(la, lb)``
the arcs come in three families, traversed in this order:

* fan A: ``la + c u^alpha``, ``alpha`` from ``inf`` down to ``tau``;
* the middle: arcs at tangency order ``tau`` from both ends;
* fan B: ``lb - c u^alpha``, ``alpha`` from ``tau`` up to ``inf``.

The *depth* of an arc is ``alpha`` on a fan, ``tau`` in the middle and
``inf`` at a special arc; the tangency order of two arcs is the minimum
depth between them.  On a fan ``ord f = min_j(ord f_j + j alpha)`` where
``f_j`` are the Taylor coefficients of ``f`` in ``w`` at the fan's base arc,
so orders are exact piecewise-affine functions of the depth.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from ..exponents import INF, Arc, Exponent, LipgeoError, PuiseuxSeries, arc_tord, max_exponent_bound, rational
from ..exponents.expr import FunctionExpr, ord_on_arc
from .abstract import AbstractPizza, PizzaSlice, WidthFunction, minimalize
from .newton import NotAdmissible, all_roots, in_triangle_sign, resolve_in_sector, taylor

DEFAULT_DEPTH = 3


def _cmp(a: PuiseuxSeries, b: PuiseuxSeries) -> int:
    return (a - b).sign()


def _sorted_arcs(arcs: Sequence[PuiseuxSeries]) -> list[PuiseuxSeries]:
    uniq = {a.terms: a for a in arcs}
    return sorted(uniq.values(), key=functools.cmp_to_key(_cmp))


def _times(j: int, d: Exponent) -> Exponent:
    return INF if d == INF and j else j * d if j else Fraction(0)


@dataclass(frozen=True)
class Atom:
    """A stretch of the arc line on which ``q = j * depth + o`` and depth is monotone."""

    kind: str  # "special", "fan" or "middle"
    sector: int
    part: int  # 0 special, 1 fan A, 2 middle, 3 fan B
    d0: Exponent
    d1: Exponent
    j: int
    o: Exponent

    def q(self, d: Exponent) -> Exponent:
        if self.o == INF:
            return INF
        return _times(self.j, d) + self.o

    @property
    def q0(self) -> Exponent:
        return self.q(self.d0)

    @property
    def q1(self) -> Exponent:
        return self.q(self.d1)

    @property
    def varying(self) -> bool:
        return self.j > 0 and self.o != INF and self.d0 != self.d1

    def key(self, d: Exponent) -> tuple:
        """Position of the arc at depth ``d`` along the line."""
        if d == INF and self.part in (1, 3):  # a fan ends at its base arc
            return (self.sector + (self.part == 3), 0, 0)
        if self.part == 1:
            return (self.sector, 1, -d)
        if self.part == 3:
            return (self.sector, 3, d)
        return (self.sector, self.part, 0)


@dataclass(frozen=True)
class Portion:
    atom: Atom
    d0: Exponent
    d1: Exponent

    @property
    def min_depth(self) -> Exponent:
        return min(self.d0, self.d1)


@dataclass(frozen=True)
class Boundary:
    """A slice boundary: position key, order and a representative arc."""

    key: tuple
    q: Exponent
    arc: Arc


@dataclass(frozen=True)
class ExtractedSlice:
    slice: PizzaSlice
    start: Boundary
    end: Boundary


@dataclass(frozen=True)
class ScannedArc:
    arc: Arc
    order: Exponent
    depth: Exponent
    key: tuple


@dataclass(frozen=True)
class Extraction:
    """Everything the extractor computed; ``pizza`` is the minimal pizza."""

    f: FunctionExpr
    beta: Fraction
    special: tuple[PuiseuxSeries, ...]
    atoms: tuple[Atom, ...]
    slices: tuple[ExtractedSlice, ...]
    scanned: tuple[ScannedArc, ...]
    pizza: AbstractPizza = field(compare=False)

    def locate(self, w: PuiseuxSeries) -> tuple:
        return _locate(self.special, w)


# ---------------------------------------------------------------------------
# special arcs and atoms


def special_arcs(f: FunctionExpr, beta: Fraction, depth: int = DEFAULT_DEPTH) -> list[PuiseuxSeries]:
    """Boundary arcs plus all cancellation arcs, refined until no sector changes."""
    S = [PuiseuxSeries(), PuiseuxSeries.monomial(1, beta)]
    for _ in range(32):
        new = []
        for lo, hi in zip(S, S[1:]):
            res = resolve_in_sector(f, lo, hi)
            for r in all_roots((res.f, *res.critical), beta, depth):
                if _cmp(lo, r) < 0 < _cmp(hi, r):
                    new.append(r)
        if not new:
            return S
        S = _sorted_arcs(S + new)
    raise LipgeoError("special arcs did not stabilise")


def _envelope(coeffs: dict[int, PuiseuxSeries], tau: Fraction) -> list[tuple[Fraction, Exponent, int, Exponent]]:
    """Pieces ``(alpha_lo, alpha_hi, j, o)`` of ``min_j(o_j + j alpha)`` over ``alpha >= tau``."""
    lines = {j: s.order() for j, s in coeffs.items()}
    if not lines:
        return [(tau, INF, 0, INF)]
    pieces = []
    a = tau
    value = min(o + j * a for j, o in lines.items())
    cur = min(j for j, o in lines.items() if o + j * a == value)
    while True:
        nxt = None
        for j, o in lines.items():
            if j >= cur:
                continue
            x = (o - lines[cur]) / (cur - j)
            if x > a and (nxt is None or x < nxt[0] or (x == nxt[0] and j < nxt[1])):
                nxt = (x, j)
        if nxt is None:
            pieces.append((a, INF, cur, lines[cur]))
            return pieces
        pieces.append((a, nxt[0], cur, lines[cur]))
        a, cur = nxt


def _fan_atoms(sector: int, part: int, coeffs: dict[int, PuiseuxSeries], tau: Fraction) -> list[Atom]:
    atoms = [Atom("fan", sector, part, lo, hi, j, o) for lo, hi, j, o in _envelope(coeffs, tau)]
    if part == 1:  # fan A is traversed from inf down to tau
        atoms = [Atom(a.kind, a.sector, a.part, a.d1, a.d0, a.j, a.o) for a in reversed(atoms)]
    return atoms


def _graph(w: PuiseuxSeries) -> Arc:
    return Arc.graph(w)


def _rep(special: Sequence[PuiseuxSeries], atom_key: tuple, d: Exponent) -> Arc:
    k, part, _ = atom_key
    if part == 0 or d == INF:
        return _graph(special[k])
    lo, hi = special[k], special[k + 1]
    tau, lead = (hi - lo).leading()
    if part == 2:
        return _graph(lo + PuiseuxSeries.monomial(lead / 2, tau))
    if part == 1:
        return _graph(lo + PuiseuxSeries.monomial(1, d))
    return _graph(hi - PuiseuxSeries.monomial(1, d))


def _locate(special: Sequence[PuiseuxSeries], w: PuiseuxSeries) -> tuple:
    for k, lam in enumerate(special):
        c = _cmp(w, lam)
        if c == 0:
            return (k, 0, 0)
        if c < 0:
            if k == 0:
                break
            lo, hi = special[k - 1], lam
            tau = (hi - lo).order()
            da, db = (w - lo).order(), (hi - w).order()
            if da > tau:
                return (k - 1, 1, -da)
            if db > tau:
                return (k - 1, 3, db)
            return (k - 1, 2, 0)
    raise LipgeoError("arc lies outside the triangle")


def _atoms(f: FunctionExpr, special: Sequence[PuiseuxSeries]) -> list[Atom]:
    out: list[Atom] = []
    for k, lam in enumerate(special):
        q = ord_on_arc(f, _graph(lam))
        out.append(Atom("special", k, 0, INF, INF, 0, q))
        if k + 1 == len(special):
            break
        lo, hi = lam, special[k + 1]
        tau, _ = (hi - lo).leading()
        res = resolve_in_sector(f, lo, hi)
        fan_a = _fan_atoms(k, 1, taylor(res.f, lo), tau)
        fan_b = _fan_atoms(k, 3, taylor(res.f, hi), tau)
        q_mid = ord_on_arc(f, _rep(special, (k, 2, 0), tau))
        if fan_a[-1].q1 != q_mid or fan_b[0].q0 != q_mid:
            raise NotAdmissible("order jumps at the middle of a sector; f is not Lipschitz there")
        if fan_a[0].q0 != q or fan_b[-1].q1 != ord_on_arc(f, _graph(hi)):
            raise NotAdmissible("order jumps at a special arc; f is not Lipschitz there")
        out.extend(fan_a)
        out.append(Atom("middle", k, 2, tau, tau, 0, q_mid))
        out.extend(fan_b)
    return out


# ---------------------------------------------------------------------------
# slicing


def _law(a: Atom) -> WidthFunction:
    return WidthFunction(Fraction(1, a.j), -a.o / a.j)


def _split_items(atoms: Sequence[Atom]) -> list:
    """Alternate runs (lists of constant atoms) and single varying atoms: R0 V1 R1 ... Vn Rn."""
    items: list = [[]]
    for a in atoms:
        if a.varying:
            items.append(a)
            items.append([])
        else:
            run = items[-1]
            if run and run[-1].q1 != a.q0:
                raise NotAdmissible("order is discontinuous along the triangle")
            run.append(a)
    return items


def _prefix(run: Sequence[Atom], thr: Exponent) -> tuple[list[Portion], list[Portion]]:
    """Longest prefix of a run with depth >= thr, and the remainder."""
    taken: list[Portion] = []
    for i, a in enumerate(run):
        if min(a.d0, a.d1) >= thr:
            taken.append(Portion(a, a.d0, a.d1))
            continue
        rest = [Portion(b, b.d0, b.d1) for b in run[i + 1:]]
        if a.d0 >= thr:  # depth falls through thr inside this atom
            taken.append(Portion(a, a.d0, thr))
            rest.insert(0, Portion(a, thr, a.d1))
        else:
            rest.insert(0, Portion(a, a.d0, a.d1))
        return taken, rest
    return taken, []


def _suffix(run: Sequence[Portion], thr: Exponent) -> tuple[list[Portion], list[Portion]]:
    """Longest suffix with depth >= thr, and the remainder before it."""
    taken: list[Portion] = []
    for i in range(len(run) - 1, -1, -1):
        p = run[i]
        if p.min_depth >= thr:
            taken.insert(0, p)
            continue
        rest = list(run[:i])
        if p.d1 >= thr:
            taken.insert(0, Portion(p.atom, thr, p.d1))
            rest.append(Portion(p.atom, p.d0, thr))
        else:
            rest.append(p)
        return taken, rest
    return taken, []


def _slices(atoms: Sequence[Atom]) -> list[tuple[PizzaSlice, Portion | Atom, Exponent, Portion | Atom, Exponent]]:
    """Slices as ``(slice, first piece, start depth, last piece, end depth)``."""
    items = _split_items(atoms)
    runs = [list(r) for r in items[0::2]]
    vs: list[Atom] = items[1::2]
    if not vs:
        whole = [Portion(a, a.d0, a.d1) for a in runs[0]]
        q0 = whole[0].atom.q0
        beta = min(p.min_depth for p in whole)
        return [(PizzaSlice(q0, q0, beta, None), whole[0], whole[0].d0, whole[-1], whole[-1].d1)]

    # chains of varying atoms sharing one law and direction
    chains: list[tuple[int, int]] = []
    i = 0
    while i < len(vs):
        s = i
        law, up = _law(vs[i]), vs[i].q1 > vs[i].q0
        while i + 1 < len(vs):
            nxt = vs[i + 1]
            run = runs[i + 1]
            if _law(nxt) != law or (nxt.q1 > nxt.q0) != up:
                break
            if run and min(min(a.d0, a.d1) for a in run) != law(run[0].q0):
                break
            i += 1
        chains.append((s, i))
        i += 1

    out = []
    pending: list[Portion] = [Portion(a, a.d0, a.d1) for a in runs[0]]
    for ci, (s, e) in enumerate(chains):
        law = _law(vs[s])
        # left: suffix of what is left of the previous run
        left, rest = _suffix(pending, vs[s].d0)
        if rest:
            q0 = rest[0].atom.q0
            out.append((PizzaSlice(q0, q0, min(p.min_depth for p in rest), None),
                        rest[0], rest[0].d0, rest[-1], rest[-1].d1))
        # right: prefix of the run after the chain
        right, pending = _prefix(runs[e + 1], vs[e].d1)
        first: Portion | Atom = left[0] if left else vs[s]
        last: Portion | Atom = right[-1] if right else vs[e]
        d_first = left[0].d0 if left else vs[s].d0
        d_last = right[-1].d1 if right else vs[e].d1
        q_in = vs[s].q0
        q_out = vs[e].q1
        beta = law(min(q_in, q_out))
        out.append((PizzaSlice(q_in, q_out, beta, law), first, d_first, last, d_last))
    if pending:
        q0 = pending[0].atom.q0
        out.append((PizzaSlice(q0, q0, min(p.min_depth for p in pending), None),
                    pending[0], pending[0].d0, pending[-1], pending[-1].d1))
    return out


def _atom_of(x: Portion | Atom) -> Atom:
    return x.atom if isinstance(x, Portion) else x


# ---------------------------------------------------------------------------
# public API


def _scan(f: FunctionExpr, special: Sequence[PuiseuxSeries], atoms: Sequence[Atom]) -> list[ScannedArc]:
    out = []
    for a in atoms:
        if a.kind == "fan":
            lo, hi = sorted((a.d0, a.d1))
            depths = [lo + 1] if hi == INF else [(lo + hi) / 2]
            if hi != INF and lo > _tau(special, a.sector):
                depths.append(lo)
        elif a.kind == "middle":
            depths = [a.d0]
        else:
            depths = [INF]
        for d in depths:
            key = a.key(d)
            arc = _rep(special, key, d)
            q = ord_on_arc(f, arc)
            if q != a.q(d):
                raise LipgeoError(f"internal order mismatch at {key}: {q} vs {a.q(d)}")
            out.append(ScannedArc(arc, q, d, key))
    return out


def _tau(special: Sequence[PuiseuxSeries], k: int) -> Fraction:
    return (special[k + 1] - special[k]).order()


@functools.lru_cache(maxsize=256)
def _extract(f: FunctionExpr, beta: Fraction, depth: int, max_exp: Fraction) -> Extraction:
    # max_exp is only part of the cache key: a result found under a larger
    # bound must not answer a call made under a smaller one
    special = special_arcs(f, beta, depth)
    atoms = _atoms(f, special)
    raw = _slices(atoms)
    slices = []
    for sl, first, d0, last, d1 in raw:
        a0, a1 = _atom_of(first), _atom_of(last)
        k0, k1 = a0.key(d0), a1.key(d1)
        slices.append(ExtractedSlice(sl, Boundary(k0, a0.q(d0), _rep(special, k0, d0)),
                                     Boundary(k1, a1.q(d1), _rep(special, k1, d1))))
    pizza = minimalize(AbstractPizza(tuple(s.slice for s in slices), beta))
    scanned = _scan(f, special, atoms)
    return Extraction(f, beta, tuple(special), tuple(atoms), tuple(slices), tuple(scanned), pizza)


def extraction(f: FunctionExpr, triangle_beta, depth: int = DEFAULT_DEPTH) -> Extraction:
    beta = rational(triangle_beta)
    if beta < 1:
        raise LipgeoError("triangle exponent must be >= 1")
    return _extract(f, beta, int(depth), max_exponent_bound())


def extract_pizza(f: FunctionExpr, triangle_beta, depth: int = DEFAULT_DEPTH) -> AbstractPizza:
    """Minimal pizza of ``f`` on ``T_beta``."""
    return extraction(f, triangle_beta, depth).pizza


def width_at_arc(f: FunctionExpr, triangle_beta, g: Arc, depth: int = DEFAULT_DEPTH) -> Exponent:
    """Width of ``g``: its tangency order with the supporting arc of its slice.

    On point slices this is the slice exponent.  The supporting arc itself
    gets the width law's value at its end rather than ``inf``.
    """
    ex = extraction(f, triangle_beta, depth)
    if g.dim != 2 or g.coords[0] != PuiseuxSeries.monomial(1, 1):
        raise LipgeoError("expected a plane arc with u = t")
    w = g.coords[1]
    if in_triangle_sign(w, ex.beta) < 0:
        raise LipgeoError("arc lies outside the triangle")
    key = ex.locate(w)
    for s in ex.slices:
        if s.start.key <= key <= s.end.key:
            sl = s.slice
            if sl.is_point:
                return sl.beta
            end = s.start if sl.supporting_end == "in" else s.end
            return min(arc_tord(g, end.arc), sl.mu(end.q))
    raise LipgeoError("arc not covered by any slice")


__all__ = [
    "DEFAULT_DEPTH",
    "Extraction",
    "NotAdmissible",
    "extract_pizza",
    "extraction",
    "special_arcs",
    "width_at_arc",
]
