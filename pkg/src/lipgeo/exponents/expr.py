"""Expression trees for functions ``f(u, w)`` on a plane Hölder triangle.

Nodes: monomials ``c * u^pu * w^pw``, sums, differences, products, absolute
value, min and max.  Trees are immutable and hashable, so they can key
caches.  Whether an expression is Lipschitz is the caller's business.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping

import numpy as np

from .arcs import Arc
from .series import (
    INF,
    Exponent,
    LipgeoError,
    PuiseuxSeries,
    Rational,
    ResolutionBoundExceeded,
    format_exponent,
    max_exponent_bound,
    rational,
)


class UnresolvedTie(ResolutionBoundExceeded):
    """Two branches of abs/min/max agree up to the resolution bound."""


class FunctionExpr:
    """Base class; use :class:`Mono` and the operator overloads to build trees."""

    def __add__(self, other: "FunctionExpr") -> "FunctionExpr":
        return Add((self, _expr(other)))

    def __radd__(self, other):
        return Add((_expr(other), self))

    def __sub__(self, other: "FunctionExpr") -> "FunctionExpr":
        return Sub(self, _expr(other))

    def __rsub__(self, other):
        return Sub(_expr(other), self)

    def __mul__(self, other: "FunctionExpr") -> "FunctionExpr":
        return Mul((self, _expr(other)))

    def __rmul__(self, other):
        return Mul((_expr(other), self))

    def __neg__(self) -> "FunctionExpr":
        return Mul((Mono(Fraction(-1)), self))

    def __abs__(self) -> "FunctionExpr":
        return Abs(self)

    def children(self) -> tuple["FunctionExpr", ...]:
        return ()

    def map(self, fn: Callable[["FunctionExpr"], "FunctionExpr"]) -> "FunctionExpr":
        """Rebuild the tree bottom-up, applying ``fn`` to every node."""
        raise NotImplementedError

    def nodes(self):
        yield self
        for ch in self.children():
            yield from ch.nodes()


def _expr(x) -> FunctionExpr:
    if isinstance(x, FunctionExpr):
        return x
    return Mono(rational(x))


@dataclass(frozen=True)
class Mono(FunctionExpr):
    c: Fraction = Fraction(1)
    pu: Fraction = Fraction(0)
    pw: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        for name in ("c", "pu", "pw"):
            object.__setattr__(self, name, rational(getattr(self, name)))
        if self.pu < 0 or self.pw < 0:
            raise LipgeoError("monomial exponents must be non-negative")

    def map(self, fn):
        return fn(self)


@dataclass(frozen=True)
class Add(FunctionExpr):
    args: tuple[FunctionExpr, ...]

    def children(self):
        return self.args

    def map(self, fn):
        return fn(Add(tuple(a.map(fn) for a in self.args)))


@dataclass(frozen=True)
class Sub(FunctionExpr):
    a: FunctionExpr
    b: FunctionExpr

    def children(self):
        return (self.a, self.b)

    def map(self, fn):
        return fn(Sub(self.a.map(fn), self.b.map(fn)))


@dataclass(frozen=True)
class Mul(FunctionExpr):
    args: tuple[FunctionExpr, ...]

    def children(self):
        return self.args

    def map(self, fn):
        return fn(Mul(tuple(a.map(fn) for a in self.args)))


@dataclass(frozen=True)
class Abs(FunctionExpr):
    a: FunctionExpr

    def children(self):
        return (self.a,)

    def map(self, fn):
        return fn(Abs(self.a.map(fn)))


@dataclass(frozen=True)
class Min(FunctionExpr):
    args: tuple[FunctionExpr, ...]

    def children(self):
        return self.args

    def map(self, fn):
        return fn(Min(tuple(a.map(fn) for a in self.args)))


@dataclass(frozen=True)
class Max(FunctionExpr):
    args: tuple[FunctionExpr, ...]

    def children(self):
        return self.args

    def map(self, fn):
        return fn(Max(tuple(a.map(fn) for a in self.args)))


U = Mono(1, 1, 0)
W = Mono(1, 0, 1)


def mono(c: Rational = 1, pu: Rational = 0, pw: Rational = 0) -> Mono:
    return Mono(rational(c), rational(pu), rational(pw))


def fmin(*args: FunctionExpr) -> Min:
    return Min(tuple(_expr(a) for a in args))


def fmax(*args: FunctionExpr) -> Max:
    return Max(tuple(_expr(a) for a in args))


# ---------------------------------------------------------------------------
# substitution into series


def substitute(f: FunctionExpr, w: PuiseuxSeries, bound: Exponent) -> PuiseuxSeries:
    """Series of ``f(t, w(t))`` truncated at absolute exponent ``bound``.

    abs/min/max are resolved by the sign of the leading coefficient of the
    relevant (difference) series; exact ties pick either branch.
    """
    if isinstance(f, Mono):
        if f.c == 0:
            return PuiseuxSeries()
        wp = w.power(f.pw, bound) if f.pw else PuiseuxSeries.constant(1)
        return (wp * f.c).shift(f.pu).truncate(bound)
    if isinstance(f, Add):
        out = PuiseuxSeries()
        for a in f.args:
            out = out + substitute(a, w, bound)
        return out.truncate(bound)
    if isinstance(f, Sub):
        return (substitute(f.a, w, bound) - substitute(f.b, w, bound)).truncate(bound)
    if isinstance(f, Mul):
        out = PuiseuxSeries.constant(1)
        for a in f.args:
            out = (out * substitute(a, w, bound)).truncate(bound)
        return out
    if isinstance(f, Abs):
        s = substitute(f.a, w, bound)
        return -s if _sign(s) < 0 else s
    if isinstance(f, (Min, Max)):
        vals = [substitute(a, w, bound) for a in f.args]
        best = vals[0]
        for v in vals[1:]:
            d = _sign(v - best)
            if (d < 0) if isinstance(f, Min) else (d > 0):
                best = v
        return best
    raise LipgeoError(f"unknown expression node {type(f).__name__}")


def _sign(s: PuiseuxSeries) -> int:
    if not s.terms and not s.is_exact:
        raise UnresolvedTie(s.precision, "branch")
    return s.sign()


def _bounds(max_exp: Exponent | None) -> list[Fraction]:
    top = rational(max_exp) if max_exp is not None else max_exponent_bound()
    steps = [b for b in (Fraction(8), Fraction(16), Fraction(32)) if b < top]
    return steps + [top]


def substitute_arc(f: FunctionExpr, g: Arc, max_exp: Exponent | None = None) -> PuiseuxSeries:
    """Iteratively deepened substitution; the result has at least one exact term
    or is exactly zero, else :class:`ResolutionBoundExceeded`."""
    w = _plane_w(g)
    last: Exception | None = None
    for bound in _bounds(max_exp):
        try:
            s = substitute(f, w, bound)
        except UnresolvedTie as exc:
            last = exc
            continue
        if s.terms or s.is_exact:
            return s
        last = ResolutionBoundExceeded(bound)
    assert last is not None
    raise last


def ord_on_arc(f: FunctionExpr, g: Arc, max_exp: Exponent | None = None) -> Exponent:
    """Order of ``f`` along a plane arc ``u = t, w = w(t)``."""
    return substitute_arc(f, g, max_exp).order()


def _plane_w(g: Arc) -> PuiseuxSeries:
    if g.dim != 2 or g.param != "coordinate" or g.coords[0] != PuiseuxSeries.monomial(1, 1):
        raise LipgeoError("expected a plane arc with u = t")
    return g.coords[1]


# ---------------------------------------------------------------------------
# numeric evaluation


def evaluate(f: FunctionExpr, u, w):
    """Vectorized float evaluation at ``u > 0``, ``w >= 0``."""
    if isinstance(f, Mono):
        out = float(f.c) * np.power(u, float(f.pu))
        return out * np.power(w, float(f.pw)) if f.pw else out
    if isinstance(f, Add):
        return sum(evaluate(a, u, w) for a in f.args)
    if isinstance(f, Sub):
        return evaluate(f.a, u, w) - evaluate(f.b, u, w)
    if isinstance(f, Mul):
        out = 1.0
        for a in f.args:
            out = out * evaluate(a, u, w)
        return out
    if isinstance(f, Abs):
        return np.abs(evaluate(f.a, u, w))
    if isinstance(f, Min):
        return np.minimum.reduce([np.asarray(evaluate(a, u, w)) for a in f.args])
    if isinstance(f, Max):
        return np.maximum.reduce([np.asarray(evaluate(a, u, w)) for a in f.args])
    raise LipgeoError(f"unknown expression node {type(f).__name__}")


def evaluate_mp(f: FunctionExpr, u, w):
    """Evaluation in the current mpmath precision (used by numerical oracles)."""
    import mpmath

    if isinstance(f, Mono):
        c = mpmath.mpf(f.c.numerator) / f.c.denominator
        out = c * u ** (mpmath.mpf(f.pu.numerator) / f.pu.denominator)
        return out * w ** (mpmath.mpf(f.pw.numerator) / f.pw.denominator) if f.pw else out
    if isinstance(f, Add):
        return mpmath.fsum(evaluate_mp(a, u, w) for a in f.args)
    if isinstance(f, Sub):
        return evaluate_mp(f.a, u, w) - evaluate_mp(f.b, u, w)
    if isinstance(f, Mul):
        out = mpmath.mpf(1)
        for a in f.args:
            out *= evaluate_mp(a, u, w)
        return out
    if isinstance(f, Abs):
        return abs(evaluate_mp(f.a, u, w))
    if isinstance(f, Min):
        return min(evaluate_mp(a, u, w) for a in f.args)
    if isinstance(f, Max):
        return max(evaluate_mp(a, u, w) for a in f.args)
    raise LipgeoError(f"unknown expression node {type(f).__name__}")


# ---------------------------------------------------------------------------
# rewriting


def scale(f: FunctionExpr, c: Rational) -> FunctionExpr:
    return Mul((Mono(rational(c)), f))


def swap_boundary(f: FunctionExpr, beta: Rational) -> FunctionExpr:
    """``f(u, u^beta - w)``: the orientation-reversing symmetry of ``T_beta``.

    Only integer powers of ``w`` can be rewritten exactly.
    """
    beta = rational(beta)
    from math import comb

    def rewrite(node: FunctionExpr) -> FunctionExpr:
        if not isinstance(node, Mono) or node.pw == 0:
            return node
        if node.pw.denominator != 1:
            raise LipgeoError("swap_boundary needs integer powers of w")
        k = node.pw.numerator
        terms = tuple(
            Mono(node.c * comb(k, j) * (-1) ** j, node.pu + beta * (k - j), Fraction(j))
            for j in range(k + 1)
        )
        return Add(terms)

    return f.map(rewrite)


# ---------------------------------------------------------------------------
# JSON

_OPS = {"add": Add, "mul": Mul, "min": Min, "max": Max}


def expr_to_json(f: FunctionExpr) -> dict:
    if isinstance(f, Mono):
        return {
            "op": "mono",
            "c": format_exponent(f.c),
            "pu": format_exponent(f.pu),
            "pw": format_exponent(f.pw),
        }
    if isinstance(f, Sub):
        return {"op": "sub", "args": [expr_to_json(f.a), expr_to_json(f.b)]}
    if isinstance(f, Abs):
        return {"op": "abs", "args": [expr_to_json(f.a)]}
    for name, cls in _OPS.items():
        if type(f) is cls:
            return {"op": name, "args": [expr_to_json(a) for a in f.children()]}
    raise LipgeoError(f"unknown expression node {type(f).__name__}")


def expr_from_json(data: Mapping) -> FunctionExpr:
    try:
        op = data["op"]
        if op == "mono":
            return Mono(rational(data.get("c", "1")), rational(data.get("pu", "0")),
                        rational(data.get("pw", "0")))
        args = [expr_from_json(a) for a in data["args"]]
    except (KeyError, TypeError) as exc:
        raise LipgeoError(f"malformed expression: {data!r}") from exc
    if op == "sub":
        if len(args) != 2:
            raise LipgeoError("sub takes two arguments")
        return Sub(args[0], args[1])
    if op == "abs":
        if len(args) != 1:
            raise LipgeoError("abs takes one argument")
        return Abs(args[0])
    if op in _OPS:
        if not args:
            raise LipgeoError(f"{op} needs arguments")
        return _OPS[op](tuple(args))
    raise LipgeoError(f"unknown op {op!r}")


__all__ = [
    "Abs", "Add", "FunctionExpr", "INF", "Max", "Min", "Mono", "Mul", "Sub", "U", "W",
    "UnresolvedTie", "evaluate", "evaluate_mp", "expr_from_json", "expr_to_json", "fmax",
    "fmin", "mono", "ord_on_arc", "scale", "substitute", "substitute_arc", "swap_boundary",
]
