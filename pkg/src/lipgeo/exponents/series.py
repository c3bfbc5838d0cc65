"""Extended exponents and truncated Puiseux series with exact rational data.

An extended exponent is either a :class:`fractions.Fraction` or ``INF``
(``math.inf``).  Python orders ``Fraction`` against ``inf`` correctly, so
``min``/``max``/``sorted`` work without a wrapper type.

A :class:`PuiseuxSeries` is a finite sum ``sum c_k t^{e_k}`` together with a
*precision*: every term with exponent below the precision is known exactly,
nothing is known at or above it.  Exact (untruncated) series carry
precision ``INF``.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Union

INF = math.inf

Exponent = Union[Fraction, float]
Rational = Union[int, Fraction, str]

DEFAULT_MAX_EXP = 64


class LipgeoError(ValueError):
    """Base class for all errors raised by this package."""


class ResolutionBoundExceeded(LipgeoError):
    """A result could not be decided below the configured exponent bound."""

    def __init__(self, bound: Exponent, what: str = "order"):
        self.bound = bound
        super().__init__(f"{what} undecided: >= {format_exponent(bound)} (resolution bound)")


class IrrationalCoefficient(LipgeoError):
    """An exact computation would need an irrational coefficient."""


def max_exponent_bound() -> Fraction:
    """Series resolution bound, overridable through ``LIPGEO_MAX_EXP``."""
    raw = os.environ.get("LIPGEO_MAX_EXP")
    return Fraction(raw) if raw else Fraction(DEFAULT_MAX_EXP)


def exponent(value: Rational | float | None) -> Exponent:
    """Parse an extended exponent from ``"p/q"``, ``"inf"``, int or Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        if math.isinf(value) and value > 0:
            return INF
        raise LipgeoError(f"float exponents are not exact: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        s = value.strip().lower()
        if s in ("inf", "infinity", "oo", "∞"):
            return INF
        try:
            return Fraction(s)
        except (ValueError, ZeroDivisionError) as exc:
            raise LipgeoError(f"bad exponent {value!r}") from exc
    raise LipgeoError(f"bad exponent {value!r}")


def rational(value: Rational) -> Fraction:
    q = exponent(value)
    if q == INF:
        raise LipgeoError("expected a finite rational, got inf")
    return q  # type: ignore[return-value]


def format_exponent(value: Exponent) -> str:
    if value == INF:
        return "inf"
    q = Fraction(value)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def ext_min_max_cmp(a: Exponent, b: Exponent) -> tuple[Exponent, Exponent, int]:
    """Return ``(min, max, ordering)`` with ordering -1, 0 or 1 for a<b, a==b, a>b."""
    a, b = exponent(a), exponent(b)
    if a == b:
        return a, b, 0
    return (a, b, -1) if a < b else (b, a, 1)


def rational_root(value: Fraction, n: int) -> Fraction:
    """Exact ``value ** (1/n)`` or :class:`IrrationalCoefficient`."""
    if n == 1:
        return value
    if value < 0:
        if n % 2 == 0:
            raise IrrationalCoefficient(f"even root of negative {value}")
        return -rational_root(-value, n)

    def iroot(k: int) -> int:
        r = round(k ** (1.0 / n)) if k < 2**1000 else int(math.exp(math.log(k) / n))
        for cand in (r - 1, r, r + 1):
            if cand >= 0 and cand**n == k:
                return cand
        # large values: integer Newton iteration
        lo, hi = 0, 1 << (k.bit_length() // n + 2)
        while lo < hi:
            mid = (lo + hi) // 2
            if mid**n < k:
                lo = mid + 1
            else:
                hi = mid
        if lo**n != k:
            raise IrrationalCoefficient(f"{value}^(1/{n}) is irrational")
        return lo

    return Fraction(iroot(value.numerator), iroot(value.denominator))


def rational_power(value: Fraction, p: Fraction) -> Fraction:
    if p.denominator == 1:
        return value ** p.numerator
    return rational_root(value, p.denominator) ** p.numerator


def _binom(p: Fraction, j: int) -> Fraction:
    out = Fraction(1)
    for i in range(j):
        out = out * (p - i) / (i + 1)
    return out


@dataclass(frozen=True)
class PuiseuxSeries:
    """Finite Puiseux polynomial in ``t`` known exactly below ``precision``."""

    terms: tuple[tuple[Fraction, Fraction], ...] = ()
    precision: Exponent = INF

    def __post_init__(self) -> None:
        last = None
        for e, c in self.terms:
            if c == 0:
                raise LipgeoError("zero coefficients are not stored")
            if last is not None and e <= last:
                raise LipgeoError("exponents must be strictly increasing")
            if e >= self.precision:
                raise LipgeoError("term at or above the series precision")
            last = e

    # construction -------------------------------------------------------
    @classmethod
    def from_terms(
        cls, pairs: Iterable[tuple[Rational, Rational]] | Mapping[Rational, Rational],
        precision: Exponent = INF,
    ) -> "PuiseuxSeries":
        items = pairs.items() if isinstance(pairs, Mapping) else pairs
        acc: dict[Fraction, Fraction] = {}
        for e, c in items:
            e, c = rational(e), rational(c)
            acc[e] = acc.get(e, Fraction(0)) + c
        return cls._make(acc, precision)

    @classmethod
    def _make(cls, acc: Mapping[Fraction, Fraction], precision: Exponent) -> "PuiseuxSeries":
        terms = tuple(sorted((e, c) for e, c in acc.items() if c != 0 and e < precision))
        return cls(terms, precision)

    @classmethod
    def monomial(cls, c: Rational, e: Rational) -> "PuiseuxSeries":
        return cls.from_terms([(e, c)])

    @classmethod
    def constant(cls, c: Rational) -> "PuiseuxSeries":
        return cls.from_terms([(0, c)])

    @classmethod
    def zero(cls) -> "PuiseuxSeries":
        return cls()

    # queries ------------------------------------------------------------
    @property
    def is_exact(self) -> bool:
        return self.precision == INF

    def is_zero(self) -> bool:
        """True only for the exactly known zero series."""
        return not self.terms and self.is_exact

    def order(self) -> Exponent:
        """Lowest exponent with a nonzero coefficient; ``INF`` for exact zero."""
        if self.terms:
            return self.terms[0][0]
        if self.is_exact:
            return INF
        raise ResolutionBoundExceeded(self.precision)

    def leading(self) -> tuple[Fraction, Fraction]:
        if not self.terms:
            if self.is_exact:
                raise LipgeoError("zero series has no leading term")
            raise ResolutionBoundExceeded(self.precision)
        return self.terms[0]

    def sign(self) -> int:
        """Sign for small positive ``t``: sign of the leading coefficient."""
        if not self.terms:
            if self.is_exact:
                return 0
            raise ResolutionBoundExceeded(self.precision, "sign")
        return 1 if self.terms[0][1] > 0 else -1

    def coefficient(self, e: Rational) -> Fraction:
        e = rational(e)
        if e >= self.precision:
            raise ResolutionBoundExceeded(self.precision, "coefficient")
        for ee, c in self.terms:
            if ee == e:
                return c
        return Fraction(0)

    def _low(self) -> Exponent:
        return self.terms[0][0] if self.terms else self.precision

    # arithmetic ---------------------------------------------------------
    def truncate(self, bound: Exponent) -> "PuiseuxSeries":
        if bound >= self.precision:
            return self
        if self.is_exact and (not self.terms or self.terms[-1][0] < bound):
            return self
        return PuiseuxSeries(tuple((e, c) for e, c in self.terms if e < bound), bound)

    def __neg__(self) -> "PuiseuxSeries":
        return PuiseuxSeries(tuple((e, -c) for e, c in self.terms), self.precision)

    def __add__(self, other: "PuiseuxSeries | Rational") -> "PuiseuxSeries":
        other = _coerce(other)
        prec = min(self.precision, other.precision)
        acc: dict[Fraction, Fraction] = {}
        for e, c in self.terms + other.terms:
            acc[e] = acc.get(e, Fraction(0)) + c
        return PuiseuxSeries._make(acc, prec)

    __radd__ = __add__

    def __sub__(self, other: "PuiseuxSeries | Rational") -> "PuiseuxSeries":
        return self + (-_coerce(other))

    def __rsub__(self, other: "PuiseuxSeries | Rational") -> "PuiseuxSeries":
        return _coerce(other) - self

    def __mul__(self, other: "PuiseuxSeries | Rational") -> "PuiseuxSeries":
        other = _coerce(other)
        if self.is_zero() or other.is_zero():
            return PuiseuxSeries()
        prec = min(self._low() + other.precision, other._low() + self.precision)
        acc: dict[Fraction, Fraction] = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                e = e1 + e2
                if e < prec:
                    acc[e] = acc.get(e, Fraction(0)) + c1 * c2
        return PuiseuxSeries._make(acc, prec)

    __rmul__ = __mul__

    def mul_truncated(self, other: "PuiseuxSeries", bound: Exponent) -> "PuiseuxSeries":
        return (self * other).truncate(bound)

    def power(self, p: Rational, bound: Exponent = INF) -> "PuiseuxSeries":
        """``self ** p`` for rational ``p``, truncated at ``bound``.

        Non-negative integer powers of exact series are computed exactly.
        Other powers use the binomial series around the leading term and need
        a rational ``p``-th power of the leading coefficient.
        """
        p = rational(p)
        if p == 0:
            return PuiseuxSeries.constant(1)
        if self.is_zero():
            if p < 0:
                raise LipgeoError("negative power of the zero series")
            return PuiseuxSeries()
        if p.denominator == 1 and p > 0:
            out = PuiseuxSeries.constant(1)
            base = self
            n = p.numerator
            while n:
                if n & 1:
                    out = (out * base).truncate(bound)
                n >>= 1
                if n:
                    base = (base * base).truncate(bound)
            return out
        e0, c0 = self.leading()
        head = PuiseuxSeries.monomial(rational_power(c0, p), e0 * p)
        # self = c0 t^e0 (1 + h), ord h > 0
        h = PuiseuxSeries(
            tuple((e - e0, c / c0) for e, c in self.terms[1:]), self.precision - e0
        )
        target = bound - e0 * p
        if h.is_zero():
            return head.truncate(bound)
        rel_prec = min(h.precision, target)
        acc = PuiseuxSeries.constant(1)
        hj = PuiseuxSeries.constant(1)
        hmin = h._low()
        j = 0
        while True:
            j += 1
            if j * hmin >= rel_prec:
                break
            hj = (hj * h).truncate(rel_prec)
            acc = acc + _binom(p, j) * hj
        acc = PuiseuxSeries(acc.terms, min(acc.precision, rel_prec)).truncate(rel_prec)
        return (head * acc).truncate(bound)

    def shift(self, e: Rational) -> "PuiseuxSeries":
        """Multiply by ``t^e``."""
        e = rational(e)
        return PuiseuxSeries(tuple((x + e, c) for x, c in self.terms), self.precision + e)

    # numerics -----------------------------------------------------------
    def evaluate(self, t: float) -> float:
        return float(sum(float(c) * t ** float(e) for e, c in self.terms))

    def evaluate_mp(self, t):  # t: mpmath.mpf
        import mpmath

        return mpmath.fsum(
            mpmath.mpf(c.numerator) / c.denominator * t ** (mpmath.mpf(e.numerator) / e.denominator) for e, c in self.terms
        )

    def __str__(self) -> str:
        if not self.terms:
            body = "0"
        else:
            body = " + ".join(f"{c}*t^{format_exponent(e)}" for e, c in self.terms)
        if not self.is_exact:
            body += f" + O(t^{format_exponent(self.precision)})"
        return body


def _coerce(x: "PuiseuxSeries | Rational") -> PuiseuxSeries:
    if isinstance(x, PuiseuxSeries):
        return x
    return PuiseuxSeries.constant(rational(x))


def series_order(s: PuiseuxSeries) -> Exponent:
    return s.order()


def series_to_json(s: PuiseuxSeries) -> list[dict[str, str]]:
    if not s.is_exact:
        raise LipgeoError("only exact series are serialized")
    return [{"exp": format_exponent(e), "c": format_exponent(c)} for e, c in s.terms]


def series_from_json(data: list[Mapping[str, str]]) -> PuiseuxSeries:
    return PuiseuxSeries.from_terms([(d["exp"], d["c"]) for d in data])
