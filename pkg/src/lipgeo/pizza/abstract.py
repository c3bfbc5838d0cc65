"""Abstract pizzas: ordered slices with order intervals and affine width laws."""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Mapping, Sequence

from ..exponents import INF, Exponent, LipgeoError, exponent, format_exponent, rational


@dataclass(frozen=True)
class WidthFunction:
    """``mu(q) = a q + b``; at ``q = inf`` the value is ``inf`` if ``a > 0`` and ``b`` if ``a = 0``."""

    a: Fraction
    b: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", rational(self.a))
        object.__setattr__(self, "b", rational(self.b))

    def __call__(self, q: Exponent) -> Exponent:
        if q == INF:
            if self.a > 0:
                return INF
            if self.a == 0:
                return self.b
            raise LipgeoError("negative slope has no value at q = inf")
        return self.a * q + self.b

    def to_json(self) -> dict:
        return {"a": format_exponent(self.a), "b": format_exponent(self.b)}


@dataclass(frozen=True)
class PizzaSlice:
    """One slice: order runs from ``q_in`` to ``q_out``; ``mu`` is ``None`` on point slices."""

    q_in: Exponent
    q_out: Exponent
    beta: Exponent
    mu: WidthFunction | None = None

    @property
    def is_point(self) -> bool:
        return self.q_in == self.q_out

    @property
    def Q(self) -> tuple[Exponent, Exponent]:
        return (min(self.q_in, self.q_out), max(self.q_in, self.q_out))

    @property
    def supporting_end(self) -> str:
        """The end where the width is largest: ``in``, ``out`` or ``none`` for points."""
        if self.is_point or self.mu is None or self.mu.a == 0:
            return "none"
        hi = self.q_in if self.q_in > self.q_out else self.q_out
        end_hi = "in" if hi == self.q_in else "out"
        if self.mu.a > 0:
            return end_hi
        return "out" if end_hi == "in" else "in"

    def reversed(self) -> "PizzaSlice":
        return replace(self, q_in=self.q_out, q_out=self.q_in)

    def key(self) -> tuple:
        mu = None if self.mu is None else (self.mu.a, self.mu.b)
        return (self.q_in, self.q_out, self.beta, mu)

    def to_json(self) -> dict:
        return {
            "q_in": format_exponent(self.q_in),
            "q_out": format_exponent(self.q_out),
            "beta": format_exponent(self.beta),
            "mu": None if self.mu is None else self.mu.to_json(),
            "supporting_end": self.supporting_end,
        }


@dataclass(frozen=True)
class AbstractPizza:
    slices: tuple[PizzaSlice, ...]
    triangle_beta: Exponent

    def reversed(self) -> "AbstractPizza":
        return AbstractPizza(tuple(s.reversed() for s in reversed(self.slices)), self.triangle_beta)

    def key(self) -> tuple:
        return (self.triangle_beta, tuple(s.key() for s in self.slices))

    def to_json(self) -> dict:
        return {"triangle_beta": format_exponent(self.triangle_beta),
                "slices": [s.to_json() for s in self.slices]}


def pizza_from_json(data: Mapping) -> AbstractPizza:
    try:
        slices = []
        for s in data["slices"]:
            mu = s.get("mu")
            slices.append(PizzaSlice(
                exponent(s["q_in"]), exponent(s["q_out"]), exponent(s["beta"]),
                None if mu is None else WidthFunction(rational(mu["a"]), rational(mu["b"])),
            ))
        return AbstractPizza(tuple(slices), exponent(data["triangle_beta"]))
    except (KeyError, TypeError, ZeroDivisionError) as exc:
        raise LipgeoError(f"malformed pizza: {exc}") from exc


def pizza_to_json(p: AbstractPizza) -> dict:
    return p.to_json()


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class PizzaViolation:
    slice: int
    clause: str


def _mu_le_q(mu: WidthFunction, lo: Exponent, hi: Exponent) -> bool:
    if mu(lo) > lo:
        return False
    if hi == INF:
        # a q + b <= q for all large q
        return mu.a < 1 or (mu.a == 1 and mu.b <= 0)
    return mu(hi) <= hi


def validate(p: AbstractPizza) -> list[PizzaViolation]:
    out: list[PizzaViolation] = []
    if not p.slices:
        return [PizzaViolation(-1, "a pizza needs at least one slice")]
    if p.triangle_beta == INF or p.triangle_beta < 1:
        out.append(PizzaViolation(-1, "triangle exponent must be a finite rational >= 1"))
    for i, s in enumerate(p.slices):
        lo, hi = s.Q
        if lo < 1:
            out.append(PizzaViolation(i, "Q must lie in [1, inf]"))
        if s.beta == INF or s.beta < 1:
            out.append(PizzaViolation(i, "beta must be a finite rational >= 1"))
        if s.is_point:
            if s.mu is not None and s.mu(lo) != s.beta:
                out.append(PizzaViolation(i, "point slice: mu must be the single value beta"))
            # a point slice has no width law; its exponent may exceed q
            # (f = u on a thin triangle has order 1 and width beta everywhere)
            continue
        if s.mu is None:
            out.append(PizzaViolation(i, "non-point slice needs a width law"))
            continue
        if s.mu.a == 0:
            out.append(PizzaViolation(i, "mu must be non-constant when Q is not a point"))
            continue
        if s.mu.a < 0 and hi == INF:
            out.append(PizzaViolation(i, "negative slope has no value at q = inf"))
            continue
        if not _mu_le_q(s.mu, lo, hi):
            out.append(PizzaViolation(i, "mu(q) <= q fails"))
        if min(s.mu(lo), s.mu(hi)) != s.beta:
            out.append(PizzaViolation(i, "min of mu over Q must equal beta"))
    for i, (s, t) in enumerate(zip(p.slices, p.slices[1:])):
        if s.q_out != t.q_in:
            out.append(PizzaViolation(i, "q_out differs from the next slice's q_in"))
    return out


# ---------------------------------------------------------------------------
# minimalization and equivalence


def _monotone(a: Exponent, b: Exponent, c: Exponent) -> bool:
    return (a <= b <= c) or (a >= b >= c)


def _merge(s: PizzaSlice, t: PizzaSlice) -> PizzaSlice | None:
    if s.q_out != t.q_in or not _monotone(s.q_in, s.q_out, t.q_out):
        return None
    if s.is_point and t.is_point:
        return PizzaSlice(s.q_in, s.q_out, min(s.beta, t.beta), None)
    if s.is_point or t.is_point:
        pt, other = (s, t) if s.is_point else (t, s)
        if other.mu(pt.q_in) != pt.beta:
            return None
        return PizzaSlice(s.q_in, t.q_out, min(s.beta, t.beta), other.mu)
    if s.mu != t.mu:
        return None
    return PizzaSlice(s.q_in, t.q_out, min(s.beta, t.beta), s.mu)


def minimalize(p: AbstractPizza) -> AbstractPizza:
    """Merge adjacent slices while q stays monotone and one width law fits both."""
    bad = validate(p)
    if bad:
        raise LipgeoError(f"invalid pizza: slice {bad[0].slice}: {bad[0].clause}")
    # runs of point slices collapse first; otherwise an absorption could strand
    # a larger-beta point and the result would depend on the merge order
    slices: list[PizzaSlice] = []
    for s in p.slices:
        if slices and s.is_point and slices[-1].is_point:
            slices[-1] = _merge(slices[-1], s)
        else:
            slices.append(s)
    changed = True
    while changed:
        changed = False
        for i in range(len(slices) - 1):
            m = _merge(slices[i], slices[i + 1])
            if m is not None:
                slices[i:i + 2] = [m]
                changed = True
                break
    return AbstractPizza(tuple(slices), p.triangle_beta)


def equivalent(p1: AbstractPizza, p2: AbstractPizza, oriented: bool = True) -> bool:
    """Equality of minimal forms; unoriented mode also accepts the reversal."""
    a, b = minimalize(p1), minimalize(p2)
    if a.key() == b.key():
        return True
    return not oriented and a.key() == b.reversed().key()


def make_pizza(slices: Sequence[tuple], triangle_beta) -> AbstractPizza:
    """Pizza from ``(q_in, q_out, beta, (a, b) or None)`` tuples."""
    out = []
    for q_in, q_out, beta, mu in slices:
        out.append(PizzaSlice(exponent(q_in), exponent(q_out), exponent(beta),
                              None if mu is None else WidthFunction(*mu)))
    return AbstractPizza(tuple(out), exponent(triangle_beta))
