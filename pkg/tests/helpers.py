"""Shared generators for randomized and property-based tests."""

from __future__ import annotations

import random
import time
from contextlib import contextmanager
from fractions import Fraction

from hypothesis import strategies as st

from lipgeo.complexes import HolderComplex
from lipgeo.exponents import INF, Arc, PuiseuxSeries, W, fmax, fmin, mono
from lipgeo.pizza import AbstractPizza, PizzaSlice, WidthFunction

# ---------------------------------------------------------------------------
# plain random generators (seeded, used by the acceptance criteria)


def random_beta(rng: random.Random, top: int = 5) -> Fraction:
    """Rational in [1, top] with denominator at most 4."""
    q = rng.randint(1, 4)
    return Fraction(rng.randint(q, top * q), q)


def random_complex(rng: random.Random, max_vertices: int = 12, max_edges: int = 20) -> HolderComplex:
    n = rng.randint(2, max_vertices)
    m = rng.randint(1, max_edges)
    edges = []
    for _ in range(m):
        a, b = rng.sample(range(n), 2)
        edges.append((f"v{a}", f"v{b}", random_beta(rng)))
    return HolderComplex.build(edges)


def random_cycle(rng: random.Random, min_len: int = 2, max_len: int = 6) -> HolderComplex:
    return HolderComplex.cycle([random_beta(rng, 3) for _ in range(rng.randint(min_len, max_len))])


def shuffled_copy(c: HolderComplex, rng: random.Random) -> HolderComplex:
    """Same complex with fresh vertex and edge names and a shuffled edge order."""
    names = [f"x{i}" for i in range(len(c.vertices))]
    rng.shuffle(names)
    vmap = dict(zip(c.vertices, names))
    edges = list(c.edges)
    rng.shuffle(edges)
    return HolderComplex.build(((vmap[e.ends[1]], vmap[e.ends[0]], e.beta) for e in edges),
                               ids=[f"h{i}" for i in range(len(edges))])


def random_function(rng: random.Random, beta: Fraction):
    """Expression built from factors ``w - c u^e`` and ``u^k`` combined by product, min and max."""
    factors = []
    for _ in range(rng.randint(1, 3)):
        if rng.random() < 0.7:
            e = beta + rng.choice([0, Fraction(1, 2), 1, 2]) if rng.random() < 0.5 \
                else rng.choice([1, Fraction(3, 2), 2, 3])
            factors.append(W - mono(rng.choice([Fraction(1, 2), 1, 2]), e))
        else:
            factors.append(mono(1, rng.choice([1, 2])))
    f = factors[0]
    for g in factors[1:]:
        op = rng.choice(["mul", "min", "max"])
        f = f * g if op == "mul" else fmin(f, g) if op == "min" else fmax(f, g)
    return abs(f) if rng.random() < 0.6 else f * mono(1, rng.choice([0, 1]))


def random_series(rng: random.Random, lo: Fraction = Fraction(1), terms: int = 3) -> PuiseuxSeries:
    exps = sorted({lo + Fraction(rng.randint(0, 12), rng.choice([1, 2, 3])) for _ in range(terms)})
    return PuiseuxSeries.from_terms({e: Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.randint(1, 3))
                                     for e in exps})


def random_arc_family(rng: random.Random, size: int, dim: int = 3) -> list[Arc]:
    """Space arcs sharing random prefixes of one base arc, so tangency orders often tie."""
    base = [random_series(rng, terms=4) for _ in range(dim - 1)]
    out = []
    for _ in range(size):
        cut = Fraction(rng.randint(2, 12), 2)
        coords = [PuiseuxSeries.from_terms({e: c for e, c in b.terms if e < cut}) + random_series(rng, cut)
                  for b in base]
        out.append(Arc((PuiseuxSeries.monomial(1, 1),) + tuple(coords)))
    return out


def random_pizza(rng: random.Random) -> AbstractPizza:
    qs = [Fraction(rng.randint(1, 6))]
    slices = []
    law = None
    for _ in range(rng.randint(1, 5)):
        q0 = qs[-1]
        if rng.random() < 0.3:
            slices.append(PizzaSlice(q0, q0, Fraction(rng.randint(1, 5)), None))
            continue
        choices = [Fraction(k) for k in range(1, 8) if k != q0]
        if q0 != INF:
            choices.append(INF)
        q1 = rng.choice(choices) if q0 != INF else Fraction(rng.randint(1, 6))
        lo = min(q0, q1)
        if law is None or rng.random() < 0.5:
            a = rng.choice([Fraction(1), Fraction(1, 2), Fraction(1, 3)])
            b = rng.choice([(1 - a) * lo, 1 - a * lo])
            law = WidthFunction(a, b)
        if law(lo) < 1 or law(lo) > lo:
            law = WidthFunction(1, 0)
        slices.append(PizzaSlice(q0, q1, law(lo), law))
        qs.append(q1)
    return AbstractPizza(tuple(slices), Fraction(rng.randint(1, 3)))


def plane_arc(terms: dict) -> Arc:
    return Arc.graph(terms)


# ---------------------------------------------------------------------------
# hypothesis strategies

small_fractions = st.builds(Fraction, st.integers(-9, 9), st.integers(1, 4))
nonzero_fractions = small_fractions.filter(lambda x: x != 0)
exponents_ge1 = st.builds(lambda p, q: Fraction(p, q), st.integers(4, 24), st.just(4))


@st.composite
def series(draw, min_exp: Fraction = Fraction(1), max_terms: int = 4) -> PuiseuxSeries:
    exps = draw(st.lists(st.builds(lambda k: min_exp + Fraction(k, 4), st.integers(0, 16)),
                         max_size=max_terms, unique=True))
    return PuiseuxSeries.from_terms({e: draw(nonzero_fractions) for e in exps})


@st.composite
def plane_arcs(draw) -> Arc:
    return Arc((PuiseuxSeries.monomial(1, 1), draw(series())))


@st.composite
def space_arcs(draw, dim: int = 3) -> Arc:
    return Arc((PuiseuxSeries.monomial(1, 1),) + tuple(draw(series()) for _ in range(dim - 1)))


@st.composite
def complexes(draw, max_vertices: int = 7, max_edges: int = 10) -> HolderComplex:
    seed = draw(st.integers(0, 2**32 - 1))
    return random_complex(random.Random(seed), max_vertices, max_edges)


# ---------------------------------------------------------------------------
# acceptance reporting

ACCEPTANCE_LINES: list[str] = []


@contextmanager
def criterion(number: int, title: str):
    """Record one PASS/FAIL line for an acceptance criterion; ``notes`` collects measurements."""
    notes: dict[str, object] = {}
    start = time.perf_counter()
    try:
        yield notes
    except BaseException:
        _record("FAIL", number, title, notes, start)
        raise
    _record("PASS", number, title, notes, start)


def _record(status: str, number: int, title: str, notes: dict, start: float) -> None:
    extra = ", ".join(f"{k}={v}" for k, v in notes.items())
    line = f"criterion {number:2d} {status}: {title} ({extra}; {time.perf_counter() - start:.1f}s)"
    ACCEPTANCE_LINES.append(line)
    print(line)
