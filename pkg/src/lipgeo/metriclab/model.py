"""Piecewise-parametric surface germ models.

A patch maps ``(t, s)`` to ``sum_k a_k(s) t^{q_k}`` coordinate-wise, where
each ``a_k`` is piecewise linear in ``s``.  Points are kept as coefficient
matrices over one shared exponent grid so that differences of nearby points
are formed coefficient-wise before multiplying by ``t^q``: this is what keeps
distances of size ``t^5`` meaningful next to coordinates of size ``t``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from ..exponents import Arc, LipgeoError, PuiseuxSeries, format_exponent, rational


@dataclass(frozen=True)
class Term:
    """``a(s) * t^exp`` with ``a`` given by breakpoints ``((s0, v0), (s1, v1), ...)``."""

    exp: Fraction
    pl: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        if self.exp < 1:
            raise LipgeoError("patch exponents must be >= 1")
        ss = [p[0] for p in self.pl]
        if not self.pl or ss[0] != 0 or ss[-1] != 1 or any(b <= a for a, b in zip(ss, ss[1:])):
            raise LipgeoError("breakpoints must increase from s=0 to s=1")

    def __call__(self, s):
        xs, ys = zip(*self.pl)
        return np.interp(s, xs, ys)

    @classmethod
    def const(cls, exp, value: float = 1.0) -> "Term":
        return cls(rational(exp), ((0.0, float(value)), (1.0, float(value))))

    @classmethod
    def linear(cls, exp, v0: float, v1: float) -> "Term":
        return cls(rational(exp), ((0.0, float(v0)), (1.0, float(v1))))


@dataclass(frozen=True)
class Patch:
    """``coords[i]`` is the list of terms of coordinate ``i``."""

    coords: tuple[tuple[Term, ...], ...]

    @property
    def breakpoints(self) -> np.ndarray:
        pts = {p[0] for c in self.coords for term in c for p in term.pl}
        return np.array(sorted(pts))


Gluing = tuple[tuple[int, int], tuple[int, int]]


@dataclass(frozen=True)
class GermModel:
    """Union of patches glued along boundary arcs (``s=0`` is end 0, ``s=1`` end 1).

    ``param_coord`` is a coordinate equal to ``t`` on every patch, so that
    sampled arcs are coordinate-parameterized.
    """

    dim: int
    patches: tuple[Patch, ...]
    gluings: tuple[Gluing, ...] = ()
    param_coord: int = 0
    t_max: float = 1.0
    name: str = ""
    exps: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not self.patches:
            raise LipgeoError("model without patches")
        for p in self.patches:
            if len(p.coords) != self.dim:
                raise LipgeoError("patch dimension differs from model dimension")
            pc = p.coords[self.param_coord]
            if len(pc) != 1 or pc[0].exp != 1 or any(v != 1.0 for _, v in pc[0].pl):
                raise LipgeoError(f"coordinate {self.param_coord} must equal t on every patch")
        for (a, ea), (b, eb) in self.gluings:
            if not (0 <= a < len(self.patches) and 0 <= b < len(self.patches)):
                raise LipgeoError("gluing refers to a missing patch")
            if ea not in (0, 1) or eb not in (0, 1):
                raise LipgeoError("gluing ends must be 0 or 1")
        exps = sorted({t.exp for p in self.patches for c in p.coords for t in c})
        object.__setattr__(self, "exps", np.array([float(e) for e in exps]))
        object.__setattr__(self, "_exp_index", {e: i for i, e in enumerate(exps)})
        object.__setattr__(self, "_exact_exps", tuple(exps))

    # coefficient matrices ----------------------------------------------
    def coef(self, patch: int, s) -> np.ndarray:
        """Coefficients, shape ``(len(s), dim, n_exps)`` (or ``(dim, n_exps)`` for scalar s)."""
        s_arr = np.atleast_1d(np.asarray(s, dtype=float))
        out = np.zeros((s_arr.size, self.dim, len(self.exps)))
        for i, terms in enumerate(self.patches[patch].coords):
            for term in terms:
                out[:, i, self._exp_index[term.exp]] += term(s_arr)
        return out[0] if np.ndim(s) == 0 else out

    def powers(self, t: float, shift: float = 0.0) -> np.ndarray:
        return np.power(float(t), self.exps - shift)

    def point(self, patch: int, t: float, s) -> np.ndarray:
        return self.coef(patch, s) @ self.powers(t)

    def check_t(self, t: float) -> None:
        if not 0 < t <= self.t_max:
            raise LipgeoError(f"t={t} outside (0, {self.t_max}]")

    # topology -------------------------------------------------------------
    def end_classes(self) -> dict[tuple[int, int], int]:
        """Union-find of patch ends under the gluings."""
        parent = {(p, e): (p, e) for p in range(len(self.patches)) for e in (0, 1)}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in self.gluings:
            ra, rb = find(tuple(a)), find(tuple(b))
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
        roots = sorted({find(x) for x in parent})
        label = {r: i for i, r in enumerate(roots)}
        return {x: label[find(x)] for x in parent}

    def link_graph(self) -> tuple[int, list[tuple[int, int]]]:
        """Link as a graph: nodes are glued end classes, edges are patches."""
        cls = self.end_classes()
        edges = [(cls[(p, 0)], cls[(p, 1)]) for p in range(len(self.patches))]
        return len(set(cls.values())), edges

    def is_closed_chain(self) -> bool:
        n, edges = self.link_graph()
        if n != len(edges):
            return False
        deg = [0] * n
        for a, b in edges:
            deg[a] += 1
            deg[b] += 1
        if any(d != 2 for d in deg):
            return False
        return _connected(n, edges)

    def is_connected(self) -> bool:
        n, edges = self.link_graph()
        return _connected(n, edges)

    def submodel(self, patches: Sequence[int]) -> "GermModel":
        idx = {p: i for i, p in enumerate(patches)}
        glue = tuple(
            ((idx[a], ea), (idx[b], eb))
            for (a, ea), (b, eb) in self.gluings
            if a in idx and b in idx
        )
        return GermModel(self.dim, tuple(self.patches[p] for p in patches), glue,
                         self.param_coord, self.t_max, self.name)

    # arcs -------------------------------------------------------------------
    def arc(self, patch: int, s: float) -> Arc:
        """The ``s = const`` arc of a patch as an exact (float-valued rational) arc."""
        c = self.coef(patch, float(s))
        coords = []
        for i in range(self.dim):
            coords.append(PuiseuxSeries.from_terms(
                [(e, Fraction(float(c[i, k]))) for k, e in enumerate(self._exact_exps) if c[i, k] != 0]
            ))
        return Arc(tuple(coords), "coordinate")

    def arc_matrix(self, arc: Arc) -> np.ndarray:
        """Coefficients of a symbolic arc on this model's exponent grid."""
        if arc.dim != self.dim:
            raise LipgeoError("arc dimension differs from model dimension")
        out = np.zeros((self.dim, len(self.exps)))
        for i, s in enumerate(arc.coords):
            for e, c in s.terms:
                if e not in self._exp_index:
                    raise LipgeoError(f"arc exponent {format_exponent(e)} not on the model grid")
                out[i, self._exp_index[e]] = float(c)
        return out


def _connected(n: int, edges: Sequence[tuple[int, int]]) -> bool:
    if n == 0:
        return False
    adj: dict[int, set[int]] = {i: set() for i in range(n)}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    seen, stack = {0}, [0]
    while stack:
        v = stack.pop()
        for u in adj[v] - seen:
            seen.add(u)
            stack.append(u)
    return len(seen) == n


@dataclass(frozen=True)
class ModelArc:
    """Handle for the ``s = const`` arc of patch ``patch``."""

    patch: int
    s: float


# ---------------------------------------------------------------------------
# JSON


def model_to_json(m: GermModel) -> dict:
    return {
        "dim": m.dim,
        "name": m.name,
        "param_coord": m.param_coord,
        "t_max": m.t_max,
        "patches": [
            {"coords": [[{"exp": format_exponent(t.exp), "pl": [list(p) for p in t.pl]} for t in c]
                        for c in p.coords]}
            for p in m.patches
        ],
        "gluings": [[list(a), list(b)] for a, b in m.gluings],
    }


def model_from_json(data: Mapping) -> GermModel:
    try:
        patches = tuple(
            Patch(tuple(
                tuple(Term(rational(t["exp"]), tuple((float(a), float(b)) for a, b in t["pl"]))
                      for t in c)
                for c in p["coords"]))
            for p in data["patches"]
        )
        gluings = tuple((tuple(a), tuple(b)) for a, b in data.get("gluings", []))
        return GermModel(int(data["dim"]), patches, gluings, int(data.get("param_coord", 0)),
                         float(data.get("t_max", 1.0)), data.get("name", ""))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, LipgeoError):
            raise
        raise LipgeoError(f"malformed germ model: {exc}") from exc
