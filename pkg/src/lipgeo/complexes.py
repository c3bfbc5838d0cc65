"""Hölder complexes: labeled multigraphs, simplification, canonical forms, equivalence.

A complex is a loopless multigraph whose edges carry rational exponents
``beta >= 1``.  Simplification removes non-critical vertices (exactly two
incident edges to two different neighbours) by merging their edges with
``beta = min``; a vertex whose two edges go to the same neighbour is a loop
vertex and gets both labels set to their minimum.
"""

from __future__ import annotations

import json
import math
import random
from collections import Counter, defaultdict
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .exponents import LipgeoError, format_exponent, rational
from .metriclab.model import GermModel, Patch, Term


@dataclass(frozen=True, order=True)
class Edge:
    id: str
    ends: tuple[str, str]
    beta: Fraction

    def other(self, v: str) -> str:
        a, b = self.ends
        return b if v == a else a


class VertexClass(str, Enum):
    NON_CRITICAL = "non-critical"
    LOOP = "loop"
    CRITICAL = "critical"


@dataclass(frozen=True)
class HolderComplex:
    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]

    def __post_init__(self) -> None:
        if len(set(self.vertices)) != len(self.vertices):
            raise LipgeoError("duplicate vertex ids")
        if len({e.id for e in self.edges}) != len(self.edges):
            raise LipgeoError("duplicate edge ids")
        vs = set(self.vertices)
        used = set()
        for e in self.edges:
            a, b = e.ends
            if a not in vs or b not in vs:
                raise LipgeoError(f"edge {e.id} refers to an unknown vertex")
            if a == b:
                raise LipgeoError(f"edge {e.id} is a self-loop")
            if not isinstance(e.beta, Fraction) or e.beta < 1:
                raise LipgeoError(f"edge {e.id} needs a finite rational beta >= 1")
            used.update(e.ends)
        if used != vs:
            raise LipgeoError(f"isolated vertices: {sorted(vs - used)}")

    @classmethod
    def build(cls, edges: Iterable[tuple[str, str, object]],
              ids: Sequence[str] | None = None) -> "HolderComplex":
        """Complex from ``(a, b, beta)`` triples; edge ids default to ``g0, g1, ...``."""
        edges = list(edges)
        ids = list(ids) if ids is not None else [f"g{i}" for i in range(len(edges))]
        es = tuple(Edge(i, (str(a), str(b)), rational(beta)) for i, (a, b, beta) in zip(ids, edges))
        verts = sorted({v for e in es for v in e.ends})
        return cls(tuple(verts), es)

    @classmethod
    def cycle(cls, betas: Sequence[object]) -> "HolderComplex":
        n = len(betas)
        if n < 2:
            raise LipgeoError("a cycle needs at least two edges")
        return cls.build((f"v{i}", f"v{(i + 1) % n}", b) for i, b in enumerate(betas))

    def incident(self, v: str) -> list[Edge]:
        return [e for e in self.edges if v in e.ends]

    def adjacency(self) -> dict[str, list[Edge]]:
        adj: dict[str, list[Edge]] = {v: [] for v in self.vertices}
        for e in self.edges:
            for v in e.ends:
                adj[v].append(e)
        return adj

    def edge(self, eid: str) -> Edge:
        for e in self.edges:
            if e.id == eid:
                return e
        raise LipgeoError(f"unknown edge {eid!r}")

    def relabel(self, vmap: Mapping[str, str], emap: Mapping[str, str] | None = None) -> "HolderComplex":
        emap = emap or {}
        return HolderComplex(
            tuple(vmap[v] for v in self.vertices),
            tuple(Edge(emap.get(e.id, e.id), (vmap[e.ends[0]], vmap[e.ends[1]]), e.beta)
                  for e in self.edges),
        )


# ---------------------------------------------------------------------------
# JSON / DOT / SVG


def complex_to_json(c: HolderComplex) -> dict:
    return {
        "vertices": list(c.vertices),
        "edges": [{"id": e.id, "ends": list(e.ends), "beta": format_exponent(e.beta)} for e in c.edges],
    }


def complex_from_json(data: Mapping) -> HolderComplex:
    try:
        edges = tuple(
            Edge(str(e["id"]), (str(e["ends"][0]), str(e["ends"][1])), rational(e["beta"]))
            for e in data["edges"]
        )
        if any(len(e["ends"]) != 2 for e in data["edges"]):
            raise LipgeoError("an edge needs exactly two ends")
        return HolderComplex(tuple(str(v) for v in data["vertices"]), edges)
    except (KeyError, TypeError, IndexError, ZeroDivisionError) as exc:
        raise LipgeoError(f"malformed complex: {exc}") from exc


def to_dot(c: HolderComplex, name: str = "complex") -> str:
    lines = [f"graph {json.dumps(name)} {{"]
    for v in c.vertices:
        lines.append(f"  {json.dumps(v)};")
    for e in c.edges:
        lines.append(f"  {json.dumps(e.ends[0])} -- {json.dumps(e.ends[1])} "
                     f"[label={json.dumps(format_exponent(e.beta))}, id={json.dumps(e.id)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_svg(c: HolderComplex, size: int = 400) -> str:
    """Vertices on a circle; parallel edges drawn as arcs bent by their index."""
    r = size / 2 - 40
    pos = {v: (size / 2 + r * math.cos(2 * math.pi * k / len(c.vertices)),
               size / 2 + r * math.sin(2 * math.pi * k / len(c.vertices)))
           for k, v in enumerate(c.vertices)}
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
           f'viewBox="0 0 {size} {size}">']
    seen: Counter = Counter()
    for e in c.edges:
        key = tuple(sorted(e.ends))
        k = seen[key]
        seen[key] += 1
        (x0, y0), (x1, y1) = pos[key[0]], pos[key[1]]
        mx, my = (x0 + x1) / 2, (y0 + y1) / 2
        nx, ny = y0 - y1, x1 - x0
        norm = math.hypot(nx, ny) or 1.0
        bend = 30 * ((k + 1) // 2) * (1 if k % 2 else -1) if k else 0
        cx, cy = mx + bend * nx / norm, my + bend * ny / norm
        out.append(f'<path d="M {x0:.1f} {y0:.1f} Q {cx:.1f} {cy:.1f} {x1:.1f} {y1:.1f}" '
                   f'fill="none" stroke="black"/>')
        out.append(f'<text x="{(mx + cx) / 2:.1f}" y="{(my + cy) / 2:.1f}" font-size="11">'
                   f'{format_exponent(e.beta)}</text>')
    for v, (x, y) in pos.items():
        out.append(f'<circle cx="{x:.1f}" cy="{y:.1f}" r="4"/>')
        out.append(f'<text x="{x + 6:.1f}" y="{y - 6:.1f}" font-size="12">{v}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# topology


def components(c: HolderComplex) -> list[set[str]]:
    adj = c.adjacency()
    seen: set[str] = set()
    comps = []
    for v in c.vertices:
        if v in seen:
            continue
        comp, stack = {v}, [v]
        while stack:
            x = stack.pop()
            for e in adj[x]:
                y = e.other(x)
                if y not in comp:
                    comp.add(y)
                    stack.append(y)
        seen |= comp
        comps.append(comp)
    return comps


def betti_number(c: HolderComplex) -> int:
    """Cycle rank ``|E| - |V| + #components``."""
    return len(c.edges) - len(c.vertices) + len(components(c))


# ---------------------------------------------------------------------------
# simplification


def classify_vertex(c: HolderComplex, v: str) -> VertexClass:
    if v not in c.vertices:
        raise LipgeoError(f"unknown vertex {v!r}")
    inc = c.incident(v)
    if len(inc) != 2:
        return VertexClass.CRITICAL
    a, b = (e.other(v) for e in inc)
    return VertexClass.LOOP if a == b else VertexClass.NON_CRITICAL


def _eliminate(edges: dict[str, Edge], adj: dict[str, set[str]], v: str) -> None:
    g1, g2 = sorted(adj.pop(v), key=lambda i: edges[i].id)
    e1, e2 = edges.pop(g1), edges.pop(g2)
    a, b = e1.other(v), e2.other(v)
    merged = Edge(e1.id, (a, b), min(e1.beta, e2.beta))
    edges[merged.id] = merged
    adj[a].discard(g1)
    adj[b].discard(g2)
    adj[a].add(merged.id)
    adj[b].add(merged.id)


def _is_non_critical(edges: dict[str, Edge], adj: dict[str, set[str]], v: str) -> bool:
    inc = adj[v]
    if len(inc) != 2:
        return False
    a, b = (edges[i].other(v) for i in inc)
    return a != b


def canonicalize(c: HolderComplex, rng: random.Random | None = None) -> HolderComplex:
    """Eliminate non-critical vertices, then equalize loop pairs.

    With ``rng`` the pivot vertex is drawn at random among the non-critical
    ones (used to test that the result does not depend on the order);
    otherwise the smallest vertex id is taken.
    """
    edges = {e.id: e for e in c.edges}
    adj: dict[str, set[str]] = {v: set() for v in c.vertices}
    for e in c.edges:
        for v in e.ends:
            adj[v].add(e.id)
    candidates = {v for v in c.vertices if _is_non_critical(edges, adj, v)}
    while candidates:
        v = rng.choice(sorted(candidates)) if rng is not None else min(candidates)
        candidates.discard(v)
        if not _is_non_critical(edges, adj, v):
            continue
        a, b = (edges[i].other(v) for i in adj[v])
        _eliminate(edges, adj, v)
        for x in (a, b):
            if _is_non_critical(edges, adj, x):
                candidates.add(x)
            else:
                candidates.discard(x)
    # loop relabeling; loop vertices are unaffected by label changes
    for v in sorted(adj):
        inc = adj[v]
        if len(inc) == 2:
            g1, g2 = sorted(inc)
            if edges[g1].other(v) == edges[g2].other(v):
                m = min(edges[g1].beta, edges[g2].beta)
                edges[g1] = Edge(g1, edges[g1].ends, m)
                edges[g2] = Edge(g2, edges[g2].ends, m)
    kept = [e for e in c.edges if e.id in edges]
    order = {e.id: k for k, e in enumerate(kept)}
    out_edges = tuple(sorted(edges.values(), key=lambda e: order[e.id]))
    return HolderComplex(tuple(v for v in c.vertices if v in adj), out_edges)


@dataclass(frozen=True)
class Violation:
    kind: str
    vertex: str
    edges: tuple[str, ...]


def is_canonical(c: HolderComplex) -> tuple[bool, list[Violation]]:
    bad = []
    for v in c.vertices:
        cls = classify_vertex(c, v)
        inc = c.incident(v)
        if cls is VertexClass.NON_CRITICAL:
            bad.append(Violation("non-critical vertex", v, tuple(e.id for e in inc)))
        elif cls is VertexClass.LOOP and inc[0].beta != inc[1].beta:
            bad.append(Violation("unequal loop pair", v, tuple(e.id for e in inc)))
    return not bad, bad


def horn_exponent(c: HolderComplex) -> Fraction:
    """Exponent of the horn a single-cycle complex is inner-equivalent to."""
    if len(components(c)) != 1 or any(len(c.incident(v)) != 2 for v in c.vertices):
        raise LipgeoError("complex is not a single cycle")
    return min(e.beta for e in c.edges)


# ---------------------------------------------------------------------------
# isomorphism


def _pair_labels(c: HolderComplex) -> dict[frozenset, tuple[Fraction, ...]]:
    out: dict[frozenset, list[Fraction]] = defaultdict(list)
    for e in c.edges:
        out[frozenset(e.ends)].append(e.beta)
    return {k: tuple(sorted(v)) for k, v in out.items()}


def _refine(c1: HolderComplex, c2: HolderComplex) -> tuple[dict[str, int], dict[str, int]]:
    """Joint colour refinement; equal colours are necessary for a vertex match."""
    adjs = [c1.adjacency(), c2.adjacency()]
    sigs = [{v: (len(adj[v]), tuple(sorted(e.beta for e in adj[v]))) for v in adj} for adj in adjs]
    n_old = 0
    while True:
        palette = {s: i for i, s in enumerate(sorted(set(sigs[0].values()) | set(sigs[1].values())))}
        cols = [{v: palette[s] for v, s in sig.items()} for sig in sigs]
        if len(palette) == n_old:
            return cols[0], cols[1]
        n_old = len(palette)
        sigs = [{v: (col[v], tuple(sorted((e.beta, col[e.other(v)]) for e in adj[v]))) for v in adj}
                for col, adj in zip(cols, adjs)]


def find_isomorphism(c1: HolderComplex, c2: HolderComplex) -> dict | None:
    """Label-preserving isomorphism ``{"vertices": {...}, "edges": {...}}`` or ``None``.

    Vertices of ``c1`` are matched in sorted order and candidates tried in
    sorted order, so the witness returned is deterministic.
    """
    if len(c1.vertices) != len(c2.vertices) or len(c1.edges) != len(c2.edges):
        return None
    if sorted(e.beta for e in c1.edges) != sorted(e.beta for e in c2.edges):
        return None
    col1, col2 = _refine(c1, c2)
    if Counter(col1.values()) != Counter(col2.values()):
        return None
    lab1, lab2 = _pair_labels(c1), _pair_labels(c2)
    nb1 = {v: set() for v in c1.vertices}
    for k in lab1:
        a, b = tuple(k)
        nb1[a].add(b)
        nb1[b].add(a)
    # match high-constraint vertices first: BFS order from rarest colours
    freq = Counter(col1.values())
    order: list[str] = []
    rest = set(c1.vertices)
    while rest:
        root = min(rest, key=lambda v: (freq[col1[v]], v))
        queue = [root]
        rest.discard(root)
        while queue:
            v = queue.pop(0)
            order.append(v)
            for u in sorted(nb1[v]):
                if u in rest:
                    rest.discard(u)
                    queue.append(u)
    by_col2: dict[int, list[str]] = defaultdict(list)
    for v in sorted(c2.vertices):
        by_col2[col2[v]].append(v)

    mapping: dict[str, str] = {}
    used: set[str] = set()

    def consistent(v: str, w: str) -> bool:
        for u, x in mapping.items():
            if lab1.get(frozenset((u, v)), ()) != lab2.get(frozenset((x, w)), ()):
                return False
        return True

    def search(k: int) -> bool:
        if k == len(order):
            return True
        v = order[k]
        for w in by_col2[col1[v]]:
            if w in used or not consistent(v, w):
                continue
            mapping[v] = w
            used.add(w)
            if search(k + 1):
                return True
            del mapping[v]
            used.discard(w)
        return False

    if not search(0):
        return None
    emap = {}
    groups2: dict[frozenset, list[Edge]] = defaultdict(list)
    for e in c2.edges:
        groups2[frozenset(e.ends)].append(e)
    groups1: dict[frozenset, list[Edge]] = defaultdict(list)
    for e in c1.edges:
        groups1[frozenset(e.ends)].append(e)
    for k, es in groups1.items():
        image = frozenset(mapping[v] for v in k)
        for e, f in zip(sorted(es, key=lambda e: (e.beta, e.id)),
                        sorted(groups2[image], key=lambda e: (e.beta, e.id))):
            emap[e.id] = f.id
    return {"vertices": dict(sorted(mapping.items())), "edges": dict(sorted(emap.items()))}


def isomorphic(c1: HolderComplex, c2: HolderComplex) -> bool:
    return find_isomorphism(c1, c2) is not None


def equivalent(c1: HolderComplex, c2: HolderComplex) -> tuple[bool, dict | None]:
    """Inner equivalence: isomorphism of canonical forms with equal labels."""
    w = find_isomorphism(canonicalize(c1), canonicalize(c2))
    return w is not None, w


# ---------------------------------------------------------------------------
# realization


@dataclass(frozen=True)
class Realization:
    """A germ model for a complex together with its combinatorial bookkeeping."""

    model: GermModel
    vertex_axis: dict
    edge_patch: dict
    vertex_exponent: Fraction

    def to_dict(self) -> dict:
        return {
            "vertex_axis": self.vertex_axis,
            "edge_patch": self.edge_patch,
            "vertex_exponent": format_exponent(self.vertex_exponent),
            "param_coord": self.model.param_coord,
            "dim": self.model.dim,
        }


def realize_model(c: HolderComplex) -> Realization:
    """Patch-wise realization: one Hölder-triangle patch per edge.

    Coordinate 0 is ``t``.  Vertex ``v`` gets the arc ``t e_0 + t^B e_v`` with
    ``B = max beta + 1``, and edge ``g = (a, b)`` is the patch interpolating
    linearly from vertex ``a`` (``s = 0``) to vertex ``b`` (``s = 1``) with an
    extra tent ``t^beta(g) * tent(s)`` along its own axis ``e_g``.  The inner
    distance across a patch is of order ``t^beta(g)``.  All vertex arcs share
    the tangent direction ``e_0``: two arcs with different tangent directions
    have tangency order 1, which would force ``beta = 1``.
    """
    vs = list(c.vertices)
    big = max(e.beta for e in c.edges) + 1
    dim = 1 + len(vs) + len(c.edges)
    vaxis = {v: 1 + k for k, v in enumerate(vs)}
    patches = []
    epatch = {}
    for k, e in enumerate(c.edges):
        coords: list[tuple[Term, ...]] = [() for _ in range(dim)]
        coords[0] = (Term.const(1),)
        a, b = e.ends
        coords[vaxis[a]] = (Term.linear(big, 1.0, 0.0),)
        coords[vaxis[b]] = (Term.linear(big, 0.0, 1.0),)
        coords[1 + len(vs) + k] = (Term(e.beta, ((0.0, 0.0), (0.5, 1.0), (1.0, 0.0))),)
        patches.append(Patch(tuple(coords)))
        epatch[e.id] = {"patch": k, "axis": 1 + len(vs) + k, "ends": list(e.ends),
                        "beta": format_exponent(e.beta)}
    index = {e.id: k for k, e in enumerate(c.edges)}
    # glue every patch end at a vertex to the first patch end seen there
    first: dict[str, tuple[int, int]] = {}
    glue = []
    for e in c.edges:
        for end, v in enumerate(e.ends):
            here = (index[e.id], end)
            if v in first:
                glue.append((first[v], here))
            else:
                first[v] = here
    model = GermModel(dim, tuple(patches), tuple(glue), param_coord=0,
                      name=f"realization({len(vs)}v,{len(c.edges)}e)")
    return Realization(model, vaxis, epatch, big)
