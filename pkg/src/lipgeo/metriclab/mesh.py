"""Scale plans, log-log order estimates, link sampling and mesh distances."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

from ..exponents import Arc, LipgeoError
from .model import GermModel, ModelArc

#: half-octave levels covering the annulus [t/4, 4t]
ANNULUS_STEPS = tuple(range(-4, 5))
#: cross-level edges join grid points whose link parameters differ by at most this
LEVEL_EDGE_SPAN = 0.125


@dataclass(frozen=True)
class ScaleSamplePlan:
    """Geometric scale levels ``2^tmax_exp .. 2^tmin_exp`` and link resolution."""

    tmin_exp: int = -18
    tmax_exp: int = -6
    levels: int = 13
    resolution: int = 64
    seed: int = 0
    tol: float = 0.05

    def __post_init__(self) -> None:
        if self.levels < 4:
            raise LipgeoError("an exponent fit needs at least 4 levels")
        if self.tmin_exp >= self.tmax_exp:
            raise LipgeoError("tmin_exp must be below tmax_exp")
        if self.resolution < 2:
            raise LipgeoError("link resolution must be >= 2")

    def t_levels(self) -> np.ndarray:
        return np.geomspace(2.0**self.tmax_exp, 2.0**self.tmin_exp, self.levels)

    def to_dict(self) -> dict:
        return asdict(self)


def estimate_order(samples: Sequence[tuple[float, float]]) -> tuple[float, float]:
    """Least-squares slope of ``log value`` against ``log t`` and the RMS residual."""
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 4:
        raise LipgeoError("need at least 4 (t, value) samples")
    t, v = arr[:, 0], arr[:, 1]
    if np.any(t <= 0) or np.any(v <= 0):
        raise LipgeoError("order estimation needs positive samples")
    if len(np.unique(t)) < len(t):
        raise LipgeoError("sample scales must be distinct")
    x, y = np.log(t), np.log(v)
    slope, intercept = np.polyfit(x, y, 1)
    resid = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return float(slope), resid


def s_grid(model: GermModel, patch: int, resolution: int,
           extra: Sequence[float] = ()) -> np.ndarray:
    grid = np.concatenate([np.linspace(0, 1, resolution), model.patches[patch].breakpoints,
                           np.asarray(extra, dtype=float)])
    return np.unique(np.clip(grid, 0.0, 1.0))


def sample_link(model: GermModel, t: float, plan: ScaleSamplePlan | None = None) -> list[np.ndarray]:
    """Point chains of the link at scale ``t``, one ``(k, dim)`` array per patch."""
    plan = plan or ScaleSamplePlan()
    model.check_t(t)
    return [model.coef(p, s_grid(model, p, plan.resolution)) @ model.powers(t)
            for p in range(len(model.patches))]


# ---------------------------------------------------------------------------
# locating arcs


def locate(model: GermModel, arc: Arc | ModelArc, plan: ScaleSamplePlan | None = None) -> ModelArc:
    """Find the patch arc carrying a symbolic arc; raise if the arc is off-model."""
    if isinstance(arc, ModelArc):
        return arc
    plan = plan or ScaleSamplePlan()
    levels = plan.t_levels()
    target = model.arc_matrix(arc)
    t0 = float(np.sqrt(levels[0] * levels[-1]))
    pw = model.powers(t0)
    best = None
    for p in range(len(model.patches)):
        grid = s_grid(model, p, 4 * plan.resolution)
        res = np.linalg.norm((model.coef(p, grid) - target) @ pw, axis=1)
        k = int(np.argmin(res))
        lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
        if hi > lo:
            opt = minimize_scalar(
                lambda s: float(np.linalg.norm((model.coef(p, s) - target) @ pw)),
                bounds=(lo, hi), method="bounded", options={"xatol": 1e-14},
            )
            s_best, r_best = (float(opt.x), float(opt.fun)) if opt.fun < res[k] else (grid[k], res[k])
        else:
            s_best, r_best = float(grid[k]), float(res[k])
        if best is None or r_best < best[2]:
            best = (p, s_best, r_best)
    assert best is not None
    p, s, _ = best
    for t in levels:
        link = sample_link(model, t, plan)
        scale = max(np.ptp(np.vstack(link) - np.vstack(link)[0], axis=0).max(), 1e-300)
        r = np.linalg.norm((model.coef(p, s) - target) @ model.powers(t))
        if r > 1e-6 * scale:
            raise LipgeoError(f"arc is off-model (residual {r:.3g} at t={t:.3g})")
    return ModelArc(p, s)


# ---------------------------------------------------------------------------
# meshes


def edge_graph(rows: Sequence[int], cols: Sequence[int], wts: Sequence[float], n: int):
    """Sparse undirected graph keeping the shortest of any repeated edge.

    Glued patch ends share nodes, so the same edge can be listed twice and a
    plain sparse constructor would add the weights.
    """
    r, c = np.asarray(rows), np.asarray(cols)
    a, b = np.minimum(r, c), np.maximum(r, c)
    # zero-length edges would vanish from the sparse graph
    w = np.where(np.asarray(wts, dtype=float) > 0, wts, 1e-300)
    keep = a != b
    a, b, w = a[keep], b[keep], w[keep]
    order = np.lexsort((w, b, a))
    a, b, w = a[order], b[order], w[order]
    first = np.ones(len(a), dtype=bool)
    first[1:] = (a[1:] != a[:-1]) | (b[1:] != b[:-1])
    return coo_matrix((w[first], (a[first], b[first])), shape=(n, n)).tocsr()


@dataclass
class Mesh:
    """Sampled annulus of a model around scale ``t``; nodes carry coefficient rows."""

    model: GermModel
    t: float
    levels: np.ndarray
    grids: list[np.ndarray]
    node: dict[tuple[int, int, int], int] = field(default_factory=dict)
    graph: object = None

    def node_of(self, patch: int, s: float, level: int | None = None) -> int:
        level = self.center if level is None else level
        k = int(np.argmin(np.abs(self.grids[patch] - s)))
        if abs(self.grids[patch][k] - s) > 1e-12:
            raise LipgeoError("point not on the mesh grid")
        return self.node[(patch, level, k)]

    @property
    def center(self) -> int:
        return int(np.argmin(np.abs(np.log(self.levels / self.t))))

    def link_nodes(self, level: int | None = None) -> np.ndarray:
        level = self.center if level is None else level
        return np.unique([v for (p, l, k), v in self.node.items() if l == level])


def build_mesh(model: GermModel, t: float, plan: ScaleSamplePlan,
               extra: Mapping[int, Sequence[float]] | None = None,
               annulus: bool = True) -> Mesh:
    """Mesh graph on scales ``[t/4, 4t]`` (or only ``t``) with Euclidean edge weights."""
    model.check_t(t)
    extra = extra or {}
    steps = ANNULUS_STEPS if annulus else (0,)
    levels = np.array([t * 2.0 ** (k / 2) for k in steps])
    levels = levels[levels <= model.t_max]
    grids = [s_grid(model, p, plan.resolution, extra.get(p, ())) for p in range(len(model.patches))]
    mesh = Mesh(model, t, levels, grids)

    cls = model.end_classes()
    glued: dict[tuple[int, int], int] = {}
    nid = 0
    for p, g in enumerate(grids):
        for li in range(len(levels)):
            for k in range(len(g)):
                end = 0 if k == 0 else 1 if k == len(g) - 1 else None
                key = None if end is None else (cls[(p, end)], li)
                if key is not None and key in glued:
                    mesh.node[(p, li, k)] = glued[key]
                    continue
                mesh.node[(p, li, k)] = nid
                if key is not None:
                    glued[key] = nid
                nid += 1

    rows, cols, wts = [], [], []
    pw = [model.powers(tl) for tl in levels]
    for p, g in enumerate(grids):
        C = model.coef(p, g)  # (k, dim, E)
        ids = np.array([[mesh.node[(p, li, k)] for k in range(len(g))] for li in range(len(levels))])
        K, J = np.nonzero(np.abs(g[:, None] - g[None, :]) <= LEVEL_EDGE_SPAN + 1e-12)
        for li in range(len(levels)):
            # along the link: coefficient differences first
            rows.append(ids[li, :-1])
            cols.append(ids[li, 1:])
            wts.append(np.linalg.norm((C[1:] - C[:-1]) @ pw[li], axis=1))
            if li + 1 < len(levels):
                # every pair within LEVEL_EDGE_SPAN, so a refined grid keeps all coarse edges
                dC = (C[J] - C[K]) @ pw[li + 1] + C[K] @ (pw[li + 1] - pw[li])
                rows.append(ids[li, K])
                cols.append(ids[li + 1, J])
                wts.append(np.linalg.norm(dC, axis=1))
    rows, cols, wts = np.concatenate(rows), np.concatenate(cols), np.concatenate(wts)
    mesh.graph = edge_graph(rows, cols, wts, nid)
    return mesh


def mesh_distances(mesh: Mesh, sources: Sequence[int]) -> np.ndarray:
    return dijkstra(mesh.graph, directed=False, indices=np.asarray(sources))


def outer_distance(model: GermModel, a: ModelArc, b: ModelArc, t: float) -> float:
    return float(np.linalg.norm((model.coef(a.patch, a.s) - model.coef(b.patch, b.s)) @ model.powers(t)))


@dataclass(frozen=True)
class PancakeDecomposition:
    """Groups of patch indices with claimed Hölder exponents."""

    groups: tuple[tuple[int, ...], ...]
    betas: tuple

    def __post_init__(self) -> None:
        if len(self.groups) != len(self.betas):
            raise LipgeoError("one claimed exponent per pancake")

    def group_of(self) -> dict[int, int]:
        return {p: i for i, g in enumerate(self.groups) for p in g}


def pancake_distance_matrix(model: GermModel, decomposition: PancakeDecomposition, t: float,
                            plan: ScaleSamplePlan,
                            extra: Mapping[int, Sequence[float]] | None = None) -> tuple[Mesh, np.ndarray]:
    """Chain metric at scale ``t``: Euclidean legs between points of a common pancake."""
    mesh = build_mesh(model, t, plan, extra, annulus=False)
    owner = decomposition.group_of()
    members: dict[int, dict[int, np.ndarray]] = {}
    for (p, _, k), v in mesh.node.items():
        members.setdefault(owner[p], {})[v] = model.coef(p, mesh.grids[p][k])
    rows, cols, wts = [], [], []
    pw = model.powers(t)
    for nodes in members.values():
        ids = list(nodes)
        C = np.stack([nodes[i] for i in ids])
        D = np.linalg.norm((C[:, None] - C[None, :]) @ pw, axis=-1)
        iu, ju = np.triu_indices(len(ids), 1)
        rows += [ids[i] for i in iu]
        cols += [ids[j] for j in ju]
        wts += list(np.where(D[iu, ju] > 0, D[iu, ju], 1e-300))
    n = len(set(mesh.node.values()))
    graph = edge_graph(rows, cols, wts, n)
    return mesh, graph


def distance(model: GermModel, p: tuple[int, float, float], q: tuple[int, float, float],
             mode: str = "outer", plan: ScaleSamplePlan | None = None,
             decomposition: PancakeDecomposition | None = None) -> float:
    """Distance between sampled points ``(patch, s, t)`` in the outer, inner or pancake metric."""
    plan = plan or ScaleSamplePlan()
    (pa, sa, ta), (pb, sb, tb) = p, q
    if mode == "outer":
        return float(np.linalg.norm(model.point(pa, ta, sa) - model.point(pb, tb, sb)))
    if ta != tb:
        raise LipgeoError("inner and pancake distances are sampled at one scale")
    extra = {pa: [sa], pb: [sb]} if pa != pb else {pa: [sa, sb]}
    if mode == "inner":
        mesh = build_mesh(model, ta, plan, extra)
        graph = mesh.graph
    elif mode == "pancake":
        if decomposition is None:
            raise LipgeoError("pancake distance needs a decomposition")
        mesh, graph = pancake_distance_matrix(model, decomposition, ta, plan, extra)
    else:
        raise LipgeoError(f"unknown distance mode {mode!r}")
    i, j = mesh.node_of(pa, sa), mesh.node_of(pb, sb)
    if i == j:
        return 0.0
    d = dijkstra(graph, directed=False, indices=[i])[0, j]
    if not np.isfinite(d):
        raise LipgeoError("points lie in different components of the mesh")
    return float(d)
