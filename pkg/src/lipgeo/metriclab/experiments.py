"""Numerical experiments on germ models: tangency, LNE, pancakes, projections, cones."""

from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import mpmath
import numpy as np
from scipy.optimize import brentq
from scipy.sparse.csgraph import dijkstra
from scipy.spatial.distance import directed_hausdorff

from ..exponents import INF, Arc, ArcFamily, LipgeoError, arc_tord, format_exponent, rational
from ..exponents.expr import FunctionExpr, evaluate_mp
from .mesh import (
    PancakeDecomposition,
    ScaleSamplePlan,
    build_mesh,
    estimate_order,
    locate,
    outer_distance,
    s_grid,
)
from .model import GermModel, ModelArc

#: distances below this multiple of the scale are treated as exact zeros
ZERO_FLOOR = 1e-280


def _fit_or_bound(ts: Sequence[float], vals: Sequence[float]) -> tuple[float, float]:
    """Exponent fit; identical arcs (zero distance at every level) give ``inf``."""
    vals = np.asarray(vals, dtype=float)
    if np.all(vals <= ZERO_FLOOR):
        return INF, 0.0
    if np.any(vals <= ZERO_FLOOR):
        raise LipgeoError("distance vanishes on some levels only; refine the plan")
    return estimate_order(list(zip(ts, vals)))


def _arc_list(model: GermModel, arcs, plan: ScaleSamplePlan) -> list[ModelArc]:
    if isinstance(arcs, ArcFamily):
        arcs = arcs.arcs
    return [locate(model, a, plan) for a in arcs]


def _extra(arcs: Sequence[ModelArc]) -> dict[int, list[float]]:
    out: dict[int, list[float]] = {}
    for a in arcs:
        out.setdefault(a.patch, []).append(a.s)
    return out


def pair_distances(model: GermModel, arcs: Sequence[ModelArc], plan: ScaleSamplePlan,
                   inner: bool = True) -> tuple[np.ndarray, np.ndarray | None]:
    """Outer and inner distance matrices, shape ``(levels, n, n)``."""
    ts = plan.t_levels()
    n = len(arcs)
    outer = np.zeros((len(ts), n, n))
    inn = np.zeros((len(ts), n, n)) if inner else None
    for li, t in enumerate(ts):
        for i, j in itertools.combinations(range(n), 2):
            outer[li, i, j] = outer[li, j, i] = outer_distance(model, arcs[i], arcs[j], t)
        if inner:
            mesh = build_mesh(model, float(t), plan, _extra(arcs))
            nodes = [mesh.node_of(a.patch, a.s) for a in arcs]
            d = dijkstra(mesh.graph, directed=False, indices=nodes)
            sub = d[:, nodes]
            if not np.all(np.isfinite(sub)):
                raise LipgeoError("arcs lie in different components of the mesh")
            np.fill_diagonal(sub, 0.0)
            # identical arcs share a node; the 1e-300 placeholder weights are not lengths
            inn[li] = np.where(sub < 1e-250, 0.0, sub)
    return outer, inn


def tangency_numeric(model: GermModel, g1: Arc | ModelArc, g2: Arc | ModelArc,
                     mode: str = "outer", plan: ScaleSamplePlan | None = None) -> float:
    """Log-log estimate of ``tord`` (outer) or ``itord`` (inner) of two model arcs."""
    plan = plan or ScaleSamplePlan()
    if mode not in ("outer", "inner"):
        raise LipgeoError(f"unknown tangency mode {mode!r}")
    arcs = [locate(model, g1, plan), locate(model, g2, plan)]
    outer, inner = pair_distances(model, arcs, plan, inner=(mode == "inner"))
    data = outer if mode == "outer" else inner
    return _fit_or_bound(plan.t_levels(), data[:, 0, 1])[0]


# ---------------------------------------------------------------------------
# LNE


@dataclass(frozen=True)
class PairEstimate:
    i: int
    j: int
    tord: float
    itord: float
    tord_residual: float
    itord_residual: float

    def to_dict(self) -> dict:
        return {k: _num(v) for k, v in asdict(self).items()}


@dataclass(frozen=True)
class LneReport:
    mode: str
    beta: object
    pairs: tuple[PairEstimate, ...]
    violations: tuple[PairEstimate, ...]
    plan: ScaleSamplePlan

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "beta": None if self.beta is None else format_exponent(self.beta),
            "ok": self.ok,
            "verdict": ("no violation found at resolution %d" % self.plan.resolution) if self.ok
            else "violation",
            "pairs": [p.to_dict() for p in self.pairs],
            "violations": [p.to_dict() for p in self.violations],
            "plan": self.plan.to_dict(),
        }


def _num(v):
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    return v


def lne_report(model: GermModel, arcs, mode: str = "full", beta=None,
               plan: ScaleSamplePlan | None = None) -> LneReport:
    """Compare outer and inner tangency estimates on all pairs of ``arcs``.

    Full mode flags pairs with ``tord - itord > tol``.  Weak mode only flags
    such a pair when the inner estimate is also away from ``beta``.
    """
    plan = plan or ScaleSamplePlan()
    if mode not in ("full", "weak"):
        raise LipgeoError(f"unknown LNE mode {mode!r}")
    if mode == "weak" and beta is None:
        raise LipgeoError("weak mode requires beta")
    located = _arc_list(model, arcs, plan)
    if len(located) < 2:
        raise LipgeoError("LNE check needs at least two arcs")
    ts = plan.t_levels()
    outer, inner = pair_distances(model, located, plan)
    pairs, bad = [], []
    for i, j in itertools.combinations(range(len(located)), 2):
        to, ro = _fit_or_bound(ts, outer[:, i, j])
        ti, ri = _fit_or_bound(ts, inner[:, i, j])
        est = PairEstimate(i, j, to, ti, ro, ri)
        pairs.append(est)
        gap = to - ti if not (math.isinf(to) and math.isinf(ti)) else 0.0
        if gap > plan.tol:
            if mode == "full" or abs(ti - float(beta)) > plan.tol:
                bad.append(est)
    return LneReport(mode, None if beta is None else rational(beta), tuple(pairs), tuple(bad), plan)


def meridian_arcs(model: GermModel, per_patch: int) -> list[ModelArc]:
    """``per_patch`` evenly spaced ``s``-arcs on each patch, shared glued ends counted once."""
    cls = model.end_classes()
    seen: set[int] = set()
    out = []
    for p in range(len(model.patches)):
        for s in np.linspace(0.0, 1.0, per_patch + 1):
            end = 0 if s == 0 else 1 if s == 1 else None
            if end is not None:
                if cls[(p, end)] in seen:
                    continue
                seen.add(cls[(p, end)])
            out.append(ModelArc(p, float(s)))
    return out


# ---------------------------------------------------------------------------
# link diameters, horns and pancakes


def inner_link_diameter(model: GermModel, t: float, plan: ScaleSamplePlan) -> float:
    mesh = build_mesh(model, t, plan)
    nodes = mesh.link_nodes()
    d = dijkstra(mesh.graph, directed=False, indices=nodes)[:, nodes]
    if not np.all(np.isfinite(d)):
        raise LipgeoError("link is disconnected")
    return float(d.max())


def horn_exponent_numeric(model: GermModel, plan: ScaleSamplePlan | None = None) -> float:
    """Exponent of the inner diameter of the link; the link must be one closed chain."""
    plan = plan or ScaleSamplePlan()
    if not model.is_closed_chain():
        raise LipgeoError("link is not a single closed chain")
    ts = plan.t_levels()
    return estimate_order([(t, inner_link_diameter(model, float(t), plan)) for t in ts])[0]


def link_diameter_exponent(model: GermModel, plan: ScaleSamplePlan) -> float:
    ts = plan.t_levels()
    return estimate_order([(t, inner_link_diameter(model, float(t), plan)) for t in ts])[0]


@dataclass(frozen=True)
class PancakeReport:
    pancakes: tuple[dict, ...]
    adjacent_unions: tuple[dict, ...]
    valid: bool
    minimal: bool
    plan: ScaleSamplePlan

    @property
    def label(self) -> str:
        if not self.valid:
            return "invalid"
        return "valid and minimal" if self.minimal else "valid but NOT minimal"

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "valid": self.valid,
            "minimal": self.minimal,
            "minimality_note": "no union without violation found at resolution %d" % self.plan.resolution
            if self.minimal else "some adjacent union passes the LNE check",
            "pancakes": list(self.pancakes),
            "adjacent_unions": list(self.adjacent_unions),
            "plan": self.plan.to_dict(),
        }


def _check_decomposition(model: GermModel, dec: PancakeDecomposition) -> list[tuple[int, int]]:
    flat = [p for g in dec.groups for p in g]
    if sorted(flat) != list(range(len(model.patches))):
        raise LipgeoError("decomposition is not a partition of the patches")
    cls = model.end_classes()
    ends = [{cls[(p, e)] for p in g for e in (0, 1)} for g in dec.groups]
    adjacent = []
    for a, b in itertools.combinations(range(len(dec.groups)), 2):
        shared = ends[a] & ends[b]
        if len(shared) > 1:
            raise LipgeoError(f"pancakes {a} and {b} share more than one boundary arc")
        if shared:
            adjacent.append((a, b))
    return adjacent


def pancake_check(model: GermModel, dec: PancakeDecomposition,
                  plan: ScaleSamplePlan | None = None, arcs_per_patch: int = 3) -> PancakeReport:
    """Validate a pancake decomposition: LNE pieces, claimed exponents, minimality."""
    plan = plan or ScaleSamplePlan()
    adjacent = _check_decomposition(model, dec)
    pancakes = []
    valid = True
    for g, beta in zip(dec.groups, dec.betas):
        sub = model.submodel(g)
        rep = lne_report(sub, meridian_arcs(sub, arcs_per_patch), "full", None, plan)
        est = link_diameter_exponent(sub, plan)
        beta_ok = abs(est - float(rational(beta))) <= plan.tol
        valid &= rep.ok and beta_ok
        pancakes.append({
            "patches": list(g),
            "claimed_beta": format_exponent(rational(beta)),
            "estimated_beta": est,
            "beta_ok": beta_ok,
            "lne_ok": rep.ok,
            "violations": [v.to_dict() for v in rep.violations],
        })
    unions = []
    minimal = True
    for a, b in adjacent:
        patches = sorted(dec.groups[a] + dec.groups[b])
        sub = model.submodel(patches)
        rep = lne_report(sub, meridian_arcs(sub, arcs_per_patch), "full", None, plan)
        minimal &= not rep.ok
        unions.append({"pancakes": [a, b], "union_lne": rep.ok,
                       "violations": [v.to_dict() for v in rep.violations]})
    return PancakeReport(tuple(pancakes), tuple(unions), bool(valid), bool(minimal), plan)


# ---------------------------------------------------------------------------
# projections


@dataclass(frozen=True)
class ProjectionReport:
    beta: float
    estimates: tuple[float, ...]
    fraction_within: float
    seed: int
    plan: ScaleSamplePlan

    def to_dict(self) -> dict:
        return {"beta": self.beta, "estimates": list(self.estimates),
                "fraction_within": self.fraction_within, "seed": self.seed, "plan": self.plan.to_dict()}


def random_planes(n: int, count: int, seed: int) -> list[np.ndarray]:
    """Orthonormal ``n x 2`` frames from seeded Gaussian pairs (uniform on the Grassmannian)."""
    if n < 3:
        raise LipgeoError("projection experiments need ambient dimension >= 3")
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        q, _ = np.linalg.qr(rng.standard_normal((n, 2)))
        out.append(q)
    return out


def projected_min_tord(model: GermModel, frame: np.ndarray, arcs: Sequence[ModelArc],
                       plan: ScaleSamplePlan) -> float:
    """Minimum over arc pairs of the tangency order of the projected plane arcs.

    Projected arcs are compared at equal distance ``r`` from the origin; each
    arc is reparameterized by solving ``|pi(gamma(t))| = r``.
    """
    coefs = [frame.T @ model.coef(a.patch, a.s) for a in arcs]  # (2, E)

    def radius(c, t):
        return float(np.linalg.norm(c @ model.powers(t)))

    rs = plan.t_levels()
    t_of = np.zeros((len(arcs), len(rs)))
    for k, c in enumerate(coefs):
        for li, r in enumerate(rs):
            hi = float(r)
            while radius(c, hi) < r:
                hi *= 2
                if hi > model.t_max:
                    raise LipgeoError("projected arc does not reach the requested radius")
            t_of[k, li] = brentq(lambda t: radius(c, t) - r, 1e-300, hi, xtol=1e-300, rtol=1e-15)
    best = INF
    for i, j in itertools.combinations(range(len(arcs)), 2):
        vals = [float(np.linalg.norm(coefs[i] @ model.powers(t_of[i, li])
                                     - coefs[j] @ model.powers(t_of[j, li])))
                for li in range(len(rs))]
        best = min(best, _fit_or_bound(rs, vals)[0])
    return best


#: deeper default plan for projections (see :func:`projection_experiment`)
PROJECTION_PLAN = ScaleSamplePlan(tmin_exp=-36, tmax_exp=-16)


def projection_experiment(model: GermModel, num_planes: int = 100, seed: int = 0,
                          plan: ScaleSamplePlan | None = None, beta=None,
                          arcs_per_patch: int = 4) -> ProjectionReport:
    """Min-tord estimates of a horn's arcs after projection to random 2-planes.

    The default plan samples deeper scales than usual: for some planes the
    leading coefficient of a projected distance nearly cancels, and the
    asymptotic exponent only shows once ``t`` is far below that coefficient.
    """
    plan = plan or PROJECTION_PLAN
    if model.dim < 3:
        raise LipgeoError("projection experiments need ambient dimension >= 3")
    arcs = meridian_arcs(model, arcs_per_patch)
    if beta is None:
        beta = tangency_numeric(model, arcs[0], arcs[len(arcs) // 2], "outer", plan)
    beta = float(rational(beta)) if not isinstance(beta, float) else beta
    ests = tuple(projected_min_tord(model, f, arcs, plan)
                 for f in random_planes(model.dim, num_planes, seed))
    frac = float(np.mean([abs(e - beta) <= plan.tol for e in ests])) if ests else 0.0
    return ProjectionReport(beta, ests, frac, seed, plan)


# ---------------------------------------------------------------------------
# tangent cones


@dataclass(frozen=True)
class TangentConeReport:
    candidate: np.ndarray
    levels: tuple[float, ...]
    hausdorff: tuple[float, ...]
    mesh_tolerance: float
    decay: float | None
    decay_residual: float | None
    plan: ScaleSamplePlan = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "candidate": self.candidate.tolist(),
            "levels": list(self.levels),
            "hausdorff": list(self.hausdorff),
            "mesh_tolerance": self.mesh_tolerance,
            "decay": self.decay,
            "decay_residual": self.decay_residual,
            "plan": self.plan.to_dict(),
        }


def tangent_cone_sample(model: GermModel, plan: ScaleSamplePlan | None = None,
                        candidate_resolution: int | None = None) -> TangentConeReport:
    """Hausdorff distances from rescaled links ``link(t)/t`` to the tangent-vector set.

    Arcs are coordinate-parameterized, so ``gamma(t)/t`` tends to the
    exponent-1 coefficient vector; the candidate limit is the set of those
    vectors over a finer grid of patch arcs.
    """
    plan = plan or ScaleSamplePlan()
    res = candidate_resolution or 4 * plan.resolution
    k1 = int(np.argmin(np.abs(model.exps - 1.0)))
    if model.exps[k1] != 1.0:
        raise LipgeoError("model has no exponent-1 terms")
    cand = np.unique(np.round(np.vstack(
        [model.coef(p, s_grid(model, p, res))[:, :, k1] for p in range(len(model.patches))]), 15), axis=0)
    ts = plan.t_levels()
    dists = []
    spacing = 0.0
    for t in ts:
        pts = []
        for p in range(len(model.patches)):
            g = s_grid(model, p, plan.resolution)
            pts.append(model.coef(p, g) @ model.powers(t, shift=1.0))
        P = np.vstack(pts)
        spacing = max(spacing, max(float(np.linalg.norm(np.diff(q, axis=0), axis=1).max())
                                   for q in pts))
        h = max(directed_hausdorff(P, cand)[0], directed_hausdorff(cand, P)[0])
        dists.append(float(h))
    decay = resid = None
    if all(d > plan.tol * 1e-9 for d in dists):
        decay, resid = estimate_order(list(zip(ts, dists)))
    return TangentConeReport(cand, tuple(float(t) for t in ts), tuple(dists), spacing,
                             decay, resid, plan)


# ---------------------------------------------------------------------------
# symbolic/numeric cross-checks


def tord_preserved(pairs: Sequence[tuple[Arc, Arc]]) -> list[dict]:
    """Spot-check ``tord(g_i, g_j) = tord(phi g_i, phi g_j)`` on paired arc samples."""
    out = []
    for (i, (a, fa)), (j, (b, fb)) in itertools.combinations(enumerate(pairs), 2):
        before, after = arc_tord(a, b), arc_tord(fa, fb)
        out.append({"i": i, "j": j, "tord": format_exponent(before),
                    "tord_image": format_exponent(after), "ok": before == after})
    return out


def function_order_numeric(f: FunctionExpr, arc: Arc, *, exps: Sequence[int] = tuple(range(-40, -121, -10)),
                           dps: int = 80, max_dps: int = 4000) -> float:
    """Log-log estimate of ``ord_arc f`` from high-precision evaluations.

    Evaluated in ``mpmath`` at ``t = 2^e`` so that cancellations between
    terms of very different size stay visible.  The working precision is
    doubled until two successive evaluations agree.
    """

    def values(prec: int) -> list:
        with mpmath.workdps(prec):
            out = []
            for e in exps:
                t = mpmath.mpf(2) ** e
                out.append(abs(evaluate_mp(f, arc.coords[0].evaluate_mp(t), arc.coords[1].evaluate_mp(t))))
            return out

    prev = values(dps)
    while True:
        if dps >= max_dps:
            raise LipgeoError("numerical order did not stabilise within the precision cap")
        dps *= 2
        cur = values(dps)
        if all(a == b or (b != 0 and abs(a - b) <= mpmath.mpf(10) ** -20 * abs(b)) for a, b in zip(prev, cur)):
            break
        prev = cur
    with mpmath.workdps(dps):
        pts = [(mpmath.mpf(2) ** e, v) for e, v in zip(exps, cur)]
        if all(v == 0 for _, v in pts):
            return INF
        if any(v == 0 for _, v in pts):
            raise LipgeoError("function vanishes on some levels only")
        x = [mpmath.log(t) for t, _ in pts]
        y = [mpmath.log(v) for _, v in pts]
        n = len(x)
        mx, my = sum(x) / n, sum(y) / n
        slope = sum((a - mx) * (b - my) for a, b in zip(x, y)) / sum((a - mx) ** 2 for a in x)
        return float(slope)
