from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lipgeo.exponents import INF, Arc, LipgeoError, W, arc_tord, ord_on_arc
from lipgeo.metriclab import (
    GermModel,
    ModelArc,
    PancakeDecomposition,
    Patch,
    ScaleSamplePlan,
    Term,
    cusp_model,
    distance,
    estimate_order,
    function_order_numeric,
    horn_exponent_numeric,
    horn_model,
    horn_sector_model,
    lne_report,
    link_svg,
    locate,
    meridian_arcs,
    model_from_json,
    model_to_json,
    pancake_check,
    projection_experiment,
    random_planes,
    sample_link,
    tangency_numeric,
    tangent_cone_sample,
    tord_preserved,
    triangle_model,
)
from lipgeo.metriclab.experiments import PROJECTION_PLAN, projected_min_tord

TOL = 0.05
BRANCHES = (ModelArc(0, 1.0), ModelArc(1, 1.0))


def plane_model() -> GermModel:
    """The sector between the arcs (t, 0) and (t, t) as one coordinate-parameterized patch."""
    return GermModel(2, (Patch(((Term.const(1),), (Term.linear(1, 0.0, 1.0),))),), name="sector")


def curve_pair_model() -> GermModel:
    """Two plane sheets carrying w = 0 .. t^2 and w = 0 .. 2t^2 in a 3-d chart."""
    sheets = []
    for top in (1.0, 2.0):
        sheets.append(Patch(((Term.const(1),), (Term.linear(2, 0.0, top),), (Term.linear(3, 0.0, 1.0),))))
    return GermModel(3, tuple(sheets), (((0, 0), (1, 0)),), name="pair")


# ---------------------------------------------------------------------------
# order estimation


def test_estimate_order_recovers_monomial():
    ts = [2.0**-k for k in range(4, 12)]
    slope, resid = estimate_order([(t, 5 * t**1.5) for t in ts])
    assert abs(slope - 1.5) < 1e-6 and resid < 1e-6


def test_estimate_order_with_higher_term():
    ts = [2.0**-k for k in range(20, 40, 2)]
    assert abs(estimate_order([(t, t**2 + t**3) for t in ts])[0] - 2) < 1e-4


def test_estimate_order_constant():
    assert abs(estimate_order([(2.0**-k, 3.0) for k in range(4, 9)])[0]) < 1e-12


def test_estimate_order_errors():
    with pytest.raises(LipgeoError):
        estimate_order([(0.1, 1), (0.2, 1), (0.3, 1)])
    with pytest.raises(LipgeoError):
        estimate_order([(0.1, 1), (0.2, 0), (0.3, 1), (0.4, 1)])
    with pytest.raises(LipgeoError):
        estimate_order([(0.1, 1), (0.1, 1), (0.3, 1), (0.4, 1)])


@settings(max_examples=50)
@given(st.integers(1, 42), st.integers(1, 7), st.floats(0.01, 100))
def test_estimate_order_exact_on_monomials(num, den, c):
    q = Fraction(num, den)
    ts = ScaleSamplePlan().t_levels()
    assert abs(estimate_order([(t, c * t ** float(q)) for t in ts])[0] - float(q)) < 1e-6


def test_plan_validation():
    with pytest.raises(LipgeoError):
        ScaleSamplePlan(levels=3)
    with pytest.raises(LipgeoError):
        ScaleSamplePlan(tmin_exp=-4, tmax_exp=-6)
    ts = ScaleSamplePlan().t_levels()
    assert len(ts) == 13 and ts[0] == 2.0**-6 and ts[-1] == 2.0**-18


# ---------------------------------------------------------------------------
# models, links and distances


def test_horn_link_is_a_circle_of_radius_t_beta():
    h = horn_model(2)
    t = 2.0**-5
    for chain in sample_link(h, t):
        assert np.allclose(chain[:, 2], t)
        assert np.all(np.linalg.norm(chain[:, :2], axis=1) <= t**2 * (1 + 1e-12))
    with pytest.raises(LipgeoError):
        sample_link(h, 2.0)


def test_cusp_distances_at_one_scale():
    c = cusp_model()
    for k in (8, 10, 12):
        t = 2.0**-k
        outer = distance(c, (0, 1.0, t), (1, 1.0, t))
        assert math.isclose(outer, 2 * t**1.5, rel_tol=1e-9)
        inner = distance(c, (0, 1.0, t), (1, 1.0, t), "inner")
        assert 1.5 * t <= inner <= 4 * t


def test_horn_antipodal_ratio_is_bounded():
    h = horn_model(2)
    ratios = []
    for t in ScaleSamplePlan(levels=5).t_levels():
        p, q = (0, 0.0, float(t)), (1, 0.0, float(t))
        ratios.append(distance(h, p, q, "inner") / distance(h, p, q))
    assert max(ratios) < 2 and max(ratios) / min(ratios) < 1.05


def test_distance_to_itself_is_zero():
    c = cusp_model()
    p = (0, 0.5, 2.0**-8)
    dec = PancakeDecomposition(((0,), (1,)), (1, 1))
    assert distance(c, p, p) == 0
    assert distance(c, p, p, "inner") == 0
    assert distance(c, p, p, "pancake", decomposition=dec) == 0


def test_distance_errors():
    c = cusp_model()
    with pytest.raises(LipgeoError):
        distance(c, (0, 0.5, 0.01), (1, 0.5, 0.01), "pancake")
    with pytest.raises(LipgeoError):
        distance(c, (0, 0.5, 0.01), (1, 0.5, 0.02), "inner")
    with pytest.raises(LipgeoError):
        distance(c, (0, 0.5, 0.01), (1, 0.5, 0.01), "geodesic")


def test_outer_inner_pancake_chain():
    c = cusp_model()
    dec = PancakeDecomposition(((0,), (1,)), (1, 1))
    ratios = []
    for t in (2.0**-6, 2.0**-9, 2.0**-12):
        p, q = (0, 0.7, t), (1, 0.4, t)
        outer = distance(c, p, q)
        inner = distance(c, p, q, "inner")
        pancake = distance(c, p, q, "pancake", decomposition=dec)
        assert outer <= inner * (1 + 1e-9)
        assert inner <= pancake * (1 + 1e-9)
        ratios.append(pancake / inner)
    assert max(ratios) < 2


def test_inner_distance_non_increasing_under_refinement():
    c = cusp_model()
    t = 2.0**-8
    p, q = (0, 1.0, t), (1, 1.0, t)
    values = [distance(c, p, q, "inner", ScaleSamplePlan(resolution=r)) for r in (9, 17, 33, 65)]
    assert all(b <= a * (1 + 1e-12) for a, b in zip(values, values[1:]))


def test_locate_symbolic_arcs():
    c = cusp_model()
    branch = Arc.of({1: 1}, {1: -1}, {"3/2": 1})
    assert locate(c, branch) == ModelArc(0, 1.0)
    with pytest.raises(LipgeoError):
        locate(c, Arc.of({1: 1}, {1: 1}, {1: 1}))


def test_model_validation():
    with pytest.raises(LipgeoError):
        GermModel(2, ())
    bad = Patch(((Term.const(2),), (Term.const(1),)))
    with pytest.raises(LipgeoError):
        GermModel(2, (bad,))
    with pytest.raises(LipgeoError):
        Term.const("1/2")
    with pytest.raises(LipgeoError):
        horn_model("1/2")


def test_model_json_round_trip():
    for m in (horn_model("3/2"), cusp_model(), triangle_model(2)):
        assert model_from_json(model_to_json(m)) == m
    with pytest.raises(LipgeoError):
        model_from_json({"dim": 3})


def test_link_svg():
    svg = link_svg(horn_model(2), 0.1)
    assert svg.startswith("<svg") and "polyline" in svg and "horn(2)" in svg


# ---------------------------------------------------------------------------
# tangency and LNE


def test_symbolic_pair_outer_tangency():
    m = curve_pair_model()
    g1 = Arc.of({1: 1}, {2: 1}, {3: 1})
    g2 = Arc.of({1: 1}, {2: 2}, {3: 1})
    assert arc_tord(g1, g2) == 2
    assert abs(tangency_numeric(m, g1, g2) - 2) <= TOL


def test_cusp_tangency_gap():
    c = cusp_model()
    assert abs(tangency_numeric(c, *BRANCHES) - 1.5) <= TOL
    assert abs(tangency_numeric(c, *BRANCHES, "inner") - 1.0) <= TOL


def test_identical_arcs_give_infinite_order():
    c = cusp_model()
    assert tangency_numeric(c, BRANCHES[0], BRANCHES[0]) == INF


def test_plane_sector_tangency_is_one():
    m = plane_model()
    assert abs(tangency_numeric(m, ModelArc(0, 0.0), ModelArc(0, 1.0)) - 1) <= TOL


@pytest.mark.parametrize("beta", [1, "3/2", 2])
def test_horns_are_lne(beta):
    h = horn_model(beta)
    arcs = meridian_arcs(h, 6)
    assert len(arcs) >= 12
    report = lne_report(h, arcs)
    assert report.ok
    for p in report.pairs:
        assert p.itord <= p.tord + TOL


def test_cusp_is_not_lne():
    report = lne_report(cusp_model(), list(BRANCHES))
    assert not report.ok
    (v,) = report.violations
    assert abs(v.tord - 1.5) <= TOL and abs(v.itord - 1.0) <= TOL
    assert report.to_dict()["verdict"] == "violation"


def test_weak_mode():
    c = cusp_model()
    assert lne_report(c, list(BRANCHES), "weak", beta=1).ok
    assert not lne_report(c, list(BRANCHES), "weak", beta=2).ok
    with pytest.raises(LipgeoError):
        lne_report(c, list(BRANCHES), "weak")
    with pytest.raises(LipgeoError):
        lne_report(c, [BRANCHES[0]])


def test_reports_are_deterministic():
    c = cusp_model()
    plan = ScaleSamplePlan(seed=3)
    assert lne_report(c, list(BRANCHES), plan=plan).to_dict() == lne_report(c, list(BRANCHES), plan=plan).to_dict()
    a, b = projection_experiment(horn_model(2), 5, seed=4), projection_experiment(horn_model(2), 5, seed=4)
    assert a.to_dict() == b.to_dict()


# ---------------------------------------------------------------------------
# horns, pancakes, projections, tangent cones


def test_horn_exponent_numeric():
    assert abs(horn_exponent_numeric(horn_model(2)) - 2) <= TOL
    with pytest.raises(LipgeoError):
        horn_exponent_numeric(triangle_model(2))


def test_pancake_labels():
    split = pancake_check(horn_sector_model(2), PancakeDecomposition(((0,), (1,)), (2, 2)))
    assert split.valid and not split.minimal
    assert split.label == "valid but NOT minimal"
    cusp = pancake_check(cusp_model(), PancakeDecomposition(((0,), (1,)), (1, 1)))
    assert cusp.label == "valid and minimal"


def test_pancake_wrong_claim_is_invalid():
    report = pancake_check(cusp_model(), PancakeDecomposition(((0,), (1,)), ("3/2", 1)))
    assert report.label == "invalid"


def test_pancake_partition_errors():
    with pytest.raises(LipgeoError):
        pancake_check(cusp_model(), PancakeDecomposition(((0,), (0, 1)), (1, 1)))
    with pytest.raises(LipgeoError):
        PancakeDecomposition(((0,), (1,)), (1,))


def test_random_planes_are_orthonormal_and_seeded():
    frames = random_planes(4, 10, seed=2)
    for q in frames:
        assert np.allclose(q.T @ q, np.eye(2))
    assert all(np.array_equal(a, b) for a, b in zip(frames, random_planes(4, 10, seed=2)))
    with pytest.raises(LipgeoError):
        random_planes(2, 1, 0)


def test_axis_orthogonal_projection_of_horn():
    h = horn_model(2)
    est = projected_min_tord(h, np.eye(3)[:, :2], meridian_arcs(h, 4), PROJECTION_PLAN)
    assert abs(est - 1) <= TOL


def test_cone_projections_have_order_one():
    report = projection_experiment(horn_model(1), num_planes=10)
    assert all(abs(e - 1) <= TOL for e in report.estimates)


def test_projection_needs_three_dimensions():
    with pytest.raises(LipgeoError):
        projection_experiment(plane_model())


@pytest.mark.parametrize("beta", ["3/2", 2])
def test_tangent_cone_decay(beta):
    report = tangent_cone_sample(horn_model(beta))
    assert abs(report.decay - (float(Fraction(beta)) - 1)) <= TOL


def test_cone_link_matches_limit_circle():
    report = tangent_cone_sample(horn_model(1))
    assert report.hausdorff[-1] < report.mesh_tolerance


# ---------------------------------------------------------------------------
# symbolic cross-checks


def test_tord_preserved():
    a, b = Arc.graph({2: 1}), Arc.graph({2: 1, 3: 1})
    rows = tord_preserved([(a, a), (b, b)])
    assert rows[0]["ok"] and rows[0]["tord"] == "3"
    rows = tord_preserved([(a, a), (b, Arc.graph({2: 2}))])
    assert not rows[0]["ok"]


def test_function_order_numeric_matches_substitution():
    g = Arc.graph({"5/2": 3, 4: 1})
    assert abs(function_order_numeric(W, g) - float(ord_on_arc(W, g))) < 1e-3
    assert function_order_numeric(W - W, g) == INF

