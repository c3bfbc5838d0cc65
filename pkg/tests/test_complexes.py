from __future__ import annotations

import random
from fractions import Fraction

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings

from helpers import complexes, random_complex, shuffled_copy
from lipgeo.complexes import (
    HolderComplex,
    VertexClass,
    betti_number,
    canonicalize,
    classify_vertex,
    complex_from_json,
    complex_to_json,
    components,
    equivalent,
    find_isomorphism,
    horn_exponent,
    is_canonical,
    isomorphic,
    realize_model,
    to_dot,
    to_svg,
)
from lipgeo.exponents import LipgeoError
from lipgeo.metriclab import horn_exponent_numeric, sample_link


def nx_graph(c: HolderComplex) -> nx.Graph:
    """Simple graph whose edge attribute is the sorted multiset of parallel labels."""
    g = nx.Graph()
    g.add_nodes_from(c.vertices)
    for e in c.edges:
        a, b = e.ends
        labels = g.edges[a, b]["betas"] if g.has_edge(a, b) else ()
        g.add_edge(a, b, betas=tuple(sorted(labels + (e.beta,))))
    return g


def nx_isomorphic(c1: HolderComplex, c2: HolderComplex) -> bool:
    return nx.is_isomorphic(nx_graph(c1), nx_graph(c2),
                            edge_match=nx.algorithms.isomorphism.categorical_edge_match("betas", ()))


# ---------------------------------------------------------------------------
# data model


def test_rejects_self_loops_and_small_beta():
    with pytest.raises(LipgeoError):
        HolderComplex.build([("a", "a", 2)])
    with pytest.raises(LipgeoError):
        HolderComplex.build([("a", "b", Fraction(1, 2))])


def test_rejects_isolated_vertices():
    with pytest.raises(LipgeoError):
        HolderComplex(("a", "b", "c"), HolderComplex.build([("a", "b", 1)]).edges)


def test_json_round_trip():
    c = HolderComplex.build([("a", "b", "3/2"), ("b", "c", 2), ("a", "b", 5)])
    assert complex_from_json(complex_to_json(c)) == c
    with pytest.raises(LipgeoError):
        complex_from_json({"vertices": ["a"], "edges": [{"id": "g", "ends": ["a"], "beta": "1"}]})


def test_dot_and_svg_output():
    c = HolderComplex.build([("a", "b", "3/2"), ("b", "c", 2)])
    dot = to_dot(c)
    assert dot.startswith("graph") and 'label="3/2"' in dot
    svg = to_svg(c)
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")


# ---------------------------------------------------------------------------
# classification and simplification


def test_classify_path_middle_is_non_critical():
    c = HolderComplex.build([("v1", "v0", 2), ("v0", "v2", 3)])
    assert classify_vertex(c, "v0") is VertexClass.NON_CRITICAL


def test_classify_parallel_pair_is_loop():
    c = HolderComplex.build([("v0", "v1", 2), ("v0", "v1", 3)])
    assert classify_vertex(c, "v0") is VertexClass.LOOP


def test_classify_degree_one_is_critical():
    c = HolderComplex.build([("v0", "v1", 2)])
    assert classify_vertex(c, "v0") is VertexClass.CRITICAL
    with pytest.raises(LipgeoError):
        classify_vertex(c, "nope")


def test_canonicalize_path():
    c = canonicalize(HolderComplex.build([("v1", "v0", 2), ("v0", "v2", 3)]))
    assert len(c.edges) == 1
    assert set(c.edges[0].ends) == {"v1", "v2"}
    assert c.edges[0].beta == 2


def test_canonicalize_loop_pair():
    c = canonicalize(HolderComplex.build([("v0", "v1", "3/2"), ("v0", "v1", 2)]))
    assert sorted(e.beta for e in c.edges) == [Fraction(3, 2), Fraction(3, 2)]


def test_canonicalize_triangle_to_bigon():
    c = canonicalize(HolderComplex.cycle([2, 3, 5]))
    assert len(c.vertices) == 2
    assert [e.beta for e in c.edges] == [2, 2]


def test_is_canonical_examples():
    assert is_canonical(canonicalize(HolderComplex.cycle([2, 3, 5])))[0]
    ok, bad = is_canonical(HolderComplex.build([("v1", "v0", 2), ("v0", "v2", 3)]))
    assert not ok and bad[0].vertex == "v0"
    ok, bad = is_canonical(HolderComplex.build([("a", "b", 2), ("a", "b", 3)]))
    assert not ok and {v.kind for v in bad} == {"unequal loop pair"}
    assert set(bad[0].edges) == {"g0", "g1"}


@given(complexes())
def test_canonicalize_is_idempotent(c):
    once = canonicalize(c)
    assert canonicalize(once) == once
    assert is_canonical(once)[0]


@given(complexes())
def test_canonicalize_preserves_topology(c):
    d = canonicalize(c)
    assert len(components(d)) == len(components(c))
    assert betti_number(d) == betti_number(c)


@settings(max_examples=60)
@given(complexes())
def test_canonicalize_order_free(c):
    ref = canonicalize(c)
    for seed in range(3):
        assert isomorphic(ref, canonicalize(c, random.Random(seed)))


# ---------------------------------------------------------------------------
# equivalence


def test_equivalent_examples():
    c = HolderComplex.build([("a", "b", 2), ("b", "c", 3), ("c", "a", 4), ("c", "d", 2)])
    same, witness = equivalent(c, shuffled_copy(c, random.Random(1)))
    assert same and set(witness["vertices"]) == set(canonicalize(c).vertices)
    assert not equivalent(HolderComplex.build([("a", "b", 2)]), HolderComplex.build([("a", "b", 3)]))[0]
    assert equivalent(HolderComplex.cycle([2, 3, 5]), HolderComplex.cycle([2, 7, 9, 11]))[0]


def test_witness_is_deterministic():
    c = HolderComplex.build([("a", "b", 2), ("a", "b", 2), ("b", "c", 3), ("c", "a", 3)])
    d = shuffled_copy(c, random.Random(7))
    assert find_isomorphism(c, d) == find_isomorphism(c, d)


def test_witness_maps_edges_with_labels():
    c = HolderComplex.build([("a", "b", 2), ("b", "c", 3), ("c", "d", 4), ("d", "a", 5), ("a", "c", 6)])
    d = shuffled_copy(c, random.Random(3))
    w = find_isomorphism(c, d)
    vm, em = w["vertices"], w["edges"]
    for e in c.edges:
        f = d.edge(em[e.id])
        assert f.beta == e.beta
        assert {vm[x] for x in e.ends} == set(f.ends)


@settings(max_examples=80)
@given(complexes(), complexes())
def test_isomorphism_agrees_with_networkx(c1, c2):
    assert isomorphic(c1, c2) == nx_isomorphic(c1, c2)


def test_isomorphism_agrees_with_networkx_on_near_copies():
    rng = random.Random(5)
    for _ in range(100):
        c = random_complex(rng, 8, 12)
        d = shuffled_copy(c, rng)
        if rng.random() < 0.5:
            e = rng.choice(d.edges)
            d = HolderComplex(d.vertices, tuple(
                f if f.id != e.id else type(f)(f.id, f.ends, f.beta + 1) for f in d.edges))
        assert isomorphic(c, d) == nx_isomorphic(c, d)


@given(complexes(), complexes(), complexes())
def test_equivalence_relation_laws(a, b, c):
    assert equivalent(a, a)[0]
    assert equivalent(a, b)[0] == equivalent(b, a)[0]
    if equivalent(a, b)[0] and equivalent(b, c)[0]:
        assert equivalent(a, c)[0]


# ---------------------------------------------------------------------------
# horns and realization


def test_horn_exponent_examples():
    assert horn_exponent(HolderComplex.cycle([2, 3, 5])) == 2
    assert horn_exponent(HolderComplex.cycle([1, 1])) == 1
    with pytest.raises(LipgeoError):
        horn_exponent(HolderComplex.build([("a", "b", 2), ("b", "c", 2)]))


@given(complexes())
def test_horn_exponent_is_canonical_label(c):
    try:
        beta = horn_exponent(c)
    except LipgeoError:
        return
    assert all(e.beta == beta for e in canonicalize(c).edges)


def test_realize_single_edge():
    r = realize_model(HolderComplex.build([("a", "b", 2)]))
    assert len(r.model.patches) == 1
    chains = sample_link(r.model, 0.01)
    assert len(chains) == 1


def test_realize_cycle_matches_horn_exponent():
    from lipgeo.metriclab import ScaleSamplePlan

    plan = ScaleSamplePlan(tmin_exp=-60, tmax_exp=-20, resolution=16)
    r = realize_model(HolderComplex.cycle([2, 3, 5]))
    assert r.model.is_closed_chain()
    assert abs(horn_exponent_numeric(r.model, plan) - 2) <= 0.05


def test_realize_glues_patch_ends_at_vertices():
    c = HolderComplex.build([("a", "b", 2), ("a", "b", 3)])
    r = realize_model(c)
    assert r.model.is_closed_chain()
    assert len(set(r.vertex_axis.values())) == len(c.vertices)
    assert r.model.dim == 1 + len(c.vertices) + len(c.edges)
    first, second = (np.asarray(p) for p in sample_link(r.model, 0.01))
    assert np.allclose(first[0], second[0])
    assert np.allclose(first[-1], second[-1])
    assert np.linalg.norm(first[0] - first[-1]) > 0
