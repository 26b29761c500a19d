import json

import pytest
from hypothesis import given, settings

from kr_shortcut import graph as G
from kr_shortcut.cop import (
    CopDecomposition,
    InvariantViolation,
    build_decomposition,
    dom,
    expansion_bags,
    verify_all,
    verify_buffer,
    verify_radius,
    verify_skeleton,
    verify_tree_decomposition,
)
from kr_shortcut.graph import GraphError, WeightedGraph

from oracles import components, induced_distances
from strategies import planar_graphs, trees, with_delta


def complete(k):
    return WeightedGraph(k, [(i, j, 1) for i in range(k) for j in range(i + 1, k)])


# -- goldens ------------------------------------------------------------------

def test_golden_path_decomposition():
    # hand simulation: v1 alone starts the root; v2 starts the child, and the
    # cut-off from the root pulls v3..v5 (within 10/3 of v2) into the child
    dec = build_decomposition(G.path(5), 3, 10)
    assert [s.vertices for s in dec.supernodes] == [(0,), (1, 2, 3, 4)]
    assert [s.parent for s in dec.supernodes] == [None, 0]
    assert dec.supernodes[0].skeleton_vertices == [0]
    assert dec.supernodes[1].skeleton_vertices == [1]
    assert dec.assignment == [0, 1, 1, 1, 1]
    assert expansion_bags(dec) == [[0], [1, 0]]
    assert sorted(dom(dec, 1).vertices) == [1, 2, 3, 4]
    assert sorted(dom(dec, 0).vertices) == [0, 1, 2, 3, 4]
    assert verify_all(dec).ok


def test_single_vertex():
    dec = build_decomposition(WeightedGraph(1), 3, 1.0)
    assert len(dec.supernodes) == 1
    assert dec.supernodes[0].vertices == (0,)
    assert dec.supernodes[0].skeleton_leaves() == []
    assert expansion_bags(dec) == [[0]]
    rep = verify_all(dec)
    assert rep.ok and not rep.warnings


def test_leaf_domain_is_itself():
    dec = build_decomposition(G.grid(6, 6), 5, 1.5)
    leaves = [s.id for s in dec.supernodes if not dec.children[s.id]]
    for e in leaves:
        assert sorted(dom(dec, e).vertices) == list(dec.supernodes[e].vertices)
    with pytest.raises(GraphError):
        dom(dec, len(dec.supernodes))


def test_skeleton_reaches_witnesses():
    # on a cycle the third supernode sees two older ones, so its skeleton is a path
    g = WeightedGraph(6, [(i, (i + 1) % 6, 1) for i in range(6)])
    dec = build_decomposition(g, 4, 0.5)
    assert any(len(s.skeleton_vertices) > 1 for s in dec.supernodes)
    assert verify_all(dec).ok


def test_preconditions():
    with pytest.raises(GraphError):
        build_decomposition(WeightedGraph(3, [(0, 1, 1)]), 3, 1)
    with pytest.raises(GraphError):
        build_decomposition(G.path(3), 2, 1)
    with pytest.raises(GraphError):
        build_decomposition(G.path(3), 3, 0)


@pytest.mark.parametrize("k", [3, 4, 5, 6])
def test_clique_exceeds_width(k):
    # K_k is not K_k-minor-free: some BuildTree call must see k-1 supernodes
    with pytest.raises(InvariantViolation, match="r-2"):
        build_decomposition(complete(k), k, 10)
    build_decomposition(complete(k), k + 1, 10)


def test_determinism_and_json_round_trip():
    g = G.random_planar_like(150, 3)
    a = build_decomposition(g, 5, 6.0)
    b = build_decomposition(g, 5, 6.0)
    assert a.to_json() == b.to_json()
    c = CopDecomposition.from_json(a.to_json(), g)
    assert c.assignment == a.assignment
    assert c.to_json() == a.to_json()
    assert json.loads(a.to_json())["schema_version"] == 1


def test_dot_colors_by_supernode():
    dec = build_decomposition(G.path(5), 3, 10)
    text = dec.to_dot()
    assert "group=0" in text and "group=1" in text


# -- the verifiers catch broken decompositions --------------------------------

def test_verifiers_flag_radius_violation():
    dec = build_decomposition(G.path(5), 3, 10)
    bad = CopDecomposition(dec.graph, 3, 1.0, dec.supernodes, dec.assignment)
    assert not verify_radius(bad).ok


def test_verifiers_flag_skeleton_violations():
    dec = build_decomposition(G.path(5), 3, 10)
    # a skeleton that is not a shortest path tree in dom
    g = WeightedGraph(3, [(0, 1, 1), (1, 2, 1), (0, 2, 5)])
    d = build_decomposition(g, 4, 100).to_dict()
    d["supernodes"] = [{"id": 0, "parent": None, "vertices": [0, 1, 2], "skeleton_root": 0,
                        "skeleton_edges": [[0, 2], [0, 1]], "init_domain": [0, 1, 2]}]
    bad = CopDecomposition.from_dict(d, g)
    assert not verify_skeleton(bad).ok
    # too many leaves for r = 3
    star = G.star(4)
    d = build_decomposition(star, 3, 100).to_dict()
    d["supernodes"] = [{"id": 0, "parent": None, "vertices": [0, 1, 2, 3], "skeleton_root": 0,
                        "skeleton_edges": [[0, 1], [0, 2], [0, 3]], "init_domain": [0, 1, 2, 3]}]
    rep = verify_skeleton(CopDecomposition.from_dict(d, star))
    assert any("leaves" in m for m in rep.violations)
    assert verify_skeleton(dec).ok


def test_verifiers_flag_buffer_and_domain():
    g = G.path(4)
    d = {"kind": "cop_decomposition", "r": 3, "delta": 3.0, "n": 4, "supernodes": [
        {"id": 0, "parent": None, "vertices": [0], "skeleton_root": 0, "skeleton_edges": [],
         "init_domain": [0, 1, 2, 3]},
        {"id": 1, "parent": 0, "vertices": [1], "skeleton_root": 1, "skeleton_edges": [],
         "init_domain": [1, 2, 3]},
        {"id": 2, "parent": 1, "vertices": [2, 3], "skeleton_root": 2, "skeleton_edges": [],
         "init_domain": [2, 3]},
    ]}
    # vertex 2 sits at distance 2 from supernode 0, which it does not touch
    assert verify_buffer(CopDecomposition.from_dict(d, g)).ok
    d["delta"] = 9.0
    rep = verify_buffer(CopDecomposition.from_dict(d, g))
    assert not rep.ok and "non-adjacent ancestor 0" in rep.violations[0]
    # reparenting a supernode leaves its old parent's domain inconsistent
    g2 = G.path(3)
    d2 = {"kind": "cop_decomposition", "r": 3, "delta": 3.0, "n": 3, "supernodes": [
        {"id": 0, "parent": None, "vertices": [1], "skeleton_root": 1, "skeleton_edges": [],
         "init_domain": [0, 1, 2]},
        {"id": 1, "parent": 0, "vertices": [0], "skeleton_root": 0, "skeleton_edges": [],
         "init_domain": [0]},
        {"id": 2, "parent": 0, "vertices": [2], "skeleton_root": 2, "skeleton_edges": [],
         "init_domain": [2]},
    ]}
    assert verify_tree_decomposition(CopDecomposition.from_dict(d2, g2)).ok
    d2["supernodes"][2]["parent"] = 1
    d2["supernodes"][2]["init_domain"] = [2]
    rep = verify_tree_decomposition(CopDecomposition.from_dict(d2, g2))
    assert any("dom_S" in m for m in rep.violations)


def test_buffer_equality_is_a_warning():
    g = G.path(3)
    d = {"kind": "cop_decomposition", "r": 3, "delta": 6.0, "n": 3, "supernodes": [
        {"id": 0, "parent": None, "vertices": [0], "skeleton_root": 0, "skeleton_edges": [],
         "init_domain": [0, 1, 2]},
        {"id": 1, "parent": 0, "vertices": [1], "skeleton_root": 1, "skeleton_edges": [],
         "init_domain": [1, 2]},
        {"id": 2, "parent": 1, "vertices": [2], "skeleton_root": 2, "skeleton_edges": [],
         "init_domain": [2]},
    ]}
    rep = verify_buffer(CopDecomposition.from_dict(d, g))
    # vertex 2 is exactly delta / r = 2 away from supernode 0
    assert rep.ok and rep.warnings


# -- properties against brute-force oracles -----------------------------------

def _check_with_oracles(dec):
    g = dec.graph
    edges = g.edges()
    n = g.n
    owner = dec.assignment
    assert sorted(v for s in dec.supernodes for v in s.vertices) == list(range(n))
    for s in dec.supernodes:
        assert len(components(n, edges, s.vertices)) == 1
        d = induced_distances(n, edges, set(s.vertices))
        skel = s.skeleton_vertices
        assert set(skel) <= set(s.vertices)
        for v in s.vertices:
            assert min(d[v][x] for x in skel) <= dec.delta
        assert len(s.skeleton_leaves()) <= dec.r - 2
    adj = {(min(owner[u], owner[v]), max(owner[u], owner[v])) for u, v, _ in edges}
    for s in dec.supernodes:
        anc = dec.ancestors(s.id)
        bag = [s.id] + [x for x in anc if (min(x, s.id), max(x, s.id)) in adj]
        assert len(bag) <= dec.r - 1
        dom_s = set(dec.dom_vertices(s.id))
        for x in anc:
            if (min(x, s.id), max(x, s.id)) in adj:
                continue
            dx = induced_distances(n, edges, set(dec.dom_vertices(x)))
            for v in dom_s:
                assert min(dx[v][y] for y in dec.supernodes[x].vertices) > dec.buffer


@given(with_delta(trees(max_n=25)))
def test_trees_r3_properties(gd):
    g, delta = gd
    dec = build_decomposition(g, 3, delta, debug=True)
    _check_with_oracles(dec)
    assert verify_all(dec).ok


@settings(max_examples=40)
@given(with_delta(planar_graphs(max_n=30)))
def test_planar_r5_properties(gd):
    g, delta = gd
    dec = build_decomposition(g, 5, delta, debug=True)
    _check_with_oracles(dec)
    rep = verify_all(dec)
    assert rep.ok, rep.violations
    assert build_decomposition(g, 5, delta).assignment == dec.assignment
