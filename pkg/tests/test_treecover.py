import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kr_shortcut import graph as G
from kr_shortcut.graph import GraphError, WeightedGraph
from kr_shortcut.treecover import (
    StarTree,
    TreeCover,
    additive_cover_at_scale,
    build_tree_cover,
    cover_matrix,
    verify_cover,
)

from oracles import floyd_warshall
from strategies import planar_graphs, trees


def test_two_vertices_single_scale():
    g = WeightedGraph(2, [(0, 1, 3)])
    tc = build_tree_cover(g, 0.5)
    assert tc.scales() == {4.0: 2}
    assert [t.root for t in tc.trees] == [0, 1]
    assert cover_matrix(tc).tolist() == [[0, 3], [3, 0]]
    assert verify_cover(tc, g).ok


def test_single_vertex():
    tc = build_tree_cover(WeightedGraph(1), 0.5)
    assert len(tc.trees) == 1 and tc.forests == [[0]]


def test_star_spans_clusters_within_reach():
    # unit path at a scale with singleton clusters: each star holds the ball of radius 4
    stars = additive_cover_at_scale(G.path(13), 4, 0.75, 3)
    assert [t.root for t in stars] == list(range(13))
    for t in stars:
        assert t.members == tuple(x for x in range(13) if abs(x - t.root) <= 4)
        assert t.weights == tuple(float(abs(x - t.root)) for x in t.members)
        assert t.distance(t.members[0], t.members[-1]) == t.weights[0] + t.weights[-1]
        assert t.distance(t.root, t.root) == 0.0


def test_unit_path_stretch():
    g = G.path(33)
    tc = build_tree_cover(g, 0.5)
    rep = verify_cover(tc, g)
    assert rep.ok
    assert rep.stats["max_stretch"] <= 1.5
    assert rep.stats["uncovered_pairs"] == 0
    assert sorted(rep.stats["trees_per_scale"]) == ["1.0", "16.0", "2.0", "32.0", "4.0", "8.0"]


def test_forests_are_vertex_disjoint():
    g = G.random_planar_like(120, 2)
    tc = build_tree_cover(g, 0.5)
    for f, ks in enumerate(tc.forests):
        seen = set()
        for k in ks:
            assert tc.trees[k].forest == f
            assert not seen & set(tc.trees[k].members)
            seen |= set(tc.trees[k].members)
    assert sorted(k for ks in tc.forests for k in ks) == list(range(len(tc.trees)))


def test_preconditions():
    with pytest.raises(GraphError):
        build_tree_cover(G.path(4), 0)
    with pytest.raises(GraphError):
        build_tree_cover(G.path(4), 1)
    with pytest.raises(GraphError):
        build_tree_cover(WeightedGraph(3, [(0, 1, 1)]), 0.5)


def test_verify_flags_mutations():
    g = G.grid(6, 6)
    tc = build_tree_cover(g, 0.5)
    assert verify_cover(tc, g).ok
    # dropping every tree that holds vertex 0 leaves pairs uncovered
    keep = [t for t in tc.trees if 0 not in t.members]
    bad = TreeCover(tc.n, tc.eps, keep, [])
    rep = verify_cover(bad, g)
    assert rep.stats["uncovered_pairs"] > 0 and not rep.ok
    # a star whose weights undercut the graph distance
    t = tc.trees[-1]
    short = StarTree(t.root, t.members, tuple(0.5 * w for w in t.weights), t.clusters, t.scale, 0)
    rep = verify_cover(TreeCover(tc.n, tc.eps, tc.trees + [short], tc.forests), g)
    assert any("differ" in m for m in rep.violations)
    assert rep.stats["dominance_violations"] > 0
    # two overlapping trees in one forest
    forests = [list(tc.forests[0]) + list(tc.forests[1])] + tc.forests[2:]
    rep = verify_cover(TreeCover(tc.n, tc.eps, tc.trees, forests), g)
    assert any("overlap" in m for m in rep.violations)


def test_json_round_trip():
    g = G.tree(40, 3)
    tc = build_tree_cover(g, 0.25)
    back = TreeCover.from_json(tc.to_json())
    assert back.to_json() == tc.to_json()
    assert json.loads(tc.to_json())["kind"] == "tree_cover"
    with pytest.raises(GraphError):
        TreeCover.from_dict({"kind": "other"})


@settings(max_examples=25)
@given(st.one_of(trees(max_n=25), planar_graphs(max_n=25)), st.sampled_from([0.5, 0.25]))
def test_cover_against_floyd_warshall(g, eps):
    tc = build_tree_cover(g, eps)
    fw = np.array(floyd_warshall(g.n, g.edges()))
    best = cover_matrix(tc)
    assert np.all(best >= fw - 1e-9)
    assert np.all(best <= (1 + eps) * fw + 1e-9)
    for t in tc.trees:
        for u, w in zip(t.members, t.weights):
            assert w == fw[t.root, u]
