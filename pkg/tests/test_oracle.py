import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from kr_shortcut import graph as G
from kr_shortcut.graph import GraphError
from kr_shortcut.oracle import RootedTree, bench, build_oracle, load_oracle, save_oracle
from kr_shortcut.treecover import TreeCover, build_tree_cover, cover_matrix


def naive_lca(parent, root, u, v):
    up = [u]
    while up[-1] != root:
        up.append(parent[up[-1]][0])
    seen = set(up)
    while v not in seen:
        v = parent[v][0]
    return v


@st.composite
def rooted_trees(draw, max_n=40):
    n = draw(st.integers(1, max_n))
    parent = {}
    for v in range(1, n):
        p = draw(st.integers(0, v - 1))
        parent[v] = (p, float(draw(st.integers(1, 9))))
    return parent


@given(rooted_trees(), st.data())
def test_lca_matches_parent_walk(parent, data):
    t = RootedTree(0, parent)
    n = len(parent) + 1
    for _ in range(10):
        u = data.draw(st.integers(0, n - 1))
        v = data.draw(st.integers(0, n - 1))
        a = naive_lca(parent, 0, u, v)
        assert t.lca(u, v) == a
        assert t.distance(u, v) == t.depth[u] + t.depth[v] - 2 * t.depth[a]
        assert t.distance(u, v) == t.distance(v, u)


def test_rooted_tree_errors():
    with pytest.raises(GraphError):
        RootedTree(0, {1: (5, 1.0)})
    with pytest.raises(GraphError):
        RootedTree(0, {1: (2, 1.0), 2: (1, 1.0)})
    t = RootedTree(0, {1: (0, 2.0), 2: (0, 3.0)})
    assert t.is_star and 2 in t and 7 not in t and len(t) == 3


@pytest.fixture(scope="module")
def grid_oracle():
    g = G.grid(9, 9, "random", 3)
    return g, build_oracle(build_tree_cover(g, 0.5))


def test_queries_match_cover_matrix(grid_oracle):
    g, o = grid_oracle
    best = cover_matrix(o.cover)
    rng = random.Random(0)
    for _ in range(300):
        u, v = rng.randrange(g.n), rng.randrange(g.n)
        assert o.query(u, v) == best[u, v]
        assert o.query(u, v) == o.query(v, u)
    assert o.query(5, 5) == 0.0


def test_general_trees_take_the_lca_path(grid_oracle):
    # swapping every star for an equivalent two-level tree must not change answers
    g, o = grid_oracle
    o2 = build_oracle(o.cover)
    o2.star[:] = False
    for u, v in [(0, 80), (3, 44), (17, 18)]:
        assert o2.query(u, v) == o.query(u, v)


def test_unknown_vertex(grid_oracle):
    _, o = grid_oracle
    for bad in (-1, 81, 2.5, "a"):
        with pytest.raises(GraphError):
            o.query(0, bad)


def test_save_load_round_trip(grid_oracle):
    g, o = grid_oracle
    o2 = load_oracle(save_oracle(o))
    assert np.array_equal(o2.forest_index, o.forest_index)
    assert all(o2.query(u, 40) == o.query(u, 40) for u in range(g.n))


def test_uncovered_pair_is_rejected(grid_oracle):
    _, o = grid_oracle
    tc = o.cover
    keep = [t for t in tc.trees if 0 not in t.members]
    forests = [[k] for k in range(len(keep))]
    with pytest.raises(GraphError, match="not covered"):
        build_oracle(TreeCover(tc.n, tc.eps, keep, forests))


def test_bench(grid_oracle):
    _, o = grid_oracle
    assert bench(o, []) == {"queries": 0, "answers": []}
    out = bench(o, [(0, 1), (2, 70)], repeat=2)
    assert out["queries"] == 2 and len(out["answers"]) == 2
    assert out["forests_probed_per_query"] == o.forest_index.shape[0]
    assert out["space_trees"] == len(o.trees)
