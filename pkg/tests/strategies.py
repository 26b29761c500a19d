"""Hypothesis strategies for small minor-free graphs."""
from hypothesis import strategies as st

from kr_shortcut import graph as G


@st.composite
def trees(draw, max_n=30):
    n = draw(st.integers(1, max_n))
    edges = []
    for v in range(1, n):
        u = draw(st.integers(0, v - 1))
        edges.append((u, v, float(draw(st.integers(1, 9)))))
    return G.WeightedGraph(n, edges)


@st.composite
def planar_graphs(draw, max_n=60):
    kind = draw(st.sampled_from(["grid", "planar", "outer"]))
    seed = draw(st.integers(0, 10_000))
    if kind == "grid":
        a = draw(st.integers(1, 8))
        b = draw(st.integers(2, 8))
        return G.grid(a, b, draw(st.sampled_from(["unit", "random"])), seed)
    n = draw(st.integers(4, max_n))
    if kind == "planar":
        return G.random_planar_like(n, seed)
    return G.random_outerplanar(n, seed)


@st.composite
def with_delta(draw, graphs):
    g = draw(graphs)
    diam = G.diameter(g) if g.n > 1 else 1.0
    frac = draw(st.sampled_from([0.05, 0.125, 0.25, 0.5, 1.0, 2.0]))
    return g, max(diam * frac, 0.5)
