"""Shared graph corpus for the property and acceptance suites."""
from __future__ import annotations

from kr_shortcut import graph as G


def tree_like():
    """K_3-minor-free graphs: paths, stars and random trees (r = 3 is valid)."""
    out = [
        ("path2", G.path(2)),
        ("path5", G.path(5)),
        ("path17", G.path(17)),
        ("path64", G.path(64)),
        ("path150", G.path(150)),
        ("path40w", G.WeightedGraph(40, [(i, i + 1, 1 + (7 * i) % 9) for i in range(39)])),
        ("path90w", G.WeightedGraph(90, [(i, i + 1, 1 + (5 * i) % 4) for i in range(89)])),
        ("star9", G.star(9)),
        ("star40", G.star(40, weight=3)),
    ]
    for n, seed in [(10, 1), (30, 2), (50, 3), (100, 4), (100, 5), (200, 6), (250, 7),
                    (300, 8), (400, 9), (400, 10)]:
        out.append((f"tree{n}s{seed}", G.tree(n, seed)))
    out.append(("tree120u", G.tree(120, 11, weight="unit")))
    return out


def outerplanar():
    """K_4-minor-free graphs."""
    return [(f"outer{n}s{seed}", G.random_outerplanar(n, seed))
            for n, seed in [(12, 1), (40, 2), (80, 3), (150, 4), (250, 5)]]


def planar():
    """K_5-minor-free graphs: grids and Delaunay-based planar graphs."""
    out = [(f"grid{a}x{b}", G.grid(a, b)) for a, b in [(2, 2), (3, 7), (5, 5), (6, 15), (10, 10), (15, 15), (20, 20)]]
    out += [(f"grid{a}x{b}w", G.grid(a, b, "random", seed=a * b))
            for a, b in [(4, 9), (8, 8), (12, 12), (20, 20)]]
    out += [(f"planar{n}s{seed}", G.random_planar_like(n, seed))
            for n, seed in [(20, 1), (50, 2), (100, 3), (150, 4), (200, 5), (250, 6),
                            (300, 7), (350, 8), (400, 9), (400, 10), (120, 11), (60, 12),
                            (30, 13), (80, 14), (180, 15)]]
    return out


def decomposition_corpus():
    """(name, graph, r) triples: r = 5 everywhere, plus the smallest valid r."""
    out = []
    for name, g in tree_like():
        out += [(name, g, 3), (name, g, 5)]
    for name, g in outerplanar():
        out += [(name, g, 4), (name, g, 5)]
    for name, g in planar():
        out.append((name, g, 5))
    return out
