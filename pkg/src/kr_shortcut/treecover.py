"""(1+eps)-tree covers built from star expansions of per-scale clusterings.

At scale ``Delta_i = 2**i`` the graph is cut into clusters whose vertices lie
close to their center.  Each cluster A gets one star rooted at its center that
spans every cluster within reach ``Delta_i`` of A, so any pair at distance
about ``Delta_i`` is seen by a star whose root sits next to one endpoint.
"""
from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from .cop import build_decomposition
from .graph import GraphError, WeightedGraph, all_pairs, connected_components, diameter, dijkstra
from .partition import build_partition, cluster_graph
from .report import Report

SCHEMA_VERSION = 1


@dataclass
class StarTree:
    root: int
    members: Tuple[int, ...]
    # weights[k] = dist_G(root, members[k])
    weights: Tuple[float, ...]
    clusters: Tuple[int, ...]
    scale: float = 0.0
    forest: int = -1

    def weight_of(self, u: int) -> float:
        return self.weights[self.members.index(u)]

    def distance(self, u: int, v: int) -> float:
        if u == v:
            return 0.0
        return self.weight_of(u) + self.weight_of(v)

    def to_dict(self) -> dict:
        return {"root": self.root, "members": list(self.members), "weights": list(self.weights),
                "clusters": list(self.clusters), "scale": self.scale, "forest": self.forest}

    @classmethod
    def from_dict(cls, d: dict) -> "StarTree":
        return cls(d["root"], tuple(d["members"]), tuple(float(w) for w in d["weights"]),
                   tuple(d.get("clusters", ())), float(d["scale"]), int(d["forest"]))


@dataclass
class TreeCover:
    n: int
    eps: float
    trees: List[StarTree]
    forests: List[List[int]]

    def scales(self) -> Dict[float, int]:
        out: Dict[float, int] = {}
        for t in self.trees:
            out[t.scale] = out.get(t.scale, 0) + 1
        return dict(sorted(out.items()))

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "tree_cover",
            "n": self.n,
            "eps": self.eps,
            "trees": [t.to_dict() for t in self.trees],
            "forests": [list(f) for f in self.forests],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "TreeCover":
        if d.get("kind") != "tree_cover":
            raise GraphError("not a tree cover document")
        return cls(int(d["n"]), float(d["eps"]), [StarTree.from_dict(t) for t in d["trees"]],
                   [list(f) for f in d["forests"]])

    @classmethod
    def from_json(cls, text: str) -> "TreeCover":
        return cls.from_dict(json.loads(text))


def additive_cover_at_scale(g: WeightedGraph, scale: float, eps: float, r: int = 5,
                            _root_dist: Optional[dict] = None) -> List[StarTree]:
    """Stars with additive error at most ``eps * scale / 2`` for pairs within ``scale``."""
    if not 0 < eps < 1:
        raise GraphError("eps must lie in (0, 1)")
    delta_c = eps * scale / 8
    part = build_partition(build_decomposition(g, r, delta_c))
    cg = cluster_graph(part)
    trees = []
    for a, verts in enumerate(part.clusters):
        dist, *_ = dijkstra(g, verts, limit=scale)
        demand = {part.owner[v] for v in dist}
        # BFS in the cluster graph until every demanded cluster is reached
        depth = {a: 0}
        order = [a]
        q = deque([a])
        missing = set(demand) - {a}
        while q and missing:
            x = q.popleft()
            for y in cg.adj[x]:
                if y not in depth:
                    depth[y] = depth[x] + 1
                    order.append(y)
                    q.append(y)
                    missing.discard(y)
        if missing:
            raise GraphError("cluster graph is disconnected")
        reach = max((depth[c] for c in demand), default=0)
        chosen = sorted(c for c in order if depth[c] <= reach)
        root = part.centers[a]
        members = sorted(v for c in chosen for v in part.clusters[c])
        cache = {} if _root_dist is None else _root_dist
        if root not in cache:
            cache[root] = dijkstra(g, [root])[0]
        rd = cache[root]
        trees.append(StarTree(root, tuple(members), tuple(rd[v] for v in members),
                              tuple(chosen), float(scale)))
    return trees


def _scale_exponents(g: WeightedGraph) -> range:
    lo = math.ceil(math.log2(g.min_weight()))
    hi = math.ceil(math.log2(diameter(g)))
    return range(lo, max(lo, hi) + 1)


def build_tree_cover(g: WeightedGraph, eps: float, r: int = 5) -> TreeCover:
    if not 0 < eps < 1:
        raise GraphError("eps must lie in (0, 1)")
    if g.n == 0 or len(connected_components(g)) != 1:
        raise GraphError("tree cover needs a connected, non-empty graph")
    if g.n == 1:
        return TreeCover(1, eps, [StarTree(0, (0,), (0.0,), (0,), 1.0, 0)], [[0]])
    trees: List[StarTree] = []
    root_dist: dict = {}
    for i in _scale_exponents(g):
        trees += additive_cover_at_scale(g, 2.0 ** i, eps / 2, r, root_dist)
    # first-fit packing into vertex-disjoint forests
    forests: List[List[int]] = []
    occupied: List[set] = [set() for _ in range(g.n)]
    for k, t in enumerate(trees):
        blocked = set().union(*(occupied[v] for v in t.members))
        f = next(f for f in range(len(forests) + 1) if f not in blocked)
        if f == len(forests):
            forests.append([])
        forests[f].append(k)
        for v in t.members:
            occupied[v].add(f)
        t.forest = f
    return TreeCover(g.n, eps, trees, forests)


def cover_matrix(tc: TreeCover) -> np.ndarray:
    """min over trees of d_T(u, v); inf where no tree holds both."""
    best = np.full((tc.n, tc.n), np.inf)
    for t in tc.trees:
        m = np.asarray(t.members)
        w = np.asarray(t.weights)
        d = w[:, None] + w[None, :]
        sub = best[np.ix_(m, m)]
        best[np.ix_(m, m)] = np.minimum(sub, d)
    np.fill_diagonal(best, 0.0)
    return best


def verify_cover(tc: TreeCover, g: WeightedGraph, dG: Optional[np.ndarray] = None) -> Report:
    rep = Report("tree_cover")
    if dG is None:
        dG = all_pairs(g)
    dominance = 0
    for k, t in enumerate(tc.trees):
        m = np.asarray(t.members)
        if t.root not in t.members:
            rep.fail(f"tree {k}: root {t.root} is not a member")
        w = np.asarray(t.weights)
        if not np.array_equal(w, dG[t.root, m]):
            rep.fail(f"tree {k}: star weights differ from graph distances to the root")
        d = w[:, None] + w[None, :]
        np.fill_diagonal(d, 0.0)
        bad = np.argwhere(d < dG[np.ix_(m, m)])
        dominance += len(bad)
        for i, j in bad[:5]:
            rep.fail(f"tree {k}: d_T({m[i]}, {m[j]}) = {d[i, j]} < {dG[m[i], m[j]]}")
        if len(bad) > 5:
            rep.fail(f"tree {k}: {len(bad) - 5} more dominance violations")
    for f, ks in enumerate(tc.forests):
        seen = set()
        for k in ks:
            ms = set(tc.trees[k].members)
            if ms & seen:
                rep.fail(f"forest {f}: trees overlap")
            seen |= ms
    best = cover_matrix(tc)
    iu = np.triu_indices(tc.n, 1)
    uncovered = int(np.isinf(best[iu]).sum())
    if uncovered:
        pairs = np.argwhere(np.isinf(best))
        u, v = next((int(a), int(b)) for a, b in pairs if a < b)
        rep.fail(f"{uncovered} uncovered pairs, e.g. ({u}, {v})")
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = best[iu] / dG[iu]
    finite = ratio[np.isfinite(ratio)]
    stretch = float(finite.max()) if finite.size else 1.0
    over = np.argwhere(best > (1 + tc.eps) * dG)
    if len(over):
        n_over = int(sum(1 for a, b in over if a < b and np.isfinite(best[a, b])))
        if n_over:
            rep.fail(f"{n_over} pairs exceed stretch 1+eps = {1 + tc.eps}")
    rep.stats.update({
        "trees": len(tc.trees),
        "forests": len(tc.forests),
        "max_stretch": stretch,
        "uncovered_pairs": uncovered,
        "dominance_violations": dominance,
        "trees_per_scale": {str(k): v for k, v in tc.scales().items()},
    })
    return rep
