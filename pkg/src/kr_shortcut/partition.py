"""Shortcut partition built on top of a buffered cop decomposition.

Every supernode is cut into clusters around a greedy ``delta``-net of its
skeleton.  Each vertex joins the cluster of its Dijkstra parent, searched from
the net inside the supernode, so clusters stay connected and have strong
diameter at most ``4 * delta``.
"""
from __future__ import annotations

import json
import math
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .cop import CopDecomposition, InvariantViolation, build_decomposition
from .graph import (
    INF,
    GraphError,
    PathWitness,
    SubgraphView,
    WeightedGraph,
    all_pairs,
    connected_components,
    diameter,
    dijkstra,
)
from .report import Report

SCHEMA_VERSION = 1


@dataclass
class Clustering:
    dec: CopDecomposition
    clusters: List[Tuple[int, ...]]
    centers: List[int]
    owner: List[int]
    supernode_of: List[int]

    @property
    def graph(self) -> WeightedGraph:
        return self.dec.graph

    @property
    def delta(self) -> float:
        return self.dec.delta

    def __len__(self) -> int:
        return len(self.clusters)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "clustering",
            "delta": self.delta,
            "r": self.dec.r,
            "clusters": [
                {"id": i, "center": c, "supernode": s, "vertices": list(vs)}
                for i, (vs, c, s) in enumerate(zip(self.clusters, self.centers, self.supernode_of))
            ],
            "decomposition": self.dec.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict, graph: WeightedGraph) -> "Clustering":
        if data.get("kind") != "clustering":
            raise GraphError("not a clustering document")
        dec = CopDecomposition.from_dict(data["decomposition"], graph)
        cl = sorted(data["clusters"], key=lambda c: c["id"])
        owner = [-1] * graph.n
        for c in cl:
            for v in c["vertices"]:
                owner[v] = c["id"]
        return cls(dec, [tuple(c["vertices"]) for c in cl], [c["center"] for c in cl],
                   owner, [c["supernode"] for c in cl])

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1) + "\n"

    def to_dot(self) -> str:
        from .graph import to_dot

        return to_dot(self.graph, dict(enumerate(self.owner)), name="clusters")


@dataclass
class ClusterGraph:
    n: int
    adj: List[List[int]]

    @property
    def edges(self) -> List[Tuple[int, int]]:
        return [(a, b) for a in range(self.n) for b in self.adj[a] if a < b]


def greedy_net(dec: CopDecomposition, eta: int) -> List[int]:
    """Greedy delta-net of a skeleton, scanned in BFS order (children by id)."""
    s = dec.supernodes[eta]
    g = dec.graph
    kids: Dict[int, List[int]] = {}
    for c, p in s.skeleton_parent.items():
        kids.setdefault(p, []).append(c)
    order = []
    q = deque([s.skeleton_root])
    while q:
        u = q.popleft()
        order.append(u)
        q.extend(sorted(kids.get(u, ())))
    skel = set(order)
    net: List[int] = []
    for u in order:
        if net:
            # tree distance to the net, searched along skeleton edges
            dist, *_ = dijkstra(g, net, skel)
            if dist[u] <= dec.delta:
                continue
        net.append(u)
    return net


def build_partition(dec: CopDecomposition) -> Clustering:
    g = dec.graph
    clusters: List[List[int]] = []
    centers: List[int] = []
    sn_of: List[int] = []
    owner = [-1] * g.n
    for s in dec.supernodes:
        net = greedy_net(dec, s.id)
        skel = set(s.skeleton_vertices)
        tdist, *_ = dijkstra(g, net, skel)
        for i, a in enumerate(net[:-1]):
            d, *_ = dijkstra(g, [a], skel)
            if any(d[b] <= dec.delta for b in net[i + 1:]):
                raise InvariantViolation(f"net of supernode {s.id} has points within delta")
        if any(tdist.get(u, INF) > dec.delta for u in skel):
            raise InvariantViolation(f"net of supernode {s.id} does not cover its skeleton")
        base = len(clusters)
        idx = {c: base + i for i, c in enumerate(net)}
        for c in net:
            clusters.append([])
            centers.append(c)
            sn_of.append(s.id)
        _, _, parent, order = dijkstra(g, net, set(s.vertices))
        if len(order) != len(s.vertices):
            raise InvariantViolation(f"supernode {s.id} is not connected to its net")
        for v in order:
            cid = idx[v] if parent[v] == -1 else owner[parent[v]]
            owner[v] = cid
            clusters[cid].append(v)
    return Clustering(dec, [tuple(sorted(c)) for c in clusters], centers, owner, sn_of)


def build_partition_eps(g: WeightedGraph, eps: float, r: int, debug: bool = False) -> Clustering:
    """Clusters of strong diameter at most ``eps * diam(g)``."""
    if not 0 < eps < 1:
        raise GraphError("eps must lie in (0, 1)")
    delta = eps * diameter(g) / 4
    return build_partition(build_decomposition(g, r, delta, debug=debug))


def cluster_graph(c: Clustering) -> ClusterGraph:
    adj = [set() for _ in c.clusters]
    o = c.owner
    for u, v, _ in c.graph.edges():
        if o[u] != o[v]:
            adj[o[u]].add(o[v])
            adj[o[v]].add(o[u])
    return ClusterGraph(len(c.clusters), [sorted(a) for a in adj])


def path_cost(c: Clustering, p: Union[PathWitness, Sequence[int]],
              cg: Optional[ClusterGraph] = None) -> Optional[int]:
    """Min hops in the cluster graph between the end clusters of ``p``,
    using only clusters that ``p`` meets.  ``None`` means disconnected."""
    verts = p.vertices if isinstance(p, PathWitness) else tuple(p)
    if not verts:
        raise GraphError("empty path")
    g = c.graph
    for a, b in zip(verts, verts[1:]):
        if not g.has_edge(a, b):
            raise GraphError(f"({a}, {b}) is not an edge")
    if cg is None:
        cg = cluster_graph(c)
    allowed = {c.owner[v] for v in verts}
    s, t = c.owner[verts[0]], c.owner[verts[-1]]
    hops = {s: 0}
    q = deque([s])
    while q:
        a = q.popleft()
        if a == t:
            return hops[a]
        for b in cg.adj[a]:
            if b in allowed and b not in hops:
                hops[b] = hops[a] + 1
                q.append(b)
    return None


# -- verification -------------------------------------------------------------

def verify_clusters(c: Clustering) -> Report:
    rep = Report("clusters")
    g = c.graph
    seen = [0] * g.n
    for i, vs in enumerate(c.clusters):
        for v in vs:
            seen[v] += 1
            if c.owner[v] != i:
                rep.fail(f"owner of {v} is {c.owner[v]}, but it lies in cluster {i}")
        if c.centers[i] not in vs:
            rep.fail(f"cluster {i} does not contain its center")
        if len({c.dec.assignment[v] for v in vs}) != 1:
            rep.fail(f"cluster {i} spans several supernodes")
    for v, k in enumerate(seen):
        if k != 1:
            rep.fail(f"vertex {v} lies in {k} clusters")
    worst = 0.0
    for i, vs in enumerate(c.clusters):
        if len(connected_components(g, vs)) != 1:
            rep.fail(f"cluster {i} is disconnected")
            continue
        d = float(all_pairs(SubgraphView(g, vs)).max()) if len(vs) > 1 else 0.0
        worst = max(worst, d)
        if d > 4 * c.delta:
            rep.fail(f"cluster {i} has strong diameter {d} > 4*delta = {4 * c.delta}")
    rep.stats["clusters"] = len(c.clusters)
    rep.stats["max_strong_diameter"] = worst
    return rep


def sample_pairs(g: WeightedGraph, count: int, near: float, seed: int = 0
                 ) -> List[Tuple[int, int]]:
    """Half uniform pairs, half pairs closer than ``near`` (when they exist).

    Pairs are grouped by source so that one search serves many pairs.
    """
    rng = random.Random(seed)
    n = g.n
    if n < 2:
        return []
    per = 50
    n_src = max(1, math.ceil(count / per))
    out: List[Tuple[int, int]] = []
    for _ in range(n_src):
        s = rng.randrange(n)
        dist, *_ = dijkstra(g, [s], limit=near)
        close = sorted(v for v, d in dist.items() if v != s and d < near)
        for k in range(per):
            if len(out) >= count:
                break
            if k % 2 and close:
                out.append((s, rng.choice(close)))
            else:
                t = rng.randrange(n - 1)
                out.append((s, t + (t >= s)))
    return out


def _split_short(g: WeightedGraph, verts: Sequence[int], bound: float) -> List[Tuple[int, int, float]]:
    """Greedy split into pieces ``(i, j, length)`` sharing endpoints, each
    shorter than ``bound`` unless it is a single long edge."""
    pieces = []
    i = 0
    while i < len(verts) - 1:
        j, length = i, 0.0
        while j < len(verts) - 1 and length + g.weight(verts[j], verts[j + 1]) < bound:
            length += g.weight(verts[j], verts[j + 1])
            j += 1
        if j == i:
            length = g.weight(verts[i], verts[i + 1])
            j = i + 1
        pieces.append((i, j, length))
        i = j
    return pieces


def verify_shortcut(c: Clustering, delta: Optional[float] = None, r: Optional[int] = None,
                    sample: Union[str, int, Iterable[Tuple[int, int]]] = 2000,
                    seed: int = 0, ceiling: Optional[float] = None,
                    rows: Optional[list] = None) -> Report:
    """Measure cost(P) on shortest paths between sampled pairs.

    ``sample`` is ``"all"``, a pair count, or explicit pairs.  ``rows``, if
    given, collects ``(u, v, distance, cost)`` tuples.
    """
    rep = Report("shortcut")
    g = c.graph
    delta = c.delta if delta is None else delta
    r = c.dec.r if r is None else r
    ceiling = 54 * r if ceiling is None else ceiling
    short = delta / r
    if sample == "all":
        pairs = [(u, v) for u in range(g.n) for v in range(u + 1, g.n)]
    elif isinstance(sample, int):
        pairs = sample_pairs(g, sample, short, seed)
    else:
        pairs = list(sample)
    cg = cluster_graph(c)
    diam = diameter(g) if g.n > 1 else 0.0
    eps = 4 * delta / diam if diam > 0 else 1.0
    dec = c.dec
    by_src: Dict[int, List[int]] = {}
    for u, v in pairs:
        by_src.setdefault(u, []).append(v)
    h_short = 0
    h_def = 0.0
    max_inter = 0
    n_short = 0
    depth = [s.depth for s in dec.supernodes]
    for u in sorted(by_src):
        dist, _, parent, _ = dijkstra(g, [u])
        for v in by_src[u]:
            verts = [v]
            while parent[verts[-1]] != -1:
                verts.append(parent[verts[-1]])
            verts.reverse()
            d = dist[v]
            cost = path_cost(c, verts, cg)
            if rows is not None:
                rows.append((u, v, d, cost))
            if cost is None:
                rep.fail(f"pair ({u}, {v}): cluster graph path does not exist")
                continue
            if d < short:
                n_short += 1
                h_short = max(h_short, cost)
                if cost > ceiling:
                    rep.fail(f"pair ({u}, {v}) at distance {d} < {short}: cost {cost} > {ceiling}")
            if d < delta:
                # clusters met inside each supernode whose domain holds the path
                touched = {dec.assignment[x] for x in verts}
                top = min(touched, key=lambda e: depth[e])
                chain = [top] + dec.ancestors(top)
                met: Dict[int, set] = {}
                for x in verts:
                    met.setdefault(c.supernode_of[c.owner[x]], set()).add(c.owner[x])
                for eta in chain:
                    k = len(met.get(eta, ()))
                    max_inter = max(max_inter, k)
                    if k > 9 * r:
                        rep.fail(f"pair ({u}, {v}): path meets {k} > 9r clusters of supernode {eta}")
            if d > 0:
                h_def = max(h_def, cost / (eps * math.ceil(d / (eps * diam))))
                bound = 0
                for i, j, length in _split_short(g, verts, short):
                    bound += ceiling if length < short else 1
                if cost > bound:
                    rep.fail(f"pair ({u}, {v}): cost {cost} exceeds piecewise bound {bound}")
    rep.stats.update({
        "pairs": len(pairs),
        "short_pairs": n_short,
        "max_short_cost": h_short,
        "ceiling": ceiling,
        "max_clusters_met": max_inter,
        "h_def": h_def,
        "eps": eps,
    })
    return rep


def endpoint_cost(c: Clustering) -> Optional[int]:
    """Cost of the shortest path between vertices 0 and n-1."""
    g = c.graph
    _, _, parent, _ = dijkstra(g, [0])
    verts = [g.n - 1]
    while parent[verts[-1]] != -1:
        verts.append(parent[verts[-1]])
    return path_cost(c, verts[::-1])
