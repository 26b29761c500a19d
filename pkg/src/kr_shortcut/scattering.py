"""Approximate scattering partitions and Steiner point removal.

A scattering partition at scale ``delta`` comes from a shortcut partition of
the graph with every edge longer than ``delta`` removed.  ``spr_solve`` grows
branch sets around the terminals one distance scale at a time and contracts
them into a minor on the terminals.
"""
from __future__ import annotations

import json
import math
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .cop import InvariantViolation, build_decomposition
from .graph import (
    INF,
    GraphError,
    PathWitness,
    WeightedGraph,
    _base_and_allowed,
    all_pairs,
    connected_components,
    diameter,
    dijkstra,
)
from .partition import build_partition
from .report import Report

SCHEMA_VERSION = 1


@dataclass
class ScatteringPartition:
    graph: WeightedGraph
    vertices: Tuple[int, ...]
    delta: float
    r: int
    clusters: List[Tuple[int, ...]]
    owner: Dict[int, int]
    stats: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        # residual graph: the host with every edge longer than delta removed
        self._residual, self._labels = self.graph.induced(self.vertices, max_weight=self.delta)
        self._index = {v: i for i, v in enumerate(self._labels)}

    def residual_neighbors(self, u: int):
        lab = self._labels
        return [(lab[j], w) for j, w in self._residual._nbrs[self._index[u]]]

    def _search(self, sources, within=None, limit=INF):
        idx = self._index
        allowed = None if within is None else {idx[x] for x in within}
        dist, _, parent, _ = dijkstra(self._residual, [idx[s] for s in sources], allowed, limit)
        lab = self._labels
        return ({lab[k]: d for k, d in dist.items()},
                {lab[k]: (lab[p] if p != -1 else -1) for k, p in parent.items()})


def scattering_from_shortcut(g, delta: float, r: int = 5) -> ScatteringPartition:
    """Clusters of strong diameter at most ``delta`` for a graph or view."""
    if not delta > 0:
        raise GraphError("delta must be positive")
    base, allowed = _base_and_allowed(g)
    verts = tuple(range(base.n)) if allowed is None else tuple(sorted(allowed))
    residual, labels = base.induced(verts, max_weight=delta)
    clusters: List[Tuple[int, ...]] = []
    for comp in connected_components(residual):
        sub, lab2 = residual.induced(comp)
        if sub.n == 1 or diameter(sub) <= delta:
            clusters.append(tuple(labels[lab2[i]] for i in range(sub.n)))
            continue
        part = build_partition(build_decomposition(sub, r, delta / 4))
        for c in part.clusters:
            clusters.append(tuple(sorted(labels[lab2[i]] for i in c)))
    owner = {v: i for i, c in enumerate(clusters) for v in c}
    return ScatteringPartition(base, verts, float(delta), int(r), clusters, owner)


@dataclass
class ScatteredPath:
    path: PathWitness
    clusters: int
    beta: float


def scattered_path(sp: ScatteringPartition, u: int, v: int) -> ScatteredPath:
    """Short path from u to v through few clusters, stitched cluster by cluster."""
    for x in (u, v):
        if x not in sp._index:
            raise GraphError(f"vertex {x} is not in the partitioned graph")
    if u == v:
        return ScatteredPath(PathWitness((u,), 0.0), 1, 0.0)
    base_dist, *_ = dijkstra(sp.graph, [u], set(sp.vertices))
    if base_dist.get(v, INF) > sp.delta:
        raise GraphError(f"dist({u}, {v}) = {base_dist.get(v, INF)} exceeds delta = {sp.delta}")
    dist, parent = sp._search([u])
    sp_verts = [v]
    while parent[sp_verts[-1]] != -1:
        sp_verts.append(parent[sp_verts[-1]])
    allowed = {sp.owner[x] for x in sp_verts}
    # min-hop cluster sequence through clusters meeting the shortest path
    s, t = sp.owner[u], sp.owner[v]
    prev = {s: -1}
    q = deque([s])
    cadj = _cluster_adjacency(sp, allowed)
    while q:
        a = q.popleft()
        if a == t:
            break
        for b in cadj.get(a, ()):
            if b not in prev:
                prev[b] = a
                q.append(b)
    seq = [t]
    while prev[seq[-1]] != -1:
        seq.append(prev[seq[-1]])
    seq.reverse()
    verts: List[int] = []
    x = u
    for k, cid in enumerate(seq):
        if k + 1 < len(seq):
            a, b = min((p, q_) for p in sp.clusters[cid] for q_, _ in sp.residual_neighbors(p)
                       if sp.owner.get(q_) == seq[k + 1])
        else:
            a, b = v, None
        _, par = sp._search([x], within=sp.clusters[cid])
        piece = [a]
        while par[piece[-1]] != -1:
            piece.append(par[piece[-1]])
        verts.extend(reversed(piece))
        x = b
    witness = PathWitness.from_vertices(sp.graph, verts)
    return ScatteredPath(witness, len(seq), witness.length / sp.delta)


def _cluster_adjacency(sp: ScatteringPartition, allowed) -> Dict[int, List[int]]:
    adj: Dict[int, set] = {}
    for cid in sorted(allowed):
        for p in sp.clusters[cid]:
            for q_, _ in sp.residual_neighbors(p):
                o = sp.owner[q_]
                if o != cid and o in allowed:
                    adj.setdefault(cid, set()).add(o)
    return {k: sorted(v) for k, v in adj.items()}


def verify_scattering(sp: ScatteringPartition) -> Report:
    """Partition and weak-diameter checks in the host graph."""
    rep = Report("scattering")
    seen = sorted(v for c in sp.clusters for v in c)
    if seen != sorted(sp.vertices):
        rep.fail("clusters do not partition the vertex set")
    d = all_pairs(sp.graph.view(sp.vertices)) if sp.vertices else None
    pos = {v: i for i, v in enumerate(sp.vertices)}
    worst = 0.0
    for i, c in enumerate(sp.clusters):
        idx = [pos[v] for v in c]
        w = float(d[idx][:, idx].max()) if len(c) > 1 else 0.0
        worst = max(worst, w)
        if w > sp.delta:
            rep.fail(f"cluster {i} has weak diameter {w} > {sp.delta}")
    rep.stats["max_weak_diameter"] = worst
    rep.stats["clusters"] = len(sp.clusters)
    return rep


def measure_scattering(sp: ScatteringPartition, pairs: int = 200, seed: int = 0) -> Report:
    """Empirical tau and beta over sampled pairs at distance at most delta.

    Every returned path is checked against the three scattering clauses:
    length at most ``2 * tau_hat * delta``, edges no longer than delta, and
    the reported cluster count.
    """
    rep = Report("scattered_paths")
    rng = random.Random(seed)
    verts = sp.vertices
    tau = beta = 0.0
    done = 0
    allowed = set(verts)
    tries = 0
    while done < pairs and tries < 4 * pairs and len(verts) > 1:
        tries += 1
        u = verts[rng.randrange(len(verts))]
        dist, *_ = dijkstra(sp.graph, [u], allowed, sp.delta)
        near = sorted(x for x in dist if x != u)
        if not near:
            continue
        v = near[rng.randrange(len(near))]
        res = scattered_path(sp, u, v)
        done += 1
        pv = res.path.vertices
        touched = {sp.owner[x] for x in pv}
        if len(touched) != res.clusters:
            rep.fail(f"pair ({u}, {v}): path touches {len(touched)} clusters, reported {res.clusters}")
        if any(sp.graph.weight(a, b) > sp.delta for a, b in zip(pv, pv[1:])):
            rep.fail(f"pair ({u}, {v}): path uses an edge longer than delta")
        if res.path.length > 2 * res.clusters * sp.delta:
            rep.fail(f"pair ({u}, {v}): length {res.path.length} > 2 * {res.clusters} * delta")
        tau = max(tau, res.clusters)
        beta = max(beta, res.beta)
    rep.stats.update({"pairs": done, "tau_hat": tau, "beta_hat": beta})
    sp.stats.update(rep.stats)
    return rep


# -- Steiner point removal -----------------------------------------------------

@dataclass
class TerminalMinor:
    graph: WeightedGraph
    terminals: Tuple[int, ...]
    f: List[int]
    edges: Dict[Tuple[int, int], float]
    zeta: float
    unit: float
    iteration_of: List[int]
    trace: List[dict]

    def minor_graph(self) -> WeightedGraph:
        """M on the original id range; Steiner vertices are isolated."""
        return WeightedGraph(self.graph.n, [(a, b, w) for (a, b), w in sorted(self.edges.items())])

    def branch_sets(self) -> Dict[int, List[int]]:
        out: Dict[int, List[int]] = {t: [] for t in self.terminals}
        for v, t in enumerate(self.f):
            out[t].append(v)
        return out

    def tau_hat(self) -> Optional[float]:
        vals = [t["tau_hat"] for t in self.trace if "tau_hat" in t]
        return max(vals) if vals else None

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "terminal_minor",
            "terminals": list(self.terminals),
            "zeta": self.zeta,
            "unit": self.unit,
            "f": list(self.f),
            "edges": [[a, b, w] for (a, b), w in sorted(self.edges.items())],
            "iterations": self.trace,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1) + "\n"

    @classmethod
    def from_dict(cls, data: dict, graph: WeightedGraph) -> "TerminalMinor":
        if data.get("kind") != "terminal_minor":
            raise GraphError("not a terminal minor document")
        f = list(data["f"])
        if len(f) != graph.n:
            raise GraphError("minor does not match the graph size")
        trace = list(data["iterations"])
        it_of = [0 if f[v] == v else -1 for v in range(graph.n)]
        for entry in trace:
            for v in entry.get("vertices", ()):
                it_of[v] = entry["iteration"]
        return cls(graph, tuple(data["terminals"]), f,
                   {(a, b): float(w) for a, b, w in data["edges"]},
                   float(data["zeta"]), float(data["unit"]), it_of, trace)

    def to_dot(self) -> str:
        from .graph import to_dot

        return to_dot(self.graph, dict(enumerate(self.f)), name="spr")


def spr_solve(g: WeightedGraph, terminals: Iterable[int], zeta: float = 16.0, r: int = 5,
              measure: int = 0, seed: int = 0) -> TerminalMinor:
    """Terminal minor of ``g``.

    Distance scales are multiples of the smallest edge weight, which is the
    smallest pairwise distance, so no reweighting is needed.  ``measure``
    samples that many pairs per iteration to record tau_hat and beta_hat.
    """
    K = sorted(set(int(t) for t in terminals))
    if not K:
        raise GraphError("terminal set is empty")
    if any(not 0 <= t < g.n for t in K):
        raise GraphError("terminal out of range")
    if not zeta > 4:
        raise GraphError("zeta must exceed 4")
    if len(connected_components(g)) != 1:
        raise GraphError("input graph is disconnected")
    unit = g.min_weight() if g.m else 1.0
    dK, *_ = dijkstra(g, K)
    f = [-1] * g.n
    it_of = [-1] * g.n
    for t in K:
        f[t] = t
        it_of[t] = 0
    assigned = set(K)
    trace: List[dict] = []
    i = 0
    nbrs = g._nbrs
    while len(assigned) < g.n:
        i += 1
        lo = zeta ** (i - 1) * unit
        hi = zeta ** i * unit
        U = [v for v in range(g.n) if v not in assigned]
        sp = scattering_from_shortcut(g.view(U), lo, r)
        R = [v for v in U if lo <= dK[v] < hi]
        Ci = sorted({sp.owner[v] for v in R})
        entry = {"iteration": i, "delta": lo, "unassigned": len(U), "relevant": len(R),
                 "clusters": len(sp.clusters), "assigned_clusters": len(Ci)}
        if measure:
            entry.update(measure_scattering(sp, measure, seed + i).stats)
        # level the clusters by BFS from the already assigned vertices
        pending = set(Ci)
        frontier = assigned
        link: Dict[int, int] = {}
        levels: List[List[int]] = []
        while pending:
            layer = []
            for cid in sorted(pending):
                best = None
                for u in sp.clusters[cid]:
                    for x, w in nbrs[u]:
                        if w <= hi and x in frontier and (best is None or (u, x) < best):
                            best = (u, x)
                if best is not None:
                    layer.append(cid)
                    link[cid] = best[1]
            if not layer:
                raise InvariantViolation(
                    f"iteration {i}: clusters {sorted(pending)[:5]} have no linking vertex")
            levels.append(layer)
            pending.difference_update(layer)
            frontier = {u for cid in layer for u in sp.clusters[cid]}
        for layer in levels:
            for cid in layer:
                t = f[link[cid]]
                for u in sp.clusters[cid]:
                    f[u] = t
                    it_of[u] = i
                    assigned.add(u)
        entry["levels"] = len(levels)
        entry["vertices"] = sorted(u for layer in levels for cid in layer for u in sp.clusters[cid])
        trace.append(entry)
        if dK and all(dK[v] < lo for v in U):
            # every vertex below this scale must be assigned by now
            raise InvariantViolation(f"iteration {i}: vertices left below their scale")
    pairs = set()
    for u, v, _ in g.edges():
        if f[u] != f[v]:
            pairs.add((min(f[u], f[v]), max(f[u], f[v])))
    edges: Dict[Tuple[int, int], float] = {}
    by_src: Dict[int, List[int]] = {}
    for a, b in pairs:
        by_src.setdefault(a, []).append(b)
    for a, bs in sorted(by_src.items()):
        dist, *_ = dijkstra(g, [a])
        for b in bs:
            edges[(a, b)] = dist[b]
    return TerminalMinor(g, tuple(K), f, edges, float(zeta), float(unit), it_of, trace)


def minor_distances(tm: TerminalMinor):
    """Terminal-by-terminal distance matrix of M (rows follow ``tm.terminals``)."""
    d = all_pairs(tm.minor_graph())
    idx = list(tm.terminals)
    return d[idx][:, idx]


def verify_minor(tm: TerminalMinor, g: Optional[WeightedGraph] = None) -> Report:
    rep = Report("minor")
    g = tm.graph if g is None else g
    K = list(tm.terminals)
    Kset = set(K)
    for t in K:
        if tm.f[t] != t:
            rep.fail(f"terminal {t} maps to {tm.f[t]}")
    for v, t in enumerate(tm.f):
        if t not in Kset:
            rep.fail(f"vertex {v} maps to non-terminal {t}")
    if not rep.ok:
        return rep
    for t, vs in tm.branch_sets().items():
        if len(connected_components(g, vs)) != 1:
            rep.fail(f"branch set of {t} is disconnected")
    expect = set()
    for u, v, _ in g.edges():
        a, b = tm.f[u], tm.f[v]
        if a != b:
            expect.add((min(a, b), max(a, b)))
    if expect != set(tm.edges):
        rep.fail(f"minor edges differ from branch-set adjacency "
                 f"({len(expect - set(tm.edges))} missing, {len(set(tm.edges) - expect)} extra)")
    dG = all_pairs(g)
    for (a, b), w in tm.edges.items():
        if w != float(dG[a, b]):
            rep.fail(f"minor edge ({a}, {b}) has weight {w}, distance is {float(dG[a, b])}")
    dM = minor_distances(tm)
    worst, best = 1.0, INF
    for i in range(len(K)):
        for j in range(i + 1, len(K)):
            m, d = float(dM[i, j]), float(dG[K[i], K[j]])
            if math.isinf(m):
                rep.fail(f"terminals {K[i]}, {K[j]} are disconnected in M")
                continue
            if m < d:
                rep.fail(f"terminals {K[i]}, {K[j]}: minor distance {m} < graph distance {d}")
            ratio = m / d
            worst = max(worst, ratio)
            best = min(best, ratio)
    # per-vertex audit against the distance-to-branch bound
    tau = tm.tau_hat()
    tau_used = tau if tau is not None else 1.0
    dK = dG[:, K].min(axis=1)
    audit_worst = 0.0
    for v in range(g.n):
        if v in Kset:
            continue
        lhs = float(dG[v, tm.f[v]])
        rhs = 3 * tau_used * tm.zeta ** 2 * dK[v]
        audit_worst = max(audit_worst, lhs / float(dK[v]))
        if lhs > rhs:
            rep.warn(f"vertex {v}: dist to its terminal {lhs} > 3*tau*zeta^2*dist(v,K) = {rhs}")
    # every vertex is assigned in the iteration of its scale or the one before
    for v in range(g.n):
        if v in Kset:
            continue
        scale = 1
        while dK[v] >= tm.zeta ** scale * tm.unit:
            scale += 1
        if tm.iteration_of[v] not in (scale - 1, scale):
            rep.fail(f"vertex {v} at scale {scale} was assigned in iteration {tm.iteration_of[v]}")
    rep.stats.update({
        "terminals": len(K),
        "minor_edges": len(tm.edges),
        "distortion": worst,
        "min_ratio": best if best != INF else 1.0,
        "iterations": len(tm.trace),
        "tau_hat": tau,
        "max_branch_stretch": audit_worst,
    })
    return rep
