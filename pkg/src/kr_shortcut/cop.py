"""Deterministic buffered cop decomposition of K_r-minor-free graphs.

``build_decomposition`` partitions the vertices into connected supernodes
arranged in a partition tree.  Each supernode is grown from a shortest-path
skeleton; when a region gets cut off from an older supernode X, every
unassigned vertex within ``delta / r`` of the cut is handed to an existing
supernode so that later supernodes keep a buffer of width ``delta / r`` from X.

The ``verify_*`` functions re-check every guaranteed property from scratch
and return a :class:`~kr_shortcut.report.Report`.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

from .graph import (
    INF,
    GraphError,
    SubgraphView,
    WeightedGraph,
    connected_components,
    dijkstra,
)
from .report import Report

SCHEMA_VERSION = 1


class InvariantViolation(AssertionError):
    """An internal invariant of the construction failed.

    This signals either a bug or an input that is not K_r-minor-free for the
    given ``r``; it is never a legitimate outcome.
    """


@dataclass
class Supernode:
    id: int
    vertices: Tuple[int, ...]
    skeleton_root: int
    # child -> parent links of the skeleton tree; the root is absent
    skeleton_parent: Dict[int, int]
    init_domain: FrozenSet[int]
    parent: Optional[int]
    depth: int

    @property
    def skeleton_vertices(self) -> List[int]:
        return sorted({self.skeleton_root, *self.skeleton_parent})

    @property
    def skeleton_edges(self) -> List[Tuple[int, int]]:
        return sorted((p, c) for c, p in self.skeleton_parent.items())

    def skeleton_leaves(self) -> List[int]:
        """Non-root skeleton vertices without children (0 for a single vertex)."""
        has_child = set(self.skeleton_parent.values())
        return sorted(v for v in self.skeleton_parent if v not in has_child)


@dataclass
class CopDecomposition:
    graph: WeightedGraph
    r: int
    delta: float
    supernodes: List[Supernode]
    assignment: List[int]
    stats: Dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        self.children: List[List[int]] = [[] for _ in self.supernodes]
        for s in self.supernodes:
            if s.parent is not None:
                self.children[s.parent].append(s.id)

    @property
    def buffer(self) -> float:
        return self.delta / self.r

    @property
    def root(self) -> int:
        return 0

    def ancestors(self, eta: int) -> List[int]:
        """Strict ancestors of ``eta`` ordered from the tree root down."""
        out = []
        p = self.supernodes[eta].parent
        while p is not None:
            out.append(p)
            p = self.supernodes[p].parent
        out.reverse()
        return out

    def subtree(self, eta: int) -> List[int]:
        out, stack = [], [eta]
        while stack:
            x = stack.pop()
            out.append(x)
            stack.extend(self.children[x])
        return sorted(out)

    def dom_vertices(self, eta: int) -> FrozenSet[int]:
        self._check_id(eta)
        return frozenset(v for x in self.subtree(eta) for v in self.supernodes[x].vertices)

    def _check_id(self, eta):
        if not isinstance(eta, int) or not 0 <= eta < len(self.supernodes):
            raise GraphError(f"unknown supernode id {eta!r}")

    # -- serialization ---------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "cop_decomposition",
            "r": self.r,
            "delta": self.delta,
            "n": self.graph.n,
            "supernodes": [
                {
                    "id": s.id,
                    "parent": s.parent,
                    "vertices": list(s.vertices),
                    "skeleton_root": s.skeleton_root,
                    "skeleton_edges": [list(e) for e in s.skeleton_edges],
                    "init_domain": sorted(s.init_domain),
                }
                for s in self.supernodes
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1) + "\n"

    @classmethod
    def from_dict(cls, data: dict, graph: WeightedGraph) -> "CopDecomposition":
        if data.get("kind") != "cop_decomposition":
            raise GraphError("not a cop decomposition document")
        if data.get("n") != graph.n:
            raise GraphError("decomposition does not match the graph size")
        sns = []
        depth: Dict[int, int] = {}
        for s in data["supernodes"]:
            par = s["parent"]
            depth[s["id"]] = 0 if par is None else depth[par] + 1
            sns.append(Supernode(
                id=s["id"],
                vertices=tuple(s["vertices"]),
                skeleton_root=s["skeleton_root"],
                skeleton_parent={c: p for p, c in s["skeleton_edges"]},
                init_domain=frozenset(s["init_domain"]),
                parent=par,
                depth=depth[s["id"]],
            ))
        assignment = [-1] * graph.n
        for s in sns:
            for v in s.vertices:
                assignment[v] = s.id
        return cls(graph, int(data["r"]), float(data["delta"]), sns, assignment)

    @classmethod
    def from_json(cls, text: str, graph: WeightedGraph) -> "CopDecomposition":
        return cls.from_dict(json.loads(text), graph)

    def to_dot(self) -> str:
        from .graph import to_dot

        return to_dot(self.graph, {v: s for v, s in enumerate(self.assignment)}, name="cop")


# -- construction -----------------------------------------------------------

class _Builder:
    def __init__(self, g: WeightedGraph, r: int, delta: float, debug: bool):
        self.g = g
        self.r = r
        self.delta = delta
        self.buffer = delta / r
        self.debug = debug
        self.assign: List[Optional[int]] = [None] * g.n
        self.members: List[List[int]] = []
        self.roots: List[int] = []
        self.skel: List[Dict[int, int]] = []
        self.init_domain: List[FrozenSet[int]] = []
        self.parent: List[Optional[int]] = []
        self.depth: List[int] = []
        self.stats = {"build_tree_calls": 0, "grow_buffer_calls": 0,
                      "max_seen": 0, "buffer_assignments": 0}

    # helpers
    def _seen(self, H: Set[int]) -> List[int]:
        nbrs = self.g._nbrs
        out = set()
        for u in H:
            for v, _ in nbrs[u]:
                if v not in H:
                    s = self.assign[v]
                    if s is not None:
                        out.add(s)
        return sorted(out)

    def _check_call_invariant(self, H: Set[int], where: str) -> None:
        nbrs = self.g._nbrs
        for u in H:
            if self.assign[u] is not None:
                raise InvariantViolation(
                    f"{where}: vertex {u} of H is already assigned to supernode {self.assign[u]}")
            for v, _ in nbrs[u]:
                if v not in H and self.assign[v] is None:
                    raise InvariantViolation(
                        f"{where}: vertex {v} adjacent to H is unassigned")

    def _put(self, v: int, eta: int) -> None:
        if self.debug and self.members[eta]:
            if not any(self.assign[x] == eta for x, _ in self.g._nbrs[v]):
                raise InvariantViolation(
                    f"assigning {v} to supernode {eta} breaks its connectivity")
        self.assign[v] = eta
        self.members[eta].append(v)

    def _unassigned_components(self, H: Sequence[int]) -> List[List[int]]:
        rest = [v for v in H if self.assign[v] is None]
        return connected_components(self.g, rest)

    def _strict_ancestors(self, eta: int) -> Set[int]:
        out = set()
        p = self.parent[eta]
        while p is not None:
            out.add(p)
            p = self.parent[p]
        return out

    # the two procedures
    def build_tree(self, H: List[int], parent: Optional[int]) -> List[Tuple[List[int], int]]:
        """Initialize one supernode in H, grow buffers, return child calls."""
        self.stats["build_tree_calls"] += 1
        Hs = set(H)
        self._check_call_invariant(Hs, "BuildTree")
        seen = self._seen(Hs)
        self.stats["max_seen"] = max(self.stats["max_seen"], len(seen))
        if len(seen) > self.r - 2:
            raise InvariantViolation(
                f"BuildTree: H sees {len(seen)} supernodes {seen} > r-2 = {self.r - 2}; "
                f"is the input K_{self.r}-minor-free?")
        v = min(H)
        witness: Dict[int, int] = {}
        for u in sorted(H):
            for x, _ in self.g._nbrs[u]:
                s = self.assign[x]
                if x not in Hs and s is not None and s not in witness:
                    witness[s] = u
        dist, _, par, _ = dijkstra(self.g, [v], Hs)
        skel_parent: Dict[int, int] = {}
        for s in seen:
            w = witness[s]
            while w != v and w not in skel_parent:
                skel_parent[w] = par[w]
                w = par[w]
        eta = len(self.members)
        self.members.append([])
        self.roots.append(v)
        self.skel.append(skel_parent)
        self.init_domain.append(frozenset(H))
        self.parent.append(parent)
        self.depth.append(0 if parent is None else self.depth[parent] + 1)
        for u in sorted({v, *skel_parent}):
            self.assign[u] = eta
            self.members[eta].append(u)
        if self.debug and len(connected_components(self.g, self.members[eta])) != 1:
            raise InvariantViolation(f"skeleton of supernode {eta} is disconnected")

        for comp in connected_components(self.g, [u for u in H if self.assign[u] is None]):
            cs = set(comp)
            seen_comp = set(self._seen(cs))
            cut = [s for s in seen if s not in seen_comp]
            self._grow_buffer_all(cut, comp)

        return [(comp, eta) for comp in self._unassigned_components(H)]

    def _grow_buffer_all(self, X: List[int], H: List[int]) -> None:
        stack = [(X, H)]
        while stack:
            X, H = stack.pop()
            children = self.grow_buffer(X, H)
            stack.extend(reversed(children))

    def grow_buffer(self, X: List[int], H: List[int]) -> List[Tuple[List[int], List[int]]]:
        self.stats["grow_buffer_calls"] += 1
        Hs = set(H)
        self._check_call_invariant(Hs, "GrowBuffer")
        if not X:
            return []
        x = X[0]
        rest = X[1:]
        seen_H = self._seen(Hs)
        if x in seen_H:
            raise InvariantViolation(f"GrowBuffer: H still sees cut-off supernode {x}")
        above = self._strict_ancestors(x)
        dom_init = self.init_domain[x]
        assign = self.assign

        class _DomS:
            # dom_S(X): initial domain minus vertices now owned by X's ancestors
            __slots__ = ()

            def __contains__(self, v):
                return v in dom_init and assign[v] not in above

        dom_s = _DomS()
        boundary = sorted({u for h in H for u, _ in self.g._nbrs[h]
                           if u not in Hs and u in dom_s})
        if boundary:
            dist, nearest, _, order = dijkstra(self.g, boundary, dom_s, limit=self.buffer)
            targets = [(v, assign[nearest[v]]) for v in order if v in Hs]
            for v, eta in targets:
                if eta is None or eta == x:
                    raise InvariantViolation(
                        f"GrowBuffer: boundary vertex {nearest[v]} has invalid owner {eta}")
                self._put(v, eta)
            self.stats["buffer_assignments"] += len(targets)
        children = []
        for comp in self._unassigned_components(H):
            seen_comp = set(self._seen(set(comp)))
            nxt = list(rest)
            for s in seen_H:
                if s not in seen_comp and s not in nxt:
                    nxt.append(s)
            children.append((nxt, comp))
        return children

    def run(self) -> None:
        stack: List[Tuple[List[int], Optional[int]]] = [(list(range(self.g.n)), None)]
        while stack:
            H, parent = stack.pop()
            stack.extend(reversed(self.build_tree(H, parent)))


def build_decomposition(g: WeightedGraph, r: int, delta: float,
                        debug: bool = False) -> CopDecomposition:
    """Buffered cop decomposition with radius ``delta``, buffer ``delta/r``, width ``r-1``.

    ``debug`` additionally checks supernode connectivity after every single
    vertex assignment.
    """
    if not isinstance(g, WeightedGraph):
        raise GraphError("build_decomposition needs a WeightedGraph")
    if r < 3:
        raise GraphError("r must be at least 3")
    if not delta > 0:
        raise GraphError("delta must be positive")
    if g.n == 0:
        raise GraphError("empty graph")
    if len(connected_components(g)) != 1:
        raise GraphError("input graph is disconnected")
    b = _Builder(g, int(r), float(delta), debug)
    b.run()
    if any(a is None for a in b.assign):
        raise InvariantViolation("assignment is not total")
    sns = [
        Supernode(
            id=i,
            vertices=tuple(sorted(b.members[i])),
            skeleton_root=b.roots[i],
            skeleton_parent=dict(sorted(b.skel[i].items())),
            init_domain=b.init_domain[i],
            parent=b.parent[i],
            depth=b.depth[i],
        )
        for i in range(len(b.members))
    ]
    dec = CopDecomposition(g, int(r), float(delta), sns, list(b.assign), dict(b.stats))
    for s in sns:
        if len(connected_components(g, s.vertices)) != 1:
            raise InvariantViolation(f"supernode {s.id} is disconnected")
    return dec


# -- derived structures -------------------------------------------------------

def dom(dec: CopDecomposition, eta: int) -> SubgraphView:
    return SubgraphView(dec.graph, dec.dom_vertices(eta))


def adjacent_supernodes(dec: CopDecomposition) -> Set[Tuple[int, int]]:
    """Unordered pairs (a, b), a < b, of supernodes joined by a G-edge."""
    out = set()
    a = dec.assignment
    for u, v, _ in dec.graph.edges():
        if a[u] != a[v]:
            out.add((min(a[u], a[v]), max(a[u], a[v])))
    return out


def expansion_bags(dec: CopDecomposition) -> List[List[int]]:
    """Bag of each supernode: itself, then adjacent strict ancestors by depth."""
    adj = adjacent_supernodes(dec)
    bags = []
    for s in dec.supernodes:
        bag = [s.id] + [x for x in dec.ancestors(s.id) if (min(x, s.id), max(x, s.id)) in adj]
        bags.append(bag)
    return bags


# -- verifiers ----------------------------------------------------------------

def verify_radius(dec: CopDecomposition) -> Report:
    rep = Report("radius")
    worst = 0.0
    for s in dec.supernodes:
        allowed = set(s.vertices)
        dist, *_ = dijkstra(dec.graph, s.skeleton_vertices, allowed)
        for v in s.vertices:
            d = dist.get(v, INF)
            worst = max(worst, d)
            if d > dec.delta:
                rep.fail(f"supernode {s.id}: vertex {v} at distance {d} > {dec.delta} from skeleton")
    rep.stats["max_radius"] = worst
    rep.stats["delta"] = dec.delta
    return rep


def verify_skeleton(dec: CopDecomposition) -> Report:
    rep = Report("skeleton")
    g = dec.graph
    max_leaves = 0
    for s in dec.supernodes:
        verts = set(s.vertices)
        skel = s.skeleton_vertices
        if not set(skel) <= verts:
            rep.fail(f"supernode {s.id}: skeleton leaves the supernode")
        # tree check: every non-root vertex reaches the root through parents
        tree_dist = {s.skeleton_root: 0.0}
        for v in skel:
            chain = []
            x = v
            while x not in tree_dist:
                chain.append(x)
                p = s.skeleton_parent.get(x)
                if p is None or len(chain) > len(skel) or not g.has_edge(x, p):
                    rep.fail(f"supernode {s.id}: skeleton is not a tree at vertex {x}")
                    break
                x = p
            else:
                for y in reversed(chain):
                    tree_dist[y] = tree_dist[s.skeleton_parent[y]] + g.weight(y, s.skeleton_parent[y])
        dom_set = dec.dom_vertices(s.id)
        dist, *_ = dijkstra(g, [s.skeleton_root], dom_set)
        for v, td in tree_dist.items():
            if td != dist.get(v, INF):
                rep.fail(f"supernode {s.id}: skeleton distance to {v} is {td}, "
                         f"dom distance is {dist.get(v, INF)}")
        leaves = len(s.skeleton_leaves())
        max_leaves = max(max_leaves, leaves)
        if leaves > dec.r - 2:
            rep.fail(f"supernode {s.id}: skeleton has {leaves} leaves > r-2 = {dec.r - 2}")
    rep.stats["max_leaves"] = max_leaves
    return rep


def verify_buffer(dec: CopDecomposition) -> Report:
    rep = Report("buffer")
    adj = adjacent_supernodes(dec)
    gamma = dec.buffer
    closest = INF
    for x in dec.supernodes:
        desc = [e for e in dec.subtree(x.id) if e != x.id
                and (min(e, x.id), max(e, x.id)) not in adj]
        if not desc:
            continue
        dom_set = dec.dom_vertices(x.id)
        dist, *_ = dijkstra(dec.graph, x.vertices, dom_set)
        for e in desc:
            for v in dec.dom_vertices(e):
                d = dist.get(v, INF)
                closest = min(closest, d)
                if d < gamma:
                    rep.fail(f"vertex {v} in dom({e}) is {d} from non-adjacent ancestor {x.id} "
                             f"(needs > {gamma})")
                elif d == gamma:
                    rep.warn(f"vertex {v} in dom({e}) is exactly {gamma} from ancestor {x.id}")
    rep.stats["min_cut_off_distance"] = closest
    rep.stats["buffer"] = gamma
    return rep


def verify_tree_decomposition(dec: CopDecomposition) -> Report:
    rep = Report("tree_decomposition")
    bags = expansion_bags(dec)
    a = dec.assignment
    n_sn = len(dec.supernodes)
    # partition tree is a rooted tree over supernode ids
    roots = [s.id for s in dec.supernodes if s.parent is None]
    if roots != [0]:
        rep.fail(f"partition tree roots {roots}, expected [0]")
    for s in dec.supernodes:
        if s.parent is not None and not 0 <= s.parent < s.id:
            rep.fail(f"supernode {s.id} has parent {s.parent} created after it")
    # totality
    counts = [0] * dec.graph.n
    for s in dec.supernodes:
        for v in s.vertices:
            counts[v] += 1
    for v, c in enumerate(counts):
        if c != 1:
            rep.fail(f"vertex {v} lies in {c} supernodes")
    # final dom_S equals dom
    for s in dec.supernodes:
        above = set(dec.ancestors(s.id))
        dom_s = {v for v in s.init_domain if a[v] not in above}
        if dom_s != set(dec.dom_vertices(s.id)):
            rep.fail(f"supernode {s.id}: final dom_S differs from dom")
    # bag width
    width = max(len(b) for b in bags)
    if width > dec.r - 1:
        for s, b in zip(dec.supernodes, bags):
            if len(b) > dec.r - 1:
                rep.fail(f"bag of supernode {s.id} holds {len(b)} > r-1 = {dec.r - 1} supernodes")
    # edge coverage and ancestry
    bagsets = [set(b) for b in bags]
    for u, v, _ in dec.graph.edges():
        x, y = a[u], a[v]
        if x == y:
            continue
        if x not in dec.ancestors(y) and y not in dec.ancestors(x):
            rep.fail(f"edge ({u}, {v}) joins supernodes {x}, {y} that are not in ancestry")
        if not any(x in bs and y in bs for bs in (bagsets[x], bagsets[y])):
            rep.fail(f"edge ({u}, {v}) is not covered by a common bag")
    # connectedness of the bags holding each supernode
    holders: List[List[int]] = [[] for _ in range(n_sn)]
    for i, bs in enumerate(bagsets):
        for x in bs:
            holders[x].append(i)
    for x, hs in enumerate(holders):
        hs_set = set(hs)
        tops = [h for h in hs if dec.supernodes[h].parent not in hs_set]
        if len(tops) != 1:
            rep.fail(f"bags containing supernode {x} form {len(tops)} subtrees")
    rep.stats["max_bag"] = width
    rep.stats["supernodes"] = n_sn
    return rep


def verify_all(dec: CopDecomposition) -> Report:
    rep = Report("decomposition")
    for f in (verify_radius, verify_skeleton, verify_buffer, verify_tree_decomposition):
        rep.merge(f(dec))
    return rep
