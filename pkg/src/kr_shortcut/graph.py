"""Weighted undirected graphs, shortest paths, generators and edge-list I/O.

Vertices are dense integer ids ``0..n-1``.  Every tie in this package is
broken by the smallest vertex id, so all routines are deterministic.
"""
from __future__ import annotations

import heapq
import math
import random
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

INF = math.inf


class GraphError(ValueError):
    """Raised for invalid graphs or invalid arguments to graph routines."""


class ParseError(GraphError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class WeightedGraph:
    """Immutable undirected graph with strictly positive edge weights."""

    __slots__ = ("n", "_adj", "_nbrs", "_m")

    def __init__(self, n: int, edges: Iterable[Tuple[int, int, float]] = ()):
        if n < 0:
            raise GraphError("vertex count must be non-negative")
        self.n = int(n)
        adj: List[Dict[int, float]] = [dict() for _ in range(self.n)]
        m = 0
        for u, v, w in edges:
            u, v, w = int(u), int(v), float(w)
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise GraphError(f"self-loop at {u}")
            if not w > 0 or math.isinf(w):
                raise GraphError(f"edge ({u}, {v}) has non-positive weight {w}")
            if v in adj[u]:
                raise GraphError(f"duplicate edge ({min(u, v)}, {max(u, v)})")
            adj[u][v] = w
            adj[v][u] = w
            m += 1
        self._adj = adj
        self._nbrs = [tuple(sorted(a.items())) for a in adj]
        self._m = m

    # -- basic queries ---------------------------------------------------
    @property
    def m(self) -> int:
        return self._m

    def vertices(self) -> range:
        return range(self.n)

    def __contains__(self, v) -> bool:
        return isinstance(v, (int, np.integer)) and 0 <= v < self.n

    def neighbors(self, u: int) -> Tuple[Tuple[int, float], ...]:
        """(neighbor, weight) pairs sorted by neighbor id."""
        return self._nbrs[u]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adj[u]

    def weight(self, u: int, v: int) -> float:
        return self._adj[u][v]

    def edges(self) -> List[Tuple[int, int, float]]:
        return [(u, v, w) for u in range(self.n) for v, w in self._nbrs[u] if u < v]

    def min_weight(self) -> float:
        return min((w for _, _, w in self.edges()), default=INF)

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return self.n == other.n and self.edges() == other.edges()

    def __hash__(self):
        return hash((self.n, tuple(self.edges())))

    def __repr__(self) -> str:
        return f"WeightedGraph(n={self.n}, m={self.m})"

    # -- derived graphs --------------------------------------------------
    def view(self, vertices: Iterable[int]) -> "SubgraphView":
        return SubgraphView(self, vertices)

    def induced(self, vertices: Iterable[int], max_weight: Optional[float] = None
                ) -> Tuple["WeightedGraph", List[int]]:
        """Relabelled induced subgraph, optionally dropping heavy edges.

        Returns the new graph and ``labels`` with ``labels[new_id] = old_id``.
        Relabelling preserves id order, so smallest-id tie-breaking carries
        over unchanged.
        """
        labels = sorted(set(int(v) for v in vertices))
        index = {v: i for i, v in enumerate(labels)}
        edges = []
        for i, u in enumerate(labels):
            for v, w in self._nbrs[u]:
                j = index.get(v)
                if j is not None and i < j and (max_weight is None or w <= max_weight):
                    edges.append((i, j, w))
        return WeightedGraph(len(labels), edges), labels

    def to_csgraph(self):
        """Symmetric scipy CSR matrix of edge weights."""
        from scipy.sparse import csr_matrix

        rows, cols, data = [], [], []
        for u, v, w in self.edges():
            rows += [u, v]
            cols += [v, u]
            data += [w, w]
        return csr_matrix((data, (rows, cols)), shape=(self.n, self.n))


class SubgraphView:
    """Induced subgraph of a parent graph; shares the parent's vertex ids."""

    __slots__ = ("parent", "vertices")

    def __init__(self, parent: WeightedGraph, vertices: Iterable[int]):
        if isinstance(parent, SubgraphView):
            vs = frozenset(vertices) & parent.vertices
            parent = parent.parent
        else:
            vs = frozenset(vertices)
        for v in vs:
            if v not in parent:
                raise GraphError(f"vertex {v} not in parent graph")
        self.parent = parent
        self.vertices = vs

    @property
    def n(self) -> int:
        return len(self.vertices)

    def __contains__(self, v) -> bool:
        return v in self.vertices

    def neighbors(self, u: int):
        vs = self.vertices
        return tuple((v, w) for v, w in self.parent.neighbors(u) if v in vs)

    def edges(self) -> List[Tuple[int, int, float]]:
        vs = self.vertices
        return [(u, v, w) for u, v, w in self.parent.edges() if u in vs and v in vs]

    def __repr__(self) -> str:
        return f"SubgraphView(|V|={len(self.vertices)})"


AnyGraph = "WeightedGraph | SubgraphView"


def _base_and_allowed(g):
    if isinstance(g, SubgraphView):
        return g.parent, g.vertices
    if isinstance(g, WeightedGraph):
        return g, None
    raise TypeError(f"expected WeightedGraph or SubgraphView, got {type(g).__name__}")


def _vertex_list(g) -> List[int]:
    base, allowed = _base_and_allowed(g)
    return list(range(base.n)) if allowed is None else sorted(allowed)


@dataclass(frozen=True)
class PathWitness:
    vertices: Tuple[int, ...]
    length: float

    @classmethod
    def from_vertices(cls, g, vertices: Sequence[int]) -> "PathWitness":
        base, _ = _base_and_allowed(g)
        length = 0.0
        for a, b in zip(vertices, vertices[1:]):
            if not base.has_edge(a, b):
                raise GraphError(f"({a}, {b}) is not an edge")
            length += base.weight(a, b)
        return cls(tuple(vertices), length)

    def __len__(self) -> int:
        return len(self.vertices)


# -- shortest paths ------------------------------------------------------

def dijkstra(base: WeightedGraph, sources: Iterable[int], allowed=None,
             limit: float = INF):
    """Multi-source Dijkstra with lexicographic (distance, source, parent) labels.

    ``allowed`` restricts the search to a vertex set (anything supporting
    ``in``); ``limit`` prunes vertices farther than it.  Returns dicts
    ``dist``, ``nearest`` and ``parent`` over the reached vertices, plus the
    vertices in the order they were settled.
    """
    dist: Dict[int, float] = {}
    nearest: Dict[int, int] = {}
    parent: Dict[int, int] = {}
    best: Dict[int, Tuple[float, int, int]] = {}
    heap: List[Tuple[float, int, int, int]] = []
    for s in sorted(set(sources)):
        best[s] = (0.0, s, -1)
        heap.append((0.0, s, -1, s))
    heapq.heapify(heap)
    order: List[int] = []
    nbrs = base._nbrs
    while heap:
        d, src, par, u = heapq.heappop(heap)
        if u in dist:
            continue
        dist[u] = d
        nearest[u] = src
        parent[u] = par
        order.append(u)
        for v, w in nbrs[u]:
            if v in dist or (allowed is not None and v not in allowed):
                continue
            nd = d + w
            if nd > limit:
                continue
            label = (nd, src, u)
            cur = best.get(v)
            if cur is None or label < cur:
                best[v] = label
                heapq.heappush(heap, (nd, src, u, v))
    return dist, nearest, parent, order


@dataclass
class ShortestPaths:
    """Result of :func:`sssp` / :func:`multi_source_sssp`.

    ``dist`` covers every vertex of the searched graph (unreachable ones are
    ``inf``); ``parent`` and ``nearest`` cover reached vertices only, with
    ``parent[s] == -1`` at sources.
    """

    dist: Dict[int, float]
    parent: Dict[int, int]
    nearest: Dict[int, int]

    def __getitem__(self, v: int):
        return self.dist[v], self.parent.get(v)

    def path_to(self, v: int) -> List[int]:
        """Vertices from the (nearest) source to ``v``."""
        if self.dist.get(v, INF) == INF:
            raise GraphError(f"vertex {v} is unreachable")
        path = [v]
        while self.parent[path[-1]] != -1:
            path.append(self.parent[path[-1]])
        path.reverse()
        return path


def multi_source_sssp(g, sources: Iterable[int]) -> ShortestPaths:
    base, allowed = _base_and_allowed(g)
    sources = sorted(set(sources))
    if not sources:
        raise GraphError("source set is empty")
    for s in sources:
        if s not in base or (allowed is not None and s not in allowed):
            raise GraphError(f"source {s} not in graph")
    dist, nearest, parent, _ = dijkstra(base, sources, allowed)
    full = {v: dist.get(v, INF) for v in _vertex_list(g)}
    return ShortestPaths(full, parent, nearest)


def sssp(g, source: int) -> ShortestPaths:
    return multi_source_sssp(g, [source])


def shortest_path(g, u: int, v: int) -> PathWitness:
    sp = sssp(g, u)
    return PathWitness.from_vertices(g, sp.path_to(v))


def connected_components(g, vertices: Optional[Iterable[int]] = None) -> List[List[int]]:
    """Components as sorted vertex lists, ordered by smallest vertex."""
    base, allowed = _base_and_allowed(g)
    if vertices is not None:
        allowed = set(vertices) if allowed is None else set(vertices) & allowed
    pool = sorted(allowed) if allowed is not None else range(base.n)
    seen = set()
    comps = []
    nbrs = base._nbrs
    for s in pool:
        if s in seen:
            continue
        seen.add(s)
        comp = [s]
        stack = [s]
        while stack:
            u = stack.pop()
            for v, _ in nbrs[u]:
                if v not in seen and (allowed is None or v in allowed):
                    seen.add(v)
                    comp.append(v)
                    stack.append(v)
        comp.sort()
        comps.append(comp)
    return comps


def is_connected(g) -> bool:
    return len(connected_components(g)) <= 1


def all_pairs(g) -> np.ndarray:
    """Dense all-pairs distance matrix (scipy Dijkstra from every source).

    For a view, rows/columns follow the sorted vertex list of the view.
    """
    from scipy.sparse.csgraph import dijkstra as cs_dijkstra

    base, allowed = _base_and_allowed(g)
    if allowed is not None:
        base, _ = base.induced(allowed)
    if base.n == 0:
        return np.zeros((0, 0))
    return cs_dijkstra(base.to_csgraph(), directed=False)


def diameter(g) -> float:
    base, allowed = _base_and_allowed(g)
    size = base.n if allowed is None else len(allowed)
    if size == 0:
        raise GraphError("diameter of an empty graph")
    d = all_pairs(g)
    top = float(d.max())
    if math.isinf(top):
        raise GraphError("infinite diameter: graph is disconnected")
    return top


# -- generators -----------------------------------------------------------

def path(n: int, weight: float = 1.0) -> WeightedGraph:
    _need_positive(n)
    return WeightedGraph(n, [(i, i + 1, weight) for i in range(n - 1)])


def star(n: int, weight: float = 1.0) -> WeightedGraph:
    """Center 0 joined to leaves 1..n-1."""
    _need_positive(n)
    return WeightedGraph(n, [(0, i, weight) for i in range(1, n)])


def grid(a: int, b: int, weight="unit", seed: int = 0) -> WeightedGraph:
    """a x b grid, vertex (i, j) has id i*b + j.

    ``weight`` is ``"unit"``, ``"random"`` (integers 1..9 from ``seed``), or a
    callable ``(u, v) -> w``.
    """
    _need_positive(a)
    _need_positive(b)
    rule = _weight_rule(weight, seed)
    edges = []
    for i in range(a):
        for j in range(b):
            u = i * b + j
            if j + 1 < b:
                edges.append((u, u + 1, rule(u, u + 1)))
            if i + 1 < a:
                edges.append((u, u + b, rule(u, u + b)))
    return WeightedGraph(a * b, edges)


def tree(n: int, seed: int = 0, weight="random") -> WeightedGraph:
    """Random recursive tree: vertex i attaches to a uniform earlier vertex."""
    _need_positive(n)
    rng = random.Random(seed)
    rule = _weight_rule(weight, seed + 1)
    edges = []
    for i in range(1, n):
        p = rng.randrange(i)
        edges.append((p, i, rule(p, i)))
    return WeightedGraph(n, edges)


def random_planar_like(n: int, seed: int = 0, weight="random",
                       keep: float = 0.8) -> WeightedGraph:
    """Connected planar graph: Delaunay triangulation of random points.

    A spanning tree of the triangulation is always kept; each remaining edge
    survives with probability ``keep``.  Subgraphs of planar graphs are
    planar, so the result excludes K_5 as a minor.
    """
    _need_positive(n)
    rng = np.random.default_rng(seed)
    rule = _weight_rule(weight, seed + 1)
    if n <= 3:
        return WeightedGraph(n, [(i, j, rule(i, j)) for i in range(n) for j in range(i + 1, n)])
    from scipy.spatial import Delaunay

    pts = rng.random((n, 2))
    tri = Delaunay(pts)
    cand = set()
    for simplex in tri.simplices:
        s = sorted(int(x) for x in simplex)
        cand.update({(s[0], s[1]), (s[0], s[2]), (s[1], s[2])})
    cand = sorted(cand)
    order = rng.permutation(len(cand))
    uf = list(range(n))

    def find(x):
        while uf[x] != x:
            uf[x] = uf[uf[x]]
            x = uf[x]
        return x

    chosen = set()
    for k in order:
        u, v = cand[k]
        ru, rv = find(u), find(v)
        if ru != rv:
            uf[ru] = rv
            chosen.add((u, v))
    coins = rng.random(len(cand))
    for k, e in enumerate(cand):
        if e not in chosen and coins[k] < keep:
            chosen.add(e)
    return WeightedGraph(n, [(u, v, rule(u, v)) for u, v in sorted(chosen)])


def random_outerplanar(n: int, seed: int = 0, weight="random",
                       chords: float = 0.6) -> WeightedGraph:
    """Cycle 0..n-1 plus a random subset of one triangulation's chords.

    Outerplanar graphs exclude K_4 as a minor.
    """
    _need_positive(n)
    rng = random.Random(seed)
    rule = _weight_rule(weight, seed + 1)
    edges = {(i, i + 1) for i in range(n - 1)}
    if n >= 3:
        edges.add((0, n - 1))
    stack = [list(range(n))]
    while stack:
        poly = stack.pop()
        if len(poly) < 4:
            continue
        i = rng.randrange(len(poly))
        j = (i + rng.randrange(2, len(poly) - 1)) % len(poly)
        i, j = min(i, j), max(i, j)
        a, b = poly[i], poly[j]
        if rng.random() < chords:
            edges.add((min(a, b), max(a, b)))
        stack.append(poly[i:j + 1])
        stack.append(poly[j:] + poly[:i + 1])
    return WeightedGraph(n, [(u, v, rule(u, v)) for u, v in sorted(edges)])


def _need_positive(n):
    if n < 1:
        raise GraphError("generators need n >= 1")


def _weight_rule(weight, seed):
    if callable(weight):
        return weight
    if weight == "unit":
        return lambda u, v: 1.0
    if weight == "random":
        rng = random.Random(seed)
        return lambda u, v: float(rng.randint(1, 9))
    raise GraphError(f"unknown weight rule {weight!r}")


# -- I/O --------------------------------------------------------------------

def load_edge_list(text: str) -> WeightedGraph:
    """Parse ``"n m"`` followed by ``m`` lines ``"u v w"`` with ``u < v``."""
    lines = [(i + 1, ln.strip()) for i, ln in enumerate(text.splitlines())]
    lines = [(i, ln) for i, ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ParseError(1, "empty input")
    lineno, header = lines[0]
    parts = header.split()
    if len(parts) != 2:
        raise ParseError(lineno, "header must be 'n m'")
    try:
        n, m = int(parts[0]), int(parts[1])
    except ValueError:
        raise ParseError(lineno, "header must hold two integers") from None
    if n < 0 or m < 0:
        raise ParseError(lineno, "negative count in header")
    body = lines[1:]
    edges = []
    seen = set()
    for lineno, ln in body:
        parts = ln.split()
        if len(parts) != 3:
            raise ParseError(lineno, "edge line must be 'u v w'")
        try:
            u, v, w = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError:
            raise ParseError(lineno, f"malformed edge line {ln!r}") from None
        if not (0 <= u < v < n):
            raise ParseError(lineno, f"need 0 <= u < v < n, got {u} {v}")
        if not w > 0 or math.isinf(w):
            raise ParseError(lineno, f"weight must be positive, got {parts[2]}")
        if (u, v) in seen:
            raise ParseError(lineno, f"duplicate edge {u} {v}")
        seen.add((u, v))
        edges.append((u, v, w))
    if len(body) != m:
        raise ParseError(body[-1][0] if body else lineno,
                         f"expected {m} edge lines, found {len(body)}")
    return WeightedGraph(n, edges)


def format_weight(w: float) -> str:
    return repr(float(w))


def save_edge_list(g: WeightedGraph) -> str:
    out = [f"{g.n} {g.m}"]
    out += [f"{u} {v} {format_weight(w)}" for u, v, w in g.edges()]
    return "\n".join(out) + "\n"


def to_dot(g: WeightedGraph, colors: Optional[Dict[int, int]] = None,
           name: str = "G") -> str:
    """Graphviz text; ``colors`` maps vertex -> group id for fill colors."""
    palette = ["#e41a1c", "#377eb8", "#4daf4a", "#984ea3", "#ff7f00",
               "#ffff33", "#a65628", "#f781bf", "#999999", "#66c2a5"]
    out = [f"graph {name} {{", "  node [style=filled];"]
    for v in g.vertices():
        if colors is not None and v in colors:
            c = palette[colors[v] % len(palette)]
            out.append(f'  {v} [fillcolor="{c}", group={colors[v]}];')
        else:
            out.append(f"  {v};")
    for u, v, w in g.edges():
        out.append(f'  {u} -- {v} [label="{format_weight(w)}"];')
    out.append("}")
    return "\n".join(out) + "\n"


def iter_pairs(n: int) -> Iterator[Tuple[int, int]]:
    for u in range(n):
        for v in range(u + 1, n):
            yield u, v
