"""Approximate distance oracle: a tree cover plus an LCA structure per tree."""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .graph import GraphError
from .treecover import StarTree, TreeCover, cover_matrix


class RootedTree:
    """Weighted rooted tree with O(1) LCA by Euler tour and a sparse table.

    ``parent`` maps every non-root node to ``(parent, edge_weight)``.
    """

    def __init__(self, root: int, parent: Dict[int, Tuple[int, float]]):
        self.root = root
        nodes = sorted({root, *parent})
        self.pos = {v: i for i, v in enumerate(nodes)}
        self.nodes = nodes
        kids: Dict[int, List[int]] = {v: [] for v in nodes}
        for c, (p, _) in parent.items():
            if p not in kids:
                raise GraphError(f"parent {p} of {c} is not a tree node")
            kids[p].append(c)
        depth = {root: 0.0}
        level = {root: 0}
        euler: List[int] = []
        first: Dict[int, int] = {}
        stack = [(root, iter(sorted(kids[root])))]
        first[root] = 0
        euler.append(root)
        while stack:
            v, it = stack[-1]
            c = next(it, None)
            if c is None:
                stack.pop()
                if stack:
                    euler.append(stack[-1][0])
                continue
            depth[c] = depth[v] + parent[c][1]
            level[c] = level[v] + 1
            first[c] = len(euler)
            euler.append(c)
            stack.append((c, iter(sorted(kids[c]))))
        if len(first) != len(nodes):
            raise GraphError("parent links do not form a tree")
        self.depth = depth
        self.first = first
        self.euler = euler
        lv = np.array([level[v] for v in euler])
        idx = np.arange(len(euler))
        table = [idx]
        k = 1
        while 2 * k <= len(euler):
            prev = table[-1]
            a, b = prev[:-k], prev[k:]
            table.append(np.where(lv[a] <= lv[b], a, b))
            k *= 2
        # plain lists: scalar indexing into numpy arrays is slow
        self._lv = lv.tolist()
        self._table = [t.tolist() for t in table]

    def __contains__(self, v) -> bool:
        return v in self.pos

    @property
    def is_star(self) -> bool:
        return max(self._lv) <= 1

    def __len__(self) -> int:
        return len(self.nodes)

    def lca(self, u: int, v: int) -> int:
        i, j = self.first[u], self.first[v]
        if i > j:
            i, j = j, i
        k = (j - i + 1).bit_length() - 1
        a = self._table[k][i]
        b = self._table[k][j - (1 << k) + 1]
        return self.euler[a if self._lv[a] <= self._lv[b] else b]

    def distance(self, u: int, v: int) -> float:
        return self.depth[u] + self.depth[v] - 2 * self.depth[self.lca(u, v)]

    def words(self) -> int:
        return len(self.nodes) * 2 + len(self.euler) + sum(len(t) for t in self._table)

    @classmethod
    def from_star(cls, t: StarTree) -> "RootedTree":
        parent = {u: (t.root, w) for u, w in zip(t.members, t.weights) if u != t.root}
        return cls(t.root, parent)


@dataclass
class Oracle:
    cover: TreeCover
    trees: List[RootedTree]
    # per forest: tree index holding each vertex, -1 if none
    forest_index: np.ndarray
    # per forest: weighted depth of each vertex in its tree
    forest_depth: np.ndarray
    star: np.ndarray

    @property
    def n(self) -> int:
        return self.cover.n

    def stats(self) -> dict:
        return {
            "trees": len(self.trees),
            "forests": int(self.forest_index.shape[0]),
            "words": int(sum(t.words() for t in self.trees) + 2 * self.forest_index.size),
        }

    def query(self, u: int, v: int) -> float:
        return self._query(u, v)[0]

    def _query(self, u: int, v: int) -> Tuple[float, int]:
        for x in (u, v):
            if not isinstance(x, (int, np.integer)) or not 0 <= x < self.n:
                raise GraphError(f"unknown vertex {x!r}")
        if u == v:
            return 0.0, 0
        # one probe per forest: the tree holding u, if it also holds v
        ku = self.forest_index[:, u]
        mask = (ku >= 0) & (self.forest_index[:, v] == ku)
        # in a star the LCA of two distinct members is the root, at depth 0
        flat = mask & self.star[np.maximum(ku, 0)]
        best = float("inf")
        if flat.any():
            best = float((self.forest_depth[flat, u] + self.forest_depth[flat, v]).min())
        for k in ku[mask & ~flat].tolist():
            best = min(best, self.trees[k].distance(u, v))
        return best, int(self.forest_index.shape[0])


def build_oracle(tc: TreeCover, check_coverage: bool = True) -> Oracle:
    trees = [RootedTree.from_star(t) for t in tc.trees]
    index = np.full((max(1, len(tc.forests)), tc.n), -1, dtype=np.int64)
    depth = np.zeros(index.shape)
    for f, ks in enumerate(tc.forests):
        for k in ks:
            t = trees[k]
            for v in tc.trees[k].members:
                if index[f, v] != -1:
                    raise GraphError(f"forest {f} holds vertex {v} twice")
                index[f, v] = k
                depth[f, v] = t.depth[v]
    if check_coverage and tc.n > 1:
        best = cover_matrix(tc)
        bad = np.argwhere(np.isinf(best))
        if len(bad):
            u, v = (int(x) for x in bad[0])
            raise GraphError(f"pair ({u}, {v}) is not covered by any tree")
    return Oracle(tc, trees, index, depth, np.array([t.is_star for t in trees] or [False]))


def save_oracle(o: Oracle) -> str:
    return o.cover.to_json()


def load_oracle(text: str) -> Oracle:
    return build_oracle(TreeCover.from_json(text))


def bench(o: Oracle, pairs: Iterable[Tuple[int, int]], repeat: int = 1) -> dict:
    pairs = list(pairs)
    if not pairs:
        return {"queries": 0, "answers": []}
    answers: List[float] = []
    probes = 0
    t0 = time.perf_counter()
    for _ in range(repeat):
        answers = []
        probes = 0
        for u, v in pairs:
            d, p = o._query(u, v)
            answers.append(d)
            probes += p
    elapsed = time.perf_counter() - t0
    return {
        "queries": len(pairs),
        "answers": answers,
        "forests_probed_per_query": probes / len(pairs),
        "trees": len(o.trees),
        "seconds_per_query": elapsed / (repeat * len(pairs)),
        **{f"space_{k}": v for k, v in o.stats().items()},
    }
