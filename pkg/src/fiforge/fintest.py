"""Fractional isomorphism of finite graphs.

Two independent routes are provided: colour refinement to the coarsest
equitable partition (compared through its parameters), and homomorphism
counts from trees, which characterise the same equivalence and serve as a
cross-check oracle on small graphs.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import UsageError
from .kernelcore import FiniteGraph, PartitionedGraph


@dataclass(frozen=True)
class FICertificate:
    """Parameters ((p_i), (D_ij)) of an equitable partition.

    ``ordering`` is ``"canonical"`` for certificates produced by
    :func:`coarsest_equitable_graph` and ``"layout"`` for the pipeline's
    Z_0..Z_M indexing.
    """

    part_sizes: tuple[int, ...]
    degree_matrix: tuple[tuple[int, ...], ...]
    ordering: str = "layout"

    def __post_init__(self):
        p = tuple(int(x) for x in self.part_sizes)
        D = tuple(tuple(int(x) for x in row) for row in self.degree_matrix)
        K = len(p)
        if len(D) != K or any(len(r) != K for r in D):
            raise UsageError("degree_matrix must be square with one row per part")
        for i in range(K):
            if p[i] < 0:
                raise UsageError("part sizes must be nonnegative")
            for j in range(K):
                cap = p[j] - 1 if i == j else p[j]
                if D[i][j] < 0 or (p[i] > 0 and D[i][j] > max(cap, 0)):
                    raise UsageError(f"D[{i}][{j}] = {D[i][j]} out of range")
                if D[i][j] * p[i] != D[j][i] * p[j]:
                    raise UsageError(f"double counting fails for parts ({i}, {j})")
        object.__setattr__(self, "part_sizes", p)
        object.__setattr__(self, "degree_matrix", D)

    @property
    def n(self) -> int:
        return sum(self.part_sizes)

    @property
    def num_parts(self) -> int:
        return len(self.part_sizes)

    def class_key(self, k: int) -> tuple:
        """Order-independent invariant of class ``k``."""
        p, D = self.part_sizes, self.degree_matrix
        return (p[k], tuple(sorted((D[k][l], p[l]) for l in range(len(p)))))


def color_refinement(G: FiniteGraph, initial: Sequence[int] | None = None) -> np.ndarray:
    """Stable colouring reached by refining with neighbour colour counts."""
    n = G.n
    colors = np.zeros(n, dtype=np.int64) if initial is None else np.unique(np.asarray(initial), return_inverse=True)[1]
    if n == 0:
        return colors
    adj = G.adjacency
    while True:
        K = int(colors.max()) + 1
        counts = np.empty((n, K + 1), dtype=np.int64)
        counts[:, 0] = colors
        for k in range(K):
            counts[:, k + 1] = adj[:, colors == k].sum(axis=1)
        _, new = np.unique(counts, axis=0, return_inverse=True)
        new = new.reshape(-1)
        if new.max() == colors.max():
            return colors
        colors = new


def certificate_of_partition(G: FiniteGraph, labels: Sequence[int], num_parts: int | None = None) -> FICertificate:
    """Parameters of an equitable partition; raises if it is not equitable."""
    PG = PartitionedGraph(G, labels, num_parts)
    deg = PG.degree_matrix
    K = PG.num_parts
    D = [[0] * K for _ in range(K)]
    for i, part in enumerate(PG.parts):
        if len(part) == 0:
            continue
        rows = deg[part]
        if not (rows == rows[0]).all():
            raise UsageError(f"partition is not equitable at part {i}")
        D[i] = rows[0].tolist()
    return FICertificate(PG.part_sizes, tuple(map(tuple, D)), "layout")


def coarsest_equitable_graph(G: FiniteGraph) -> tuple[np.ndarray, FICertificate]:
    """Coarsest equitable partition (labels) and its canonically ordered certificate."""
    colors = color_refinement(G)
    K = int(colors.max()) + 1 if G.n else 0
    raw = certificate_of_partition(G, colors, K)
    order = sorted(range(K), key=raw.class_key)
    new_index = np.empty(K, dtype=np.int64)
    new_index[order] = np.arange(K)
    labels = new_index[colors] if G.n else colors
    cert = FICertificate(
        tuple(raw.part_sizes[o] for o in order),
        tuple(tuple(raw.degree_matrix[a][b] for b in order) for a in order),
        "canonical",
    )
    return labels, cert


def match_certificates(c1: FICertificate, c2: FICertificate) -> tuple[int, ...] | None:
    """Class bijection carrying ``c1``'s parameters onto ``c2``'s, or None."""
    K = c1.num_parts
    if c2.num_parts != K or c1.n != c2.n:
        return None
    keys1 = [c1.class_key(k) for k in range(K)]
    keys2 = [c2.class_key(k) for k in range(K)]
    if sorted(keys1) != sorted(keys2):
        return None
    D1, D2 = c1.degree_matrix, c2.degree_matrix
    assign: list[int] = []
    used = [False] * K

    def search(c: int) -> bool:
        if c == K:
            return True
        for d in range(K):
            if used[d] or keys2[d] != keys1[c]:
                continue
            if all(D1[c][q] == D2[d][assign[q]] and D1[q][c] == D2[assign[q]][d] for q in range(c)):
                if D1[c][c] != D2[d][d]:
                    continue
                used[d] = True
                assign.append(d)
                if search(c + 1):
                    return True
                assign.pop()
                used[d] = False
        return False

    return tuple(assign) if search(0) else None


def fractionally_isomorphic(G: FiniteGraph, H: FiniteGraph) -> bool:
    if G.n != H.n:
        return False
    _, c1 = coarsest_equitable_graph(G)
    _, c2 = coarsest_equitable_graph(H)
    return match_certificates(c1, c2) is not None


def _is_tree(T: FiniteGraph) -> bool:
    if T.n == 0 or T.num_edges != T.n - 1:
        return False
    seen = {0}
    queue = deque([0])
    while queue:
        v = queue.popleft()
        for u in T.neighbors(v):
            if u not in seen:
                seen.add(u)
                queue.append(u)
    return len(seen) == T.n


def tree_hom_count(T: FiniteGraph, G: FiniteGraph) -> int:
    """Number of homomorphisms from the tree ``T`` into ``G`` (exact integer)."""
    if not _is_tree(T):
        raise UsageError("T must be a nonempty tree")
    nbrs = [G.neighbors(x) for x in range(G.n)]
    parent = {0: -1}
    order = [0]
    for v in order:
        for u in T.neighbors(v):
            if u not in parent:
                parent[u] = v
                order.append(u)
    msg: dict[int, list[int]] = {}
    for v in reversed(order):
        f = [1] * G.n
        for u in T.neighbors(v):
            if u == parent[v]:
                continue
            child = msg.pop(u)
            for x in range(G.n):
                if f[x]:
                    f[x] *= sum(child[y] for y in nbrs[x])
        msg[v] = f
    return sum(msg[0])


def _center(adj: list[list[int]]) -> list[int]:
    n = len(adj)
    if n <= 2:
        return list(range(n))
    deg = [len(a) for a in adj]
    layer = [v for v in range(n) if deg[v] == 1]
    remaining = n
    while remaining > 2:
        remaining -= len(layer)
        nxt = []
        for v in layer:
            for u in adj[v]:
                deg[u] -= 1
                if deg[u] == 1:
                    nxt.append(u)
        layer = nxt
    return layer


def _rooted_code(adj: list[list[int]], root: int) -> str:
    def code(v: int, p: int) -> str:
        return "(" + "".join(sorted(code(u, v) for u in adj[v] if u != p)) + ")"

    return code(root, -1)


def tree_canonical_form(edges: Sequence[tuple[int, int]], n: int) -> str:
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    return min(_rooted_code(adj, c) for c in _center(adj))


@lru_cache(maxsize=None)
def _trees_of_size(n: int) -> tuple[tuple[tuple[int, int], ...], ...]:
    if n == 1:
        return ((),)
    out: dict[str, tuple[tuple[int, int], ...]] = {}
    for edges in _trees_of_size(n - 1):
        for v in range(n - 1):
            grown = edges + ((v, n - 1),)
            out.setdefault(tree_canonical_form(grown, n), grown)
    return tuple(out[k] for k in sorted(out))


def enumerate_trees(n: int) -> list[FiniteGraph]:
    """All pairwise non-isomorphic trees on ``n`` vertices."""
    if n < 1:
        raise UsageError("tree size must be positive")
    return [FiniteGraph.from_edges(n, e) for e in _trees_of_size(n)]


def fi_oracle_trees(G: FiniteGraph, H: FiniteGraph, max_tree_size: int) -> bool:
    """Compare hom(T, .) for every tree T with at most ``max_tree_size`` vertices."""
    if max_tree_size < 1:
        raise UsageError("max_tree_size must be at least 1")
    if G.n != H.n:
        return False
    for size in range(1, max_tree_size + 1):
        for T in enumerate_trees(size):
            if tree_hom_count(T, G) != tree_hom_count(T, H):
                return False
    return True
