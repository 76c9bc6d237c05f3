"""Graphic and bigraphic degree sequences: tests and greedy realizers.

The tests are the Erdos-Gallai and Gale-Ryser inequalities evaluated with
prefix sums after sorting.  The realizers are Havel-Hakimi style greedy
constructions, O(n^2 log n) in the worst case; ties between equal residual
degrees always go to the lowest original index so results are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import FeasibilityError
from .kernelcore import FiniteGraph

DegreeSequence = Sequence[int]


def _as_int_array(d: DegreeSequence) -> np.ndarray:
    return np.asarray(list(d), dtype=np.int64).reshape(-1)


def _tail_min_sums(desc: np.ndarray) -> np.ndarray:
    """``out[k-1] = sum_{i>k} min(desc_i, k)`` for k = 1..n (desc nonincreasing)."""
    n = len(desc)
    ks = np.arange(1, n + 1)
    # number of entries >= k
    p = np.searchsorted(-desc, -ks, side="right")
    suffix = np.concatenate([np.cumsum(desc[::-1])[::-1], [0]])
    start = np.maximum(ks, p)
    return ks * np.maximum(p - ks, 0) + suffix[start]


def graphic_violation(d: DegreeSequence) -> tuple[str, int | None] | None:
    """First violated Erdos-Gallai condition as ``(name, k)``, or None."""
    arr = _as_int_array(d)
    if arr.size == 0:
        return None
    if arr.min() < 0:
        return ("range", None)
    if arr.sum() % 2:
        return ("EG1", None)
    desc = np.sort(arr)[::-1]
    n = len(desc)
    ks = np.arange(1, n + 1)
    lhs = np.cumsum(desc)
    rhs = ks * (ks - 1) + _tail_min_sums(desc)
    bad = np.nonzero(lhs > rhs)[0]
    if bad.size:
        return ("EG2", int(bad[0]) + 1)
    return None


def is_graphic(d: DegreeSequence) -> bool:
    return graphic_violation(d) is None


def bigraphic_violation(a: DegreeSequence, b: DegreeSequence) -> tuple[str, int | None] | None:
    """First violated Gale-Ryser condition as ``(name, k)``, or None."""
    aa, bb = _as_int_array(a), _as_int_array(b)
    if (aa.size and aa.min() < 0) or (bb.size and bb.min() < 0):
        return ("range", None)
    if aa.sum() != bb.sum():
        return ("GR1", None)
    if aa.size and aa.max() > bb.size:
        return ("range", None)
    if bb.size and bb.max() > aa.size:
        return ("range", None)
    if aa.size == 0:
        return None
    desc = np.sort(aa)[::-1]
    bdesc = np.sort(bb)[::-1]
    ks = np.arange(1, len(desc) + 1)
    lhs = np.cumsum(desc)
    # sum_j min(b_j, k): entries >= k count k each, the rest count themselves
    p = np.searchsorted(-bdesc, -ks, side="right")
    suffix = np.concatenate([np.cumsum(bdesc[::-1])[::-1], [0]])
    rhs = ks * p + suffix[p]
    bad = np.nonzero(lhs > rhs)[0]
    if bad.size:
        return ("GR2", int(bad[0]) + 1)
    return None


def is_bigraphic(a: DegreeSequence, b: DegreeSequence) -> bool:
    return bigraphic_violation(a, b) is None


def _order_desc(res: np.ndarray) -> np.ndarray:
    # stable sort on -res keeps the lowest index first among equal residuals
    return np.argsort(-res, kind="stable")


def realize_graphic(d: DegreeSequence) -> FiniteGraph:
    """Simple graph whose vertex ``v`` has degree ``d[v]``.

    Raises FeasibilityError naming the violated Erdos-Gallai condition.
    """
    viol = graphic_violation(d)
    if viol is not None:
        cond, k = viol
        where = f" at k={k}" if k is not None else ""
        raise FeasibilityError(f"sequence is not graphic: {cond} fails{where}", cond, k)
    res = _as_int_array(d).copy()
    n = len(res)
    adj = np.zeros((n, n), dtype=bool)
    for _ in range(n):
        order = _order_desc(res)
        v = order[0]
        r = res[v]
        if r == 0:
            break
        nbrs = order[1 : r + 1]
        if len(nbrs) < r or res[nbrs].min() <= 0:
            raise FeasibilityError("Havel-Hakimi step failed", "EG2")
        adj[v, nbrs] = adj[nbrs, v] = True
        res[nbrs] -= 1
        res[v] = 0
    return FiniteGraph._trusted(adj)


@dataclass(frozen=True, eq=False)
class BipartiteRealization:
    """Bipartite graph between side A (rows) and side B (columns)."""

    biadjacency: np.ndarray

    @property
    def a_size(self) -> int:
        return self.biadjacency.shape[0]

    @property
    def b_size(self) -> int:
        return self.biadjacency.shape[1]

    def a_degrees(self) -> np.ndarray:
        return self.biadjacency.sum(axis=1).astype(np.int64)

    def b_degrees(self) -> np.ndarray:
        return self.biadjacency.sum(axis=0).astype(np.int64)

    def edges(self) -> list[tuple[int, int]]:
        us, vs = np.nonzero(self.biadjacency)
        return list(zip(us.tolist(), vs.tolist()))

    def as_graph(self) -> FiniteGraph:
        """Vertices ``0..|A|-1`` are side A, ``|A|..|A|+|B|-1`` side B."""
        na, nb = self.biadjacency.shape
        adj = np.zeros((na + nb, na + nb), dtype=bool)
        adj[:na, na:] = self.biadjacency
        adj[na:, :na] = self.biadjacency.T
        return FiniteGraph._trusted(adj)


def realize_bigraphic(a: DegreeSequence, b: DegreeSequence) -> BipartiteRealization:
    """Bipartite graph with side degrees exactly ``a`` and ``b``.

    Largest remaining a-degree first, each joined to the currently largest
    b-residuals.  Raises FeasibilityError naming the violated Gale-Ryser
    condition.
    """
    viol = bigraphic_violation(a, b)
    if viol is not None:
        cond, k = viol
        where = f" at k={k}" if k is not None else ""
        raise FeasibilityError(f"pair is not bigraphic: {cond} fails{where}", cond, k)
    aa = _as_int_array(a)
    res = _as_int_array(b).copy()
    bi = np.zeros((len(aa), len(res)), dtype=bool)
    for h in _order_desc(aa):
        need = aa[h]
        if need == 0:
            break
        targets = _order_desc(res)[:need]
        if res[targets].min() <= 0:
            raise FeasibilityError("Gale-Ryser greedy step failed", "GR2")
        bi[h, targets] = True
        res[targets] -= 1
    return BipartiteRealization(bi)
