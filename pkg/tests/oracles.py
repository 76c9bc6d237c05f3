"""Brute-force reference implementations used by the tests."""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np


@lru_cache(maxsize=None)
def graphic_degree_sets(n: int) -> frozenset:
    """Sorted degree sequences of every labelled graph on n vertices."""
    pairs = list(itertools.combinations(range(n), 2))
    out = set()
    for mask in range(1 << len(pairs)):
        deg = [0] * n
        for k, (u, v) in enumerate(pairs):
            if mask >> k & 1:
                deg[u] += 1
                deg[v] += 1
        out.add(tuple(sorted(deg, reverse=True)))
    return frozenset(out)


@lru_cache(maxsize=None)
def bigraphic_degree_sets(p: int, q: int) -> frozenset:
    """(sorted a, sorted b) for every bipartite graph between p and q vertices."""
    out = set()
    for mask in range(1 << (p * q)):
        bits = np.array([(mask >> k) & 1 for k in range(p * q)], dtype=np.int64).reshape(p, q)
        out.add((tuple(sorted(bits.sum(1), reverse=True)), tuple(sorted(bits.sum(0), reverse=True))))
    return frozenset(out)


def brute_is_graphic(d) -> bool:
    return tuple(sorted(d, reverse=True)) in graphic_degree_sets(len(d))


def brute_is_bigraphic(a, b) -> bool:
    key = (tuple(sorted(a, reverse=True)), tuple(sorted(b, reverse=True)))
    return key in bigraphic_degree_sets(len(a), len(b))


def nonincreasing(n: int, top: int):
    """All nonincreasing sequences of length n with entries in 0..top."""
    return itertools.combinations_with_replacement(range(top, -1, -1), n)


def cut_norm_grid(weights, values, step=0.05) -> float:
    """max |f^T A g| over fractional indicators f, g on a grid (M <= 3)."""
    A = np.outer(weights, weights) * np.asarray(values, dtype=float)
    M = len(weights)
    grid = np.arange(0, 1 + step / 2, step)
    F = np.array(list(itertools.product(grid, repeat=M)))
    vals = F @ A @ F.T
    return float(np.abs(vals).max())
