"""Value types: step graphons, density profiles, finite (partitioned) graphs.

Step graphon values are held as exact ``Fraction`` objects.  Floats passed
in by callers are read through their shortest decimal ``repr`` so that
``0.3`` means 3/10, which keeps user-supplied decimals exact.  Float views
(``weight_array``, ``density_array``) are provided for numeric kernels.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from functools import cached_property
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateInputError, UsageError

DEFAULT_TOL = 1e-9
WEIGHT_SUM_TOL = Fraction(1, 10**12)


def to_fraction(x) -> Fraction:
    """Exact rational reading of ``x`` (floats via their decimal repr)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (bool, np.bool_)):
        raise UsageError(f"boolean is not a number: {x!r}")
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, Rational):
        return Fraction(x.numerator, x.denominator)
    if isinstance(x, Decimal):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except ValueError as exc:
            raise UsageError(f"not a number: {x!r}") from exc
    if isinstance(x, (float, np.floating)):
        xf = float(x)
        if not np.isfinite(xf):
            raise UsageError(f"non-finite value: {x!r}")
        return Fraction(repr(xf))
    raise UsageError(f"cannot interpret {x!r} as a number")


def _frac_vector(values: Iterable) -> tuple[Fraction, ...]:
    return tuple(to_fraction(v) for v in values)


def _frac_matrix(rows: Iterable[Iterable]) -> tuple[tuple[Fraction, ...], ...]:
    return tuple(_frac_vector(r) for r in rows)


def _check_square(matrix, size: int, what: str) -> None:
    if len(matrix) != size or any(len(row) != size for row in matrix):
        raise UsageError(f"{what} must be {size}x{size}")


def _check_symmetric_unit(matrix, what: str) -> None:
    size = len(matrix)
    for i in range(size):
        for j in range(size):
            x = matrix[i][j]
            if x < 0 or x > 1:
                raise UsageError(f"{what}[{i}][{j}] = {x} outside [0, 1]")
            if matrix[j][i] != x:
                raise UsageError(f"{what} is not symmetric at ({i}, {j})")


@dataclass(frozen=True)
class StepGraphon:
    """Symmetric density kernel constant on each block of a weighted partition."""

    weights: tuple[Fraction, ...]
    densities: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        w = _frac_vector(self.weights)
        d = _frac_matrix(self.densities)
        if not w:
            raise UsageError("a step graphon needs at least one part")
        _check_square(d, len(w), "densities")
        for i, wi in enumerate(w):
            if wi <= 0:
                raise UsageError(f"weight {i} = {wi} is not strictly positive")
        if abs(sum(w) - 1) > WEIGHT_SUM_TOL:
            raise UsageError(f"weights sum to {float(sum(w))}, not 1")
        _check_symmetric_unit(d, "densities")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "densities", d)

    @classmethod
    def constant(cls, d, parts: int = 1) -> "StepGraphon":
        w = Fraction(1, parts)
        return cls((w,) * parts, ((to_fraction(d),) * parts,) * parts)

    @property
    def num_parts(self) -> int:
        return len(self.weights)

    @cached_property
    def weight_array(self) -> np.ndarray:
        return np.array([float(x) for x in self.weights])

    @cached_property
    def density_array(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.densities])

    def degree(self, i: int, j: int) -> Fraction:
        """Degree of any point of part ``i`` into part ``j``."""
        M = self.num_parts
        if not (0 <= i < M and 0 <= j < M):
            raise UsageError(f"part index out of range: ({i}, {j}) with M={M}")
        return self.densities[i][j] * self.weights[j]

    def total_degree(self, i: int) -> Fraction:
        return sum((self.degree(i, j) for j in range(self.num_parts)), Fraction(0))

    def permuted(self, order: Sequence[int]) -> "StepGraphon":
        """Relabel parts so that new part ``k`` is old part ``order[k]``."""
        if sorted(order) != list(range(self.num_parts)):
            raise UsageError("order must be a permutation of the part indices")
        return StepGraphon(
            tuple(self.weights[o] for o in order),
            tuple(tuple(self.densities[a][b] for b in order) for a in order),
        )

    def edge_density(self) -> Fraction:
        M = self.num_parts
        return sum(
            (self.weights[i] * self.weights[j] * self.densities[i][j] for i in range(M) for j in range(M)),
            Fraction(0),
        )


@dataclass(frozen=True)
class DensityProfile:
    """Cluster footprint ``v`` together with the density matrix between clusters."""

    footprint: tuple[Fraction, ...]
    matrix: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        v = _frac_vector(self.footprint)
        D = _frac_matrix(self.matrix)
        _check_square(D, len(v), "matrix")
        if any(x < 0 or x > 1 for x in v):
            raise UsageError("footprint entries must lie in [0, 1]")
        if abs(sum(v) - 1) > WEIGHT_SUM_TOL:
            raise UsageError("footprint must sum to 1")
        _check_symmetric_unit(D, "matrix")
        object.__setattr__(self, "footprint", v)
        object.__setattr__(self, "matrix", D)

    @property
    def size(self) -> int:
        return len(self.footprint)


@dataclass(frozen=True)
class RobustProfile:
    """A density profile whose matrix entries are 0 or in [beta, 1 - beta]."""

    profile: DensityProfile
    beta: Fraction

    def __post_init__(self):
        beta = to_fraction(self.beta)
        if not (0 < beta < Fraction(1, 2)):
            raise UsageError(f"beta must lie in (0, 1/2), got {beta}")
        for i, row in enumerate(self.profile.matrix):
            for j, x in enumerate(row):
                if x != 0 and not (beta <= x <= 1 - beta):
                    raise UsageError(f"entry ({i}, {j}) = {x} is not {beta}-robust")
        object.__setattr__(self, "beta", beta)

    @property
    def footprint(self):
        return self.profile.footprint

    @property
    def matrix(self):
        return self.profile.matrix

    @property
    def size(self) -> int:
        return self.profile.size


class FiniteGraph:
    """Simple undirected graph on vertices ``0..n-1`` (dense adjacency)."""

    __slots__ = ("_adj", "__weakref__")

    def __init__(self, adjacency):
        adj = np.array(adjacency, dtype=bool, copy=True)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise UsageError("adjacency must be a square matrix")
        if adj.diagonal().any():
            raise UsageError("self-loops are not allowed")
        if not np.array_equal(adj, adj.T):
            raise UsageError("adjacency must be symmetric")
        adj.setflags(write=False)
        self._adj = adj

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "FiniteGraph":
        if n < 0:
            raise UsageError("vertex count must be nonnegative")
        adj = np.zeros((n, n), dtype=bool)
        for u, v in edges:
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise UsageError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise UsageError(f"self-loop at {u}")
            if adj[u, v]:
                raise UsageError(f"duplicate edge ({u}, {v})")
            adj[u, v] = adj[v, u] = True
        return cls(adj)

    @classmethod
    def _trusted(cls, adj: np.ndarray) -> "FiniteGraph":
        # Skips the O(n^2) validation; callers guarantee symmetry and zero diagonal.
        g = cls.__new__(cls)
        adj.setflags(write=False)
        g._adj = adj
        return g

    @classmethod
    def empty(cls, n: int) -> "FiniteGraph":
        return cls(np.zeros((n, n), dtype=bool))

    @classmethod
    def complete(cls, n: int) -> "FiniteGraph":
        return cls(~np.eye(n, dtype=bool))

    @classmethod
    def cycle(cls, n: int) -> "FiniteGraph":
        return cls.from_edges(n, [(i, (i + 1) % n) for i in range(n)])

    @classmethod
    def path(cls, n: int) -> "FiniteGraph":
        return cls.from_edges(n, [(i, i + 1) for i in range(n - 1)])

    @property
    def n(self) -> int:
        return self._adj.shape[0]

    @property
    def adjacency(self) -> np.ndarray:
        return self._adj

    def edges(self) -> list[tuple[int, int]]:
        us, vs = np.nonzero(np.triu(self._adj, 1))
        return list(zip(us.tolist(), vs.tolist()))

    @property
    def num_edges(self) -> int:
        return int(self._adj.sum()) // 2

    def degrees(self) -> np.ndarray:
        return self._adj.sum(axis=1).astype(np.int64)

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self._adj[u, v])

    def neighbors(self, v: int) -> list[int]:
        return np.nonzero(self._adj[v])[0].tolist()

    def relabeled(self, perm: Sequence[int]) -> "FiniteGraph":
        """Graph in which old vertex ``v`` becomes ``perm[v]``."""
        perm = np.asarray(perm)
        inv = np.empty_like(perm)
        inv[perm] = np.arange(len(perm))
        return FiniteGraph._trusted(self._adj[np.ix_(inv, inv)].copy())

    def disjoint_union(self, other: "FiniteGraph") -> "FiniteGraph":
        n1, n2 = self.n, other.n
        adj = np.zeros((n1 + n2, n1 + n2), dtype=bool)
        adj[:n1, :n1] = self._adj
        adj[n1:, n1:] = other._adj
        return FiniteGraph._trusted(adj)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiniteGraph):
            return NotImplemented
        return self._adj.shape == other._adj.shape and bool(np.array_equal(self._adj, other._adj))

    def __hash__(self) -> int:
        return hash((self.n, np.packbits(self._adj).tobytes()))

    def __repr__(self) -> str:
        return f"FiniteGraph(n={self.n}, m={self.num_edges})"


class PartitionedGraph:
    """A finite graph with a vertex partition indexed ``0..P-1``.

    Index 0 is the filler part in pipeline layouts and may be empty.
    """

    def __init__(self, graph: FiniteGraph, labels, num_parts: int | None = None):
        labels = np.array(labels, dtype=np.int64, copy=True)
        if labels.shape != (graph.n,):
            raise UsageError("need exactly one part label per vertex")
        if graph.n and labels.min() < 0:
            raise UsageError("part labels must be nonnegative")
        top = int(labels.max()) + 1 if graph.n else 0
        if num_parts is None:
            num_parts = top
        elif num_parts < top:
            raise UsageError(f"label {top - 1} exceeds num_parts={num_parts}")
        labels.setflags(write=False)
        self.graph = graph
        self.labels = labels
        self.num_parts = int(num_parts)

    @classmethod
    def from_parts(cls, graph: FiniteGraph, parts: Sequence[Iterable[int]]) -> "PartitionedGraph":
        labels = np.full(graph.n, -1, dtype=np.int64)
        for k, part in enumerate(parts):
            for v in part:
                if labels[v] != -1:
                    raise UsageError(f"vertex {v} is in two parts")
                labels[v] = k
        if (labels == -1).any():
            raise UsageError("parts do not cover the vertex set")
        return cls(graph, labels, len(parts))

    @cached_property
    def parts(self) -> tuple[np.ndarray, ...]:
        return tuple(np.nonzero(self.labels == k)[0] for k in range(self.num_parts))

    @cached_property
    def part_sizes(self) -> tuple[int, ...]:
        return tuple(np.bincount(self.labels, minlength=self.num_parts).tolist())

    @cached_property
    def degree_matrix(self) -> np.ndarray:
        """``out[v, k]`` = number of neighbours of ``v`` inside part ``k``."""
        onehot = np.zeros((self.graph.n, self.num_parts), dtype=np.int64)
        onehot[np.arange(self.graph.n), self.labels] = 1
        return self.graph.adjacency.astype(np.int64) @ onehot

    def edges_between(self, i: int, j: int) -> int:
        """e(X_i, X_j) for i != j, e(X_i) for i == j."""
        total = int(self.degree_matrix[self.parts[i], j].sum())
        return total // 2 if i == j else total


def stepped_density(G: PartitionedGraph, i: int, j: int) -> Fraction:
    """Edge density between parts ``i`` and ``j`` (2e/|X|^2 on the diagonal)."""
    if not (0 <= i < G.num_parts and 0 <= j < G.num_parts):
        raise UsageError(f"part index out of range: ({i}, {j})")
    si, sj = G.part_sizes[i], G.part_sizes[j]
    if si == 0 or sj == 0:
        raise DegenerateInputError(f"part {i if si == 0 else j} is empty")
    if i == j:
        return Fraction(2 * G.edges_between(i, i), si * si)
    return Fraction(G.edges_between(i, j), si * sj)


def graphon_of_graph(G: FiniteGraph) -> StepGraphon:
    """One part of weight 1/n per vertex, 0/1 densities, zero diagonal."""
    n = G.n
    if n < 1:
        raise UsageError("graph must have at least one vertex")
    one, zero = Fraction(1), Fraction(0)
    adj = G.adjacency
    return StepGraphon(
        (Fraction(1, n),) * n,
        tuple(tuple(one if adj[u, v] else zero for v in range(n)) for u in range(n)),
    )
