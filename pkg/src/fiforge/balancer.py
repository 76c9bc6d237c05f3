"""Pad a sampled graph with buffer vertices so degrees between parts are exact.

Given F on m vertices with parts X_1..X_K that nearly follow a profile
(v, d), build G on n vertices with parts Z_0, Z_1..Z_K where Z_i = X_i + Y_i,
Z_0 holds isolated filler, and every vertex of Z_i has exactly D_ij
neighbours in Z_j.  Edges are only deleted at clusters below the footprint
threshold; all other changes add edges touching buffer vertices:

* first step, (X_i, Y_j): X-vertices top up to D_ij via a bipartite graph
  whose Y-side degrees are as equal as possible;
* second step, (Y_i, Y_j) for i < j: buffer vertices top up via another
  bipartite graph;
* diagonal, inside Y_i: a graph with the remaining degrees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .degseq import bigraphic_violation, graphic_violation, realize_bigraphic, realize_graphic
from .errors import BalanceInfeasibleError, LayoutError, ParityError, UsageError
from .fintest import FICertificate
from .kernelcore import FiniteGraph, PartitionedGraph, RobustProfile, to_fraction
from .params import PipelineParams, choose_gamma


def gamma_round_matrix(D, alpha, beta, gamma: int, even_diagonal: bool = False) -> tuple[tuple[Fraction, ...], ...]:
    """Entrywise ceil(gamma * (1+alpha)/(1+beta) * d) / gamma, exactly.

    With ``even_diagonal`` the diagonal numerators are rounded up to the
    next even integer.
    """
    if gamma < 2 or gamma % 2:
        raise UsageError("gamma must be an even integer >= 2")
    alpha, beta = to_fraction(alpha), to_fraction(beta)
    if alpha <= 0 or beta <= 0:
        raise UsageError("alpha and beta must be positive")
    scale = (1 + alpha) / (1 + beta)
    K = len(D)
    out = []
    for i in range(K):
        row = []
        for j in range(K):
            k = math.ceil(gamma * scale * to_fraction(D[i][j]))
            if even_diagonal and i == j and k % 2:
                k += 1
            x = Fraction(k, gamma)
            if x > 1:
                raise UsageError(f"rounded density {x} at ({i}, {j}) exceeds 1; alpha is too large for beta")
            row.append(x)
        out.append(tuple(row))
    return tuple(out)


@dataclass(frozen=True)
class TargetDegreeMatrix:
    """Exact targets: |Z_i| = part_sizes[i], deg(u in Z_i; Z_j) = degrees[i][j].

    Indices are classes 0..K-1 (layout part i+1).  ``source`` is the profile
    matrix the targets were rounded from.
    """

    dstar: tuple[tuple[Fraction, ...], ...]
    degrees: tuple[tuple[int, ...], ...]
    part_sizes: tuple[int, ...]
    on_threshold: tuple[bool, ...]
    source: tuple[tuple[Fraction, ...], ...]
    gamma: int | None = None

    def __post_init__(self):
        K = len(self.part_sizes)
        for i in range(K):
            for j in range(K):
                if self.dstar[i][j] != self.dstar[j][i]:
                    raise UsageError("dstar must be symmetric")
                if not (0 <= self.dstar[i][j] <= 1):
                    raise UsageError("dstar entries must lie in [0, 1]")
                if self.degrees[i][j] * self.part_sizes[i] != self.degrees[j][i] * self.part_sizes[j]:
                    raise UsageError(f"D[{i}][{j}] |Z_{i}| != D[{j}][{i}] |Z_{j}|")
                if self.on_threshold[i] and self.on_threshold[j]:
                    if self.dstar[i][j] * self.part_sizes[j] != self.degrees[i][j]:
                        raise UsageError(f"D[{i}][{j}] is not dstar * |Z_{j}|")
                elif self.degrees[i][j]:
                    raise UsageError("clusters below the threshold must have zero targets")

    @property
    def size(self) -> int:
        return len(self.part_sizes)


def plan_targets(profile: RobustProfile, params: PipelineParams) -> TargetDegreeMatrix:
    """Rounded densities, part sizes and integer degree targets for general mode."""
    K = profile.size
    v = profile.footprint
    on = tuple(v[i] >= params.delta / K for i in range(K))
    gamma = params.gamma if params.gamma is not None else choose_gamma(v, params, on)
    dstar = gamma_round_matrix(profile.matrix, params.alpha, params.beta, gamma, params.even_diagonal)
    sizes = tuple(gamma * math.floor((1 + params.beta) * params.m * v[i] / gamma) for i in range(K))
    degrees = tuple(
        tuple(int(dstar[i][j] * sizes[j]) if on[i] and on[j] else 0 for j in range(K)) for i in range(K)
    )
    return TargetDegreeMatrix(dstar, degrees, sizes, on, profile.matrix, gamma)


def regular_targets(d, m: int, n: int) -> TargetDegreeMatrix:
    """One class on all n vertices with an even degree D near the middle of the feasible window.

    The diagonal step needs 0 <= D - b <= |Y| - 1 where b is the average
    number of X-neighbours a buffer vertex receives; with mean F-degree
    d(m-1) that confines D to an interval of width about Y^2/(m - Y).
    """
    d = to_fraction(d)
    if not (0 < d < 1):
        raise UsageError("regular targets need 0 < d < 1")
    Y = n - m
    if Y <= 0 or Y >= m:
        raise LayoutError("regular mode needs 0 < n - m < m")
    center = (m * d * (m - 1) - Fraction(Y * (Y - 1), 2)) / (m - Y)
    D = 2 * round(center / 2)
    D = max(0, min(D, n - 1 - (n - 1) % 2))
    return TargetDegreeMatrix(((Fraction(D, n),),), ((D,),), (n,), (True,), ((d,),), None)


@dataclass(frozen=True)
class BufferLayout:
    """Vertex ids of X_i (from F), Y_i (new) and Z_0 for each class."""

    X: tuple[np.ndarray, ...]
    Y: tuple[np.ndarray, ...]
    Z0: np.ndarray
    excess: tuple[np.ndarray, ...]
    n: int

    def labels(self) -> np.ndarray:
        lab = np.zeros(self.n, dtype=np.int64)
        for i, (x, y) in enumerate(zip(self.X, self.Y)):
            lab[x] = i + 1
            lab[y] = i + 1
        return lab


def make_layout(F: PartitionedGraph, targets: TargetDegreeMatrix, n: int) -> BufferLayout:
    """Buffer sizes |Z_i| - |X_i|, with overflow from sub-threshold clusters sent to Z_0."""
    K = targets.size
    if F.num_parts != K:
        raise UsageError("sample partition and targets have different class counts")
    m = F.graph.n
    X, Y, excess = [], [], []
    nxt = m
    for i in range(K):
        xi = F.parts[i]
        need = targets.part_sizes[i] - len(xi)
        if need < 0:
            if targets.on_threshold[i]:
                raise LayoutError(
                    f"class {i}: |X_{i}| = {len(xi)} exceeds |Z_{i}| = {targets.part_sizes[i]}; "
                    "the part-size event failed or beta is too small"
                )
            excess.append(xi[targets.part_sizes[i] :])
            xi = xi[: targets.part_sizes[i]]
            need = 0
        else:
            excess.append(xi[:0])
        X.append(xi)
        Y.append(np.arange(nxt, nxt + need))
        nxt += need
    filler = n - nxt
    spare = sum(len(e) for e in excess)
    if filler < 0 or n - sum(targets.part_sizes) != filler + spare:
        raise LayoutError(f"layout needs {nxt} vertices plus filler but n = {n}")
    Z0 = np.concatenate([np.arange(nxt, n)] + list(excess)).astype(np.int64)
    return BufferLayout(tuple(X), tuple(Y), np.sort(Z0), tuple(excess), n)


@dataclass(frozen=True)
class BalancedGraph:
    graph: PartitionedGraph
    certificate: FICertificate
    targets: TargetDegreeMatrix
    layout: BufferLayout
    m: int
    deleted_edges: int
    added_edges: dict = field(default_factory=dict)


def _where(viol) -> str:
    return f"{viol[0]} fails" if viol[1] is None else f"{viol[0]} fails at k={viol[1]}"


def _split_evenly(total: int, k: int) -> np.ndarray:
    base, extra = divmod(total, k)
    out = np.full(k, base, dtype=np.int64)
    out[:extra] += 1
    return out


def realize_targets(F: PartitionedGraph, targets: TargetDegreeMatrix, n: int) -> BalancedGraph:
    """Run deletion, first step, second step and diagonal step, then verify exactly."""
    layout = make_layout(F, targets, n)
    K = targets.size
    m = F.graph.n
    D = targets.degrees
    on = targets.on_threshold
    adj = np.zeros((n, n), dtype=bool)
    adj[:m, :m] = F.graph.adjacency
    deleted = 0
    for i in range(K):
        if not on[i]:
            xi = F.parts[i]
            deleted += int(adj[xi].sum()) - int(adj[np.ix_(xi, xi)].sum()) // 2
            adj[xi, :] = False
            adj[:, xi] = False
    added = {"first": 0, "second": 0, "diagonal": 0}

    def deg_into(vertices, block):
        return adj[np.ix_(vertices, block)].sum(axis=1).astype(np.int64)

    # first step: X_i -> Y_j
    for i in range(K):
        for j in range(K):
            if not (on[i] and on[j]) or len(layout.X[i]) == 0:
                continue
            xi, yj = layout.X[i], layout.Y[j]
            a = D[i][j] - deg_into(xi, layout.X[j])
            if a.min() < 0:
                h = int(np.argmin(a))
                raise BalanceInfeasibleError(
                    f"first step ({i},{j}): vertex {int(xi[h])} already has {D[i][j] - int(a[h])} "
                    f"> {D[i][j]} neighbours in X_{j}; increase alpha or m",
                    "first", (i, j), "a", int(xi[h]),
                )
            A = int(a.sum())
            if A == 0:
                continue
            if len(yj) == 0:
                raise BalanceInfeasibleError(f"first step ({i},{j}): Y_{j} is empty", "first", (i, j), "a")
            b = _split_evenly(A, len(yj))
            viol = bigraphic_violation(a, b)
            if viol is not None:
                raise BalanceInfeasibleError(
                    f"first step ({i},{j}): {_where(viol)}; increase beta - alpha",
                    "first", (i, j), "a", viol[1],
                )
            bi = realize_bigraphic(a, b).biadjacency
            adj[np.ix_(xi, yj)] |= bi
            adj[np.ix_(yj, xi)] |= bi.T
            added["first"] += A

    # second step: Y_i -- Y_j
    for i in range(K):
        for j in range(i + 1, K):
            if not (on[i] and on[j]):
                continue
            yi, yj = layout.Y[i], layout.Y[j]
            r1 = D[i][j] - deg_into(yi, layout.X[j])
            r2 = D[j][i] - deg_into(yj, layout.X[i])
            for r, who in ((r1, i), (r2, j)):
                if len(r) and r.min() < 0:
                    raise BalanceInfeasibleError(
                        f"second step ({i},{j}): buffer of class {who} overshoots its target; increase beta - alpha",
                        "second", (i, j), "r",
                    )
            viol = bigraphic_violation(r1, r2)
            if viol is not None:
                raise BalanceInfeasibleError(
                    f"second step ({i},{j}): {_where(viol)}", "second", (i, j), "r", viol[1]
                )
            if len(yi) and len(yj):
                bi = realize_bigraphic(r1, r2).biadjacency
                adj[np.ix_(yi, yj)] |= bi
                adj[np.ix_(yj, yi)] |= bi.T
            added["second"] += int(r1.sum())

    # diagonal: inside Y_i
    for i in range(K):
        if not on[i]:
            continue
        yi = layout.Y[i]
        c = D[i][i] - deg_into(yi, layout.X[i])
        if len(c) == 0:
            continue
        if c.sum() % 2:
            raise ParityError(f"diagonal ({i}): odd degree sum {int(c.sum())}", "diagonal", (i, i), "c")
        viol = graphic_violation(c)
        if viol is not None:
            raise BalanceInfeasibleError(
                f"diagonal ({i}): {_where(viol)} (c in [{int(c.min())}, {int(c.max())}], "
                f"|Y| = {len(yi)}); adjust alpha towards the feasible window",
                "diagonal", (i, i), "c", viol[1],
            )
        sub = realize_graphic(c).adjacency
        adj[np.ix_(yi, yi)] |= sub
        added["diagonal"] += int(c.sum()) // 2

    G = PartitionedGraph(FiniteGraph._trusted(adj), layout.labels(), K + 1)
    sizes = (n - sum(targets.part_sizes),) + targets.part_sizes
    degs = ((0,) * (K + 1),) + tuple((0,) + tuple(row) for row in D)
    cert = FICertificate(sizes, degs, "layout")
    if not verify_certificate(G, cert):
        raise AssertionError("balanced graph does not meet its certificate")
    return BalancedGraph(G, cert, targets, layout, m, deleted, added)


def build_balanced(F: PartitionedGraph, profile: RobustProfile, params: PipelineParams, n: int) -> BalancedGraph:
    """Exact-degree graph on n vertices from a sample F whose classes follow ``profile``."""
    if not ((1 + params.beta) * F.graph.n <= n):
        raise LayoutError(f"need (1+beta) m <= n, got m = {F.graph.n}, n = {n}")
    return realize_targets(F, plan_targets(profile, params), n)


def verify_certificate(G: PartitionedGraph, cert: FICertificate) -> bool:
    """True iff the partition is equitable with exactly the certified parameters."""
    if cert.n != G.graph.n or tuple(G.part_sizes) != tuple(cert.part_sizes):
        return False
    deg = G.degree_matrix
    for i, part in enumerate(G.parts):
        if len(part) and not (deg[part] == np.asarray(cert.degree_matrix[i])).all():
            return False
    return True
