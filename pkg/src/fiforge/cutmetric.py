"""Cut norm and cut distance for step kernels, plus the run's distance report.

For a step kernel the cut-norm objective is bilinear in the fractional
indicators of S and T, so the supremum is attained at unions of parts.
Fixing S, the best T takes every part with positive column sum, which
leaves a 2^M enumeration over S.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING

import numpy as np

from .errors import OracleLimitError, UsageError
from .kernelcore import PartitionedGraph, StepGraphon, stepped_density

if TYPE_CHECKING:
    from .balancer import BalancedGraph
    from .quotient import CleaningResult

EXACT_LIMIT = 24
_CHUNK_BITS = 16


@dataclass(frozen=True, eq=False)
class SignedStepKernel:
    weights: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        v = np.asarray(self.values, dtype=float)
        if v.shape != (len(w), len(w)):
            raise UsageError("values must be M x M")
        if (w <= 0).any() or abs(w.sum() - 1) > 1e-9:
            raise UsageError("weights must be positive and sum to 1")
        if not np.allclose(v, v.T, atol=1e-12, rtol=0):
            raise UsageError("values must be symmetric")
        if np.abs(v).max(initial=0) > 1 + 1e-12:
            raise UsageError("values must lie in [-1, 1]")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "values", v)

    @classmethod
    def difference(cls, a: StepGraphon, b: StepGraphon) -> "SignedStepKernel":
        if a.weights != b.weights:
            raise UsageError("graphons must share a part structure; align them first")
        return cls(a.weight_array, a.density_array - b.density_array)

    @property
    def num_parts(self) -> int:
        return len(self.weights)

    def mass_matrix(self) -> np.ndarray:
        return np.outer(self.weights, self.weights) * self.values

    def permuted(self, order) -> "SignedStepKernel":
        order = np.asarray(order)
        return SignedStepKernel(self.weights[order], self.values[np.ix_(order, order)])

    def scaled(self, c: float) -> "SignedStepKernel":
        return SignedStepKernel(self.weights, self.values * c)

    def l1_norm(self) -> float:
        return float(np.abs(self.mass_matrix()).sum())


def _best_over_subsets(A: np.ndarray) -> float:
    M = A.shape[0]
    if M == 0:
        return 0.0
    best = 0.0
    low = min(M, _CHUNK_BITS)
    bits = ((np.arange(1 << low)[:, None] >> np.arange(low)) & 1).astype(float)
    base = bits @ A[:low]
    for high in range(1 << (M - low)):
        col = base
        if high:
            sel = [low + k for k in range(M - low) if (high >> k) & 1]
            col = base + A[sel].sum(axis=0)
        best = max(best, np.maximum(col, 0).sum(axis=1).max(), np.maximum(-col, 0).sum(axis=1).max())
    return float(best)


def cut_norm_exact(K: SignedStepKernel, limit: int = EXACT_LIMIT) -> float:
    """max over unions of parts S, T of |sum_{S x T} w_i w_j K_ij|."""
    if K.num_parts > limit:
        raise OracleLimitError(f"{K.num_parts} parts exceeds the exact limit {limit}; use cut_norm_heuristic")
    return _best_over_subsets(K.mass_matrix())


def cut_norm_heuristic(K: SignedStepKernel, restarts: int = 64, seed: int = 0, max_iter: int = 100) -> float:
    """Lower bound on the cut norm by alternating S/T maximisation from random starts."""
    A = K.mass_matrix()
    M = A.shape[0]
    if M == 0:
        return 0.0
    rng = np.random.default_rng(seed)
    best = 0.0
    for _ in range(restarts):
        start = rng.random(M) < 0.5
        if not start.any():
            start[rng.integers(M)] = True
        for sign in (1.0, -1.0):
            S = start.copy()
            value = -np.inf
            for _ in range(max_iter):
                T = sign * (S @ A) > 0
                S = sign * (A @ T) > 0
                new = sign * A[np.ix_(S, T)].sum()
                if new <= value:
                    break
                value = new
            best = max(best, float(value))
    return best


@dataclass(frozen=True)
class CutDistance:
    """``flag`` is ``"exact"`` (certified 0 by relabelling), ``"upper-bound"`` or ``"heuristic"``."""

    value: float
    flag: str
    alignment: tuple = field(default=(), compare=False)


def _weight_compatible_perms(w1, w2, cap: int):
    groups: dict = {}
    for j, x in enumerate(w2):
        groups.setdefault(x, []).append(j)
    slots = [groups.get(x, []) for x in w1]
    count = 1
    for x, js in groups.items():
        count *= math.factorial(len(js))
        if count > cap:
            return None
    def rec(i, used):
        if i == len(slots):
            yield ()
            return
        for j in slots[i]:
            if j not in used:
                for rest in rec(i + 1, used | {j}):
                    yield (j,) + rest
    return rec(0, frozenset())


def _common_refinement(W1: StepGraphon, W2: StepGraphon, order2):
    cuts1 = list(itertools.accumulate(W1.weights))
    cuts2 = list(itertools.accumulate(W2.weights[o] for o in order2))
    points = sorted(set(cuts1) | set(cuts2))
    weights, idx1, idx2 = [], [], []
    prev = Fraction(0)
    p1 = p2 = 0
    for x in points:
        if x <= prev:
            continue
        weights.append(x - prev)
        idx1.append(p1)
        idx2.append(order2[p2])
        if p1 < len(cuts1) and cuts1[p1] == x:
            p1 += 1
        if p2 < len(cuts2) and cuts2[p2] == x:
            p2 += 1
        prev = x
    w = np.array([float(x) for x in weights])
    w = w / w.sum()
    vals = W1.density_array[np.ix_(idx1, idx1)] - W2.density_array[np.ix_(idx2, idx2)]
    return SignedStepKernel(w, vals)


def cut_distance_step(
    W1: StepGraphon, W2: StepGraphon, perm_cap: int = 5040, restarts: int = 64, seed: int = 0
) -> CutDistance:
    """Upper bound on the cut distance from part permutations or a common refinement."""
    if sorted(W1.weights) == sorted(W2.weights):
        perms = _weight_compatible_perms(W1.weights, W2.weights, perm_cap)
        if perms is not None and W1.num_parts <= EXACT_LIMIT:
            best, arg = math.inf, ()
            for perm in perms:
                diff = SignedStepKernel(W1.weight_array, W1.density_array - W2.permuted(perm).density_array)
                val = cut_norm_exact(diff)
                if val < best:
                    best, arg = val, perm
                if best == 0:
                    break
            return CutDistance(best, "exact" if best == 0 else "upper-bound", arg)
    M2 = W2.num_parts
    cells = W1.num_parts + M2 - 1
    if cells > EXACT_LIMIT:
        K = _common_refinement(W1, W2, tuple(range(M2)))
        return CutDistance(cut_norm_heuristic(K, restarts, seed), "heuristic", tuple(range(M2)))
    orders = itertools.permutations(range(M2)) if math.factorial(M2) * 2**cells <= 2**22 else [tuple(range(M2))]
    best, arg = math.inf, ()
    for order in orders:
        val = cut_norm_exact(_common_refinement(W1, W2, order))
        if val < best:
            best, arg = val, order
    return CutDistance(best, "upper-bound", arg)


def zoom_bound(n: int, m: int) -> Fraction:
    """Cut-distance cost of deleting n - m of n vertices: 2(1 - m/n)."""
    if not (1 <= m <= n):
        raise UsageError("need 1 <= m <= n")
    return 2 * (1 - Fraction(m, n))


def sampling_bound(m: int) -> float:
    """Cut-distance bound for a sample of m vertices that holds with high probability."""
    if m < 2:
        raise UsageError("need m >= 2")
    return 22 / math.sqrt(math.log2(m))


@dataclass(frozen=True)
class DistanceReport:
    """Components of the certified upper bound on the cut distance to the input.

    ``sampling`` is assumed (it holds with high probability but is not
    checked); every other component is computed exactly.
    ``edge_density_gap`` is a certified lower bound on the distance.
    """

    cleaning_l1: Fraction
    sampling: float
    zoom: Fraction
    deletion: Fraction
    target_drift: Fraction
    stepped_deviation: Fraction
    edge_density_gap: float
    total_upper_bound: float
    flagged: bool
    vacuous: bool

    @property
    def balancing(self) -> Fraction:
        return self.zoom + self.deletion + self.target_drift

    def to_dict(self) -> dict:
        return {
            "cleaning_l1": float(self.cleaning_l1),
            "sampling_assumed": self.sampling,
            "zoom": float(self.zoom),
            "deletion": float(self.deletion),
            "target_drift": float(self.target_drift),
            "balancing": float(self.balancing),
            "stepped_deviation": str(self.stepped_deviation),
            "edge_density_gap_lower_bound": self.edge_density_gap,
            "total_upper_bound": self.total_upper_bound,
            "flagged": self.flagged,
            "vacuous": self.vacuous,
        }


def certified_distance_report(
    U: StepGraphon, G: PartitionedGraph, cert, cleaning: "CleaningResult", balanced: "BalancedGraph"
) -> DistanceReport:
    """Assemble the triangle-inequality bound for one output graph."""
    if tuple(G.part_sizes) != tuple(cert.part_sizes):
        raise UsageError("certificate does not match the partition")
    t = balanced.targets
    deviation = Fraction(0)
    for i in range(t.size):
        for j in range(t.size):
            if t.on_threshold[i] and t.on_threshold[j] and G.part_sizes[i + 1] and G.part_sizes[j + 1]:
                deviation = max(deviation, abs(stepped_density(G, i + 1, j + 1) - t.dstar[i][j]))
    drift = max(
        (abs(t.dstar[i][j] - t.source[i][j]) for i in range(t.size) for j in range(t.size)),
        default=Fraction(0),
    )
    m = balanced.m
    zoom = zoom_bound(G.graph.n, m)
    deletion = Fraction(2 * balanced.deleted_edges, m * m)
    sample = sampling_bound(m)
    total = float(cleaning.l1_change) + sample + float(zoom + deletion + drift)
    n = G.graph.n
    gap = abs(float(U.edge_density()) - 2 * G.graph.num_edges / (n * n))
    return DistanceReport(
        cleaning_l1=cleaning.l1_change,
        sampling=sample,
        zoom=zoom,
        deletion=deletion,
        target_drift=drift,
        stepped_deviation=deviation,
        edge_density_gap=gap,
        total_upper_bound=total,
        flagged=deviation != 0,
        vacuous=total >= 1,
    )
