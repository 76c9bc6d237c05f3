"""Seeded G(m, W) sampling from step graphons with concentration checks.

A vertex draws its part with probability equal to the part weight, then each
pair becomes an edge independently with the density between the two parts.
All part draws come first, then one uniform per pair in row-major order over
i < j, so a seed fixes the graph bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConcentrationFailure, UsageError
from .kernelcore import FiniteGraph, PartitionedGraph, RobustProfile, StepGraphon


def draw_parts(W: StepGraphon, m: int, rng: np.random.Generator) -> np.ndarray:
    cum = np.cumsum(W.weight_array)
    cum[-1] = 1.0
    return np.searchsorted(cum, rng.random(m), side="right").astype(np.int64)


def sample_once(W: StepGraphon, m: int, seed: int, class_of: Sequence[int] | None = None) -> PartitionedGraph:
    """One draw of G(m, W) with its induced partition.

    Labels are part indices, or ``class_of[part]`` when a grouping of the
    parts into classes is given.
    """
    if m < 2:
        raise UsageError("m must be at least 2")
    rng = np.random.default_rng(seed)
    parts = draw_parts(W, m, rng)
    dens = W.density_array
    adj = np.zeros((m, m), dtype=bool)
    for i in range(m - 1):
        p = dens[parts[i], parts[i + 1 :]]
        adj[i, i + 1 :] = rng.random(m - 1 - i) < p
    adj |= adj.T
    graph = FiniteGraph._trusted(adj)
    if class_of is None:
        return PartitionedGraph(graph, parts, W.num_parts)
    cls = np.asarray(class_of, dtype=np.int64)
    if cls.shape != (W.num_parts,):
        raise UsageError("class_of must assign every part")
    return PartitionedGraph(graph, cls[parts], int(cls.max()) + 1)


@dataclass(frozen=True)
class EventReport:
    """Part-size and degree deviations of one sample against a profile.

    ``size_dev[i]`` is | |X_i| - v_i m | / (v_i m); ``degree_dev[i][j]`` the
    worst | deg(x; X_j) - d_ij v_j m | / (d_ij v_j m) over x in X_i.  Entries
    for classes below the footprint threshold are NaN (not checked).
    """

    part_sizes: tuple[int, ...]
    size_dev: tuple[float, ...]
    degree_dev: tuple[tuple[float, ...], ...]
    fs1: bool
    fs2: bool
    lam: float
    fs3_assumed: float

    @property
    def passed(self) -> bool:
        return self.fs1 and self.fs2

    def badness(self) -> float:
        """Largest deviation in units of its allowed slack (<= 1 roughly means pass)."""
        s = [x / self.lam for x in self.size_dev if not math.isnan(x)]
        d = [x / (6 * self.lam) for row in self.degree_dev for x in row if not math.isnan(x)]
        return max(s + d, default=0.0)

    def to_dict(self) -> dict:
        def clean(x):
            return None if math.isnan(x) else x

        return {
            "part_sizes": list(self.part_sizes),
            "size_dev": [clean(x) for x in self.size_dev],
            "degree_dev": [[clean(x) for x in row] for row in self.degree_dev],
            "fs1": self.fs1,
            "fs2": self.fs2,
            "fs3_assumed": self.fs3_assumed,
        }


def check_events(F: PartitionedGraph, profile: RobustProfile, lam, delta) -> EventReport:
    """Recompute the part-size and degree events from scratch."""
    K = profile.size
    if F.num_parts != K:
        raise UsageError("partition and profile have different class counts")
    m = F.graph.n
    lam_f = float(lam)
    v = [float(x) for x in profile.footprint]
    d = [[float(x) for x in row] for row in profile.matrix]
    on = [profile.footprint[i] >= delta / K for i in range(K)]
    sizes = F.part_sizes
    size_dev = []
    fs1 = True
    for i in range(K):
        if not on[i]:
            size_dev.append(math.nan)
            continue
        expect = v[i] * m
        size_dev.append(abs(sizes[i] - expect) / expect)
        if abs(sizes[i] - expect) > lam_f * expect:
            fs1 = False
    deg = F.degree_matrix
    degree_dev = [[math.nan] * K for _ in range(K)]
    fs2 = True
    for i in range(K):
        rows = deg[F.parts[i]]
        if rows.shape[0] == 0:
            continue
        for j in range(K):
            if not on[j]:
                continue
            target = d[i][j] * v[j] * m
            lo_dev, hi_dev = int(rows[:, j].min()), int(rows[:, j].max())
            if target == 0:
                degree_dev[i][j] = 0.0 if hi_dev == 0 else math.inf
                fs2 &= hi_dev <= 1
                continue
            degree_dev[i][j] = max(target - lo_dev, hi_dev - target) / target
            slack = 6 * lam_f * target
            if lo_dev < target - slack - 1 or hi_dev > target + slack + 1:
                fs2 = False
    fs3 = 22 / math.sqrt(math.log2(m))
    return EventReport(tuple(sizes), tuple(size_dev), tuple(tuple(r) for r in degree_dev), fs1, fs2, lam_f, fs3)


@dataclass(frozen=True)
class SampleOutcome:
    graph: PartitionedGraph
    attempts: int
    event_report: EventReport
    seed: int


def _check_profile(W: StepGraphon, profile: RobustProfile, class_of) -> list[int]:
    if class_of is None:
        if profile.size != W.num_parts:
            raise UsageError("profile size differs from the part count; pass class_of")
        class_of = list(range(W.num_parts))
    class_of = [int(c) for c in class_of]
    if len(class_of) != W.num_parts or min(class_of) < 0 or max(class_of) >= profile.size:
        raise UsageError("class_of does not map parts onto the profile's classes")
    mass = [0] * profile.size
    for i, c in enumerate(class_of):
        mass[c] += W.weights[i]
    for c in range(profile.size):
        if abs(mass[c] - profile.footprint[c]) > 1e-9:
            raise UsageError(f"class {c} has weight {float(mass[c])}, profile says {float(profile.footprint[c])}")
    return class_of


def sample_with_events(
    W: StepGraphon,
    profile: RobustProfile,
    params,
    seed: int,
    max_attempts: int = 100,
    class_of: Sequence[int] | None = None,
) -> SampleOutcome:
    """Resample with seeds seed, seed+1, ... until both concentration events hold.

    ``params`` needs ``m``, ``lam`` and ``delta``.
    """
    if max_attempts < 1:
        raise UsageError("max_attempts must be at least 1")
    class_of = _check_profile(W, profile, class_of)
    best = None
    for t in range(max_attempts):
        F = sample_once(W, params.m, seed + t, class_of)
        report = check_events(F, profile, params.lam, params.delta)
        if report.passed:
            return SampleOutcome(F, t + 1, report, seed + t)
        if best is None or report.badness() < best.badness():
            best = report
    raise ConcentrationFailure(
        f"no sample met the concentration events in {max_attempts} attempts "
        f"(best deviation {best.badness():.2f}x the allowed slack); increase m or lambda",
        best,
        max_attempts,
    )
