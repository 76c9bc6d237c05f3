"""Quotients of step graphons by their coarsest weighted equitable coarsening.

For a step graphon the minimal invariant quotient is realised by grouping
parts with weighted colour refinement: parts stay together while their
degree vectors toward the current classes agree.  The same structure drives
the fractional-isomorphism test between step graphons and the beta-robust
cleaning step that precedes sampling.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import UsageError
from .kernelcore import DEFAULT_TOL, DensityProfile, RobustProfile, StepGraphon, to_fraction


@dataclass(frozen=True)
class WeightedEquitableCoarsening:
    """Assignment of parts to classes plus the quotient footprint and densities."""

    class_of: tuple[int, ...]
    class_footprint: tuple[Fraction, ...]
    class_matrix: tuple[tuple[Fraction, ...], ...]

    @classmethod
    def from_assignment(cls, W: StepGraphon, class_of: Sequence[int]) -> "WeightedEquitableCoarsening":
        """Footprint and weight-averaged densities of an arbitrary grouping."""
        class_of = tuple(int(c) for c in class_of)
        if len(class_of) != W.num_parts:
            raise UsageError("class_of must assign every part")
        K = max(class_of) + 1
        if sorted(set(class_of)) != list(range(K)):
            raise UsageError("class indices must be 0..K-1 without gaps")
        foot = [Fraction(0)] * K
        for i, c in enumerate(class_of):
            foot[c] += W.weights[i]
        mass = [[Fraction(0)] * K for _ in range(K)]
        for i, c in enumerate(class_of):
            wi = W.weights[i]
            row = W.densities[i]
            for j, c2 in enumerate(class_of):
                mass[c][c2] += wi * W.weights[j] * row[j]
        matrix = tuple(tuple(mass[a][b] / (foot[a] * foot[b]) for b in range(K)) for a in range(K))
        return cls(class_of, tuple(foot), matrix)

    @property
    def num_classes(self) -> int:
        return len(self.class_footprint)

    def classes(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.num_classes)]
        for i, c in enumerate(self.class_of):
            out[c].append(i)
        return out

    def profile(self) -> DensityProfile:
        return DensityProfile(self.class_footprint, self.class_matrix)

    def quotient_graphon(self) -> StepGraphon:
        return StepGraphon(self.class_footprint, self.class_matrix)

    def relabeled(self, new_index: Sequence[int]) -> "WeightedEquitableCoarsening":
        """Rename class ``c`` to ``new_index[c]``."""
        K = self.num_classes
        if sorted(new_index) != list(range(K)):
            raise UsageError("new_index must be a permutation of the classes")
        old = [0] * K
        for c, nc in enumerate(new_index):
            old[nc] = c
        return WeightedEquitableCoarsening(
            tuple(new_index[c] for c in self.class_of),
            tuple(self.class_footprint[old[k]] for k in range(K)),
            tuple(tuple(self.class_matrix[old[a]][old[b]] for b in range(K)) for a in range(K)),
        )


def _degree_signature(W: StepGraphon, colors: list[int], K: int) -> list[tuple[Fraction, ...]]:
    sig = []
    for i in range(W.num_parts):
        acc = [Fraction(0)] * K
        row = W.densities[i]
        for j, c in enumerate(colors):
            acc[c] += row[j] * W.weights[j]
        sig.append(tuple(acc))
    return sig


def _close(x: tuple, y: tuple, tol) -> bool:
    return all(abs(a - b) <= tol for a, b in zip(x, y))


def _refine_round(W: StepGraphon, colors: list[int], tol) -> list[int]:
    K = max(colors) + 1
    sig = _degree_signature(W, colors, K)
    order = sorted(range(W.num_parts), key=lambda i: (colors[i], sig[i]))
    group = [0] * W.num_parts
    rep = order[0]
    g = 0
    for i in order:
        if colors[i] != colors[rep] or not _close(sig[i], sig[rep], tol):
            g += 1
            rep = i
        group[i] = g
    # number classes by first appearance in part order
    renum: dict[int, int] = {}
    return [renum.setdefault(group[i], len(renum)) for i in range(W.num_parts)]


def coarsest_equitable(W: StepGraphon, tol=DEFAULT_TOL) -> WeightedEquitableCoarsening:
    """Coarsest grouping of parts whose degrees toward every class are class-constant.

    Refinement starts from a single class and splits by degree vectors until
    stable, which takes at most ``M`` rounds.  Values closer than ``tol``
    count as equal; use ``tol=0`` for exact rational input.
    """
    if tol < 0:
        raise UsageError("tol must be nonnegative")
    colors = [0] * W.num_parts
    for _ in range(W.num_parts + 1):
        new = _refine_round(W, colors, tol)
        if max(new) == max(colors):
            break
        colors = new
    return WeightedEquitableCoarsening.from_assignment(W, colors)


@dataclass(frozen=True)
class FIMatch:
    """Outcome of a step-graphon fractional-isomorphism test.

    ``matching[c]`` is the class of the second graphon paired with class ``c``
    of the first; ``None`` when not equivalent.
    """

    equivalent: bool
    matching: tuple[int, ...] | None
    first: WeightedEquitableCoarsening
    second: WeightedEquitableCoarsening

    def __bool__(self) -> bool:
        return self.equivalent


def match_profiles(f1, m1, f2, m2, tol) -> tuple[int, ...] | None:
    """Bijection of classes matching footprints and matrices within ``tol``."""
    K = len(f1)
    if len(f2) != K:
        return None
    assign: list[int] = []
    used = [False] * K

    def fits(c: int, d: int) -> bool:
        if abs(f1[c] - f2[d]) > tol or abs(m1[c][c] - m2[d][d]) > tol:
            return False
        return all(abs(m1[c][p] - m2[d][assign[p]]) <= tol for p in range(len(assign)))

    def search(c: int) -> bool:
        if c == K:
            return True
        for d in range(K):
            if not used[d] and fits(c, d):
                used[d] = True
                assign.append(d)
                if search(c + 1):
                    return True
                assign.pop()
                used[d] = False
        return False

    return tuple(assign) if search(0) else None


def step_fi_equivalent(W1: StepGraphon, W2: StepGraphon, tol=DEFAULT_TOL) -> FIMatch:
    """Whether the quotients of ``W1`` and ``W2`` are isomorphic."""
    q1 = coarsest_equitable(W1, tol)
    q2 = coarsest_equitable(W2, tol)
    matching = match_profiles(q1.class_footprint, q1.class_matrix, q2.class_footprint, q2.class_matrix, tol)
    return FIMatch(matching is not None, matching, q1, q2)


@dataclass(frozen=True)
class CleaningResult:
    graphon: StepGraphon
    profile: RobustProfile
    l1_change: Fraction
    coarsening: WeightedEquitableCoarsening


def threshold_density(d: Fraction, beta: Fraction) -> Fraction:
    if d < beta:
        return Fraction(0)
    if d > 1 - beta:
        return 1 - beta
    return d


def clean_beta_robust(
    W: StepGraphon,
    beta,
    coarsening: WeightedEquitableCoarsening | None = None,
    reference: DensityProfile | None = None,
    tol=DEFAULT_TOL,
) -> CleaningResult:
    """Make the class density matrix beta-robust without disturbing class degrees.

    Class blocks whose density (taken from ``reference`` when given, else
    from ``W``'s own quotient) lies in [beta, 1 - beta] are kept cell for
    cell; blocks below beta become 0 and blocks above 1 - beta become the
    constant 1 - beta.  Every part then has degree exactly
    ``D[c][c'] * v[c']`` toward each class.  When classes are single parts
    this is plain entrywise thresholding.
    """
    beta = to_fraction(beta)
    if not (0 < beta < Fraction(1, 2)):
        raise UsageError(f"beta must lie in (0, 1/2), got {beta}")
    if coarsening is None:
        coarsening = coarsest_equitable(W, tol)
    if len(coarsening.class_of) != W.num_parts:
        raise UsageError("coarsening does not match the graphon's parts")
    if reference is None:
        reference = coarsening.profile()
    elif reference.size != coarsening.num_classes:
        raise UsageError("reference profile and coarsening have different class counts")
    K = reference.size
    ref = reference.matrix
    cleaned = tuple(tuple(threshold_density(ref[a][b], beta) for b in range(K)) for a in range(K))
    keep = [[beta <= ref[a][b] <= 1 - beta for b in range(K)] for a in range(K)]
    cls = coarsening.class_of
    M = W.num_parts
    rows = []
    l1 = Fraction(0)
    for i in range(M):
        row = []
        for j in range(M):
            a, b = cls[i], cls[j]
            x = W.densities[i][j] if keep[a][b] else cleaned[a][b]
            l1 += abs(W.densities[i][j] - x) * W.weights[i] * W.weights[j]
            row.append(x)
        rows.append(tuple(row))
    out = StepGraphon(W.weights, tuple(rows))
    profile = RobustProfile(DensityProfile(reference.footprint, cleaned), beta)
    return CleaningResult(out, profile, l1, coarsening)


@dataclass(frozen=True)
class PartitionReport:
    """Worst relative deviation of part degrees from class predictions."""

    worst: tuple[tuple[float, ...], ...]
    tolerance: float
    passed: bool

    def __bool__(self) -> bool:
        return self.passed


def verify_step_partition(W: StepGraphon, coarsening: WeightedEquitableCoarsening, lam) -> PartitionReport:
    """Check every part degree toward each class is within (1 +- lam) of the class value."""
    if len(coarsening.class_of) != W.num_parts:
        raise UsageError("coarsening does not match the graphon's parts")
    K = coarsening.num_classes
    colors = list(coarsening.class_of)
    sig = _degree_signature(W, colors, K)
    worst = [[0.0] * K for _ in range(K)]
    for i in range(W.num_parts):
        a = colors[i]
        for b in range(K):
            target = coarsening.class_matrix[a][b] * coarsening.class_footprint[b]
            got = sig[i][b]
            if target == 0:
                dev = 0.0 if got == 0 else float("inf")
            else:
                dev = float(abs(got - target) / target)
            worst[a][b] = max(worst[a][b], dev)
    lam = float(lam)
    passed = all(x <= lam for row in worst for x in row)
    return PartitionReport(tuple(tuple(r) for r in worst), lam, passed)
