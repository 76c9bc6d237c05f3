"""End-to-end construction of fractionally isomorphic graphs from a graphon family.

General mode: one shared class profile is taken from the first member, every
member is cleaned against it, sampled, and padded to exact degree targets,
so all outputs share one certificate.  Regular mode does the same with a
single class and an even degree D chosen directly, giving D-regular outputs.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence

import numpy as np

from .balancer import BalancedGraph, realize_targets, regular_targets, build_balanced
from .cutmetric import DistanceReport, certified_distance_report
from .errors import (
    BalanceInfeasibleError,
    ConcentrationFailure,
    ForgeError,
    InputNotFIError,
    LayoutError,
    UsageError,
)
from .fintest import FICertificate, fractionally_isomorphic
from .kernelcore import DEFAULT_TOL, DensityProfile, FiniteGraph, PartitionedGraph, RobustProfile, StepGraphon, to_fraction
from .params import PipelineParams, choose_gamma, derive_params, setup_violations
from .quotient import CleaningResult, WeightedEquitableCoarsening, clean_beta_robust, coarsest_equitable, step_fi_equivalent
from .sampler import SampleOutcome, sample_with_events

log = logging.getLogger(__name__)

AUTO_N = 2100
_RETRYABLE = (ConcentrationFailure, BalanceInfeasibleError, LayoutError)


@dataclass
class RunConfig:
    family: list
    epsilon: Fraction
    n: int | str = "auto"
    mode: str = "general"
    seed: int = 0
    param_mode: str = "practical"
    strict: bool = False
    params_override: dict | None = None
    sampler_budget: int = 100
    family_budget: int = 5
    even_diagonal: bool = False
    recipe: str = "calibrated"
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        if not self.family:
            raise UsageError("family must be nonempty")
        self.family = [W if isinstance(W, StepGraphon) else StepGraphon(*W) for W in self.family]
        self.epsilon = to_fraction(self.epsilon)
        if not (0 < self.epsilon < 1):
            raise UsageError("epsilon must lie in (0, 1)")
        if self.n == "auto":
            self.n = AUTO_N
        if not isinstance(self.n, (int, np.integer)) or self.n < 10:
            raise UsageError("n must be an integer >= 10 or 'auto'")
        if self.mode not in ("general", "regular"):
            raise UsageError("mode must be 'general' or 'regular'")
        if self.sampler_budget < 1 or self.family_budget < 1:
            raise UsageError("budgets must be positive")


@dataclass
class MemberResult:
    index: int
    balanced: BalancedGraph
    sample: SampleOutcome | None
    cleaning: CleaningResult
    report: DistanceReport | None
    tries: int

    @property
    def graph(self) -> PartitionedGraph:
        return self.balanced.graph

    @property
    def certificate(self) -> FICertificate:
        return self.balanced.certificate


@dataclass
class RunResult:
    members: list[MemberResult]
    params: PipelineParams
    verdicts: list[list[bool]]
    mode: str
    shared_profile: DensityProfile
    notes: list[str] = field(default_factory=list)

    @property
    def certificates_identical(self) -> bool:
        return len({m.certificate for m in self.members}) == 1

    @property
    def success(self) -> bool:
        return self.certificates_identical and all(all(r) for r in self.verdicts)

    @property
    def certificate(self) -> FICertificate:
        return self.members[0].certificate

    def regular_degree(self) -> int | None:
        degs = {int(d) for m in self.members for d in m.graph.graph.degrees()}
        return degs.pop() if len(degs) == 1 else None

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "success": self.success,
            "certificates_identical": self.certificates_identical,
            "verdicts": self.verdicts,
            "params": self.params.to_dict(),
            "notes": self.notes,
            "members": [
                {
                    "index": m.index,
                    "n": m.graph.graph.n,
                    "edges": m.graph.graph.num_edges,
                    "tries": m.tries,
                    "sampler_attempts": m.sample.attempts if m.sample else 0,
                    "seed": m.sample.seed if m.sample else None,
                    "events": m.sample.event_report.to_dict() if m.sample else None,
                    "deleted_edges": m.balanced.deleted_edges,
                    "added_edges": m.balanced.added_edges,
                    "distance": m.report.to_dict() if m.report else None,
                }
                for m in self.members
            ],
        }


def _resolve_params(config: RunConfig, num_classes: int) -> PipelineParams:
    params = derive_params(
        config.epsilon, int(config.n), config.param_mode, num_classes, config.strict,
        config.recipe, config.even_diagonal,
    )
    if config.params_override:
        over = dict(config.params_override)
        for k in ("beta", "lam", "delta", "alpha"):
            if k in over:
                over[k] = to_fraction(over[k])
        params = replace(params, **over)
        params = replace(
            params, violations=tuple(setup_violations(params.beta, params.lam, params.delta, params.alpha, num_classes, params.m))
        )
    return params


def _member_seed(seed: int, k: int) -> int:
    return seed ^ (k << 20)


def _tag(err: ForgeError, k: int) -> ForgeError:
    err.member = k
    if err.args:
        err.args = (f"member {k}: {err.args[0]}",) + err.args[1:]
    return err


def _aligned_coarsening(first: StepGraphon, W: StepGraphon, k: int, tol) -> WeightedEquitableCoarsening:
    match = step_fi_equivalent(first, W, tol)
    if not match:
        q1, q2 = match.first, match.second
        raise InputNotFIError(
            f"member {k} is not fractionally isomorphic to member 0: quotient footprint "
            f"{[float(x) for x in q2.class_footprint]} with densities "
            f"{[[float(x) for x in r] for r in q2.class_matrix]} vs "
            f"{[float(x) for x in q1.class_footprint]} with densities "
            f"{[[float(x) for x in r] for r in q1.class_matrix]}",
            k,
        )
    # class d of W corresponds to class c of the shared profile when matching[c] = d
    new_index = [0] * len(match.matching)
    for c, d in enumerate(match.matching):
        new_index[d] = c
    return match.second.relabeled(new_index)


def _pairwise_verdicts(members: Sequence[MemberResult]) -> list[list[bool]]:
    k = len(members)
    out = [[True] * k for _ in range(k)]
    for a in range(k):
        for b in range(a + 1, k):
            same = fractionally_isomorphic(members[a].graph.graph, members[b].graph.graph)
            out[a][b] = out[b][a] = same
    return out


def _with_retries(config: RunConfig, k: int, build):
    last = None
    for r in range(config.family_budget):
        seed = _member_seed(config.seed, k) + r * config.sampler_budget
        try:
            return build(seed), r + 1
        except _RETRYABLE as e:
            log.info("member %d try %d failed: %s", k, r + 1, e)
            last = e
    raise _tag(last, k)


def run(config: RunConfig) -> RunResult:
    """General mode: shared profile from member 0, then clean, sample and balance each member."""
    if config.mode == "regular":
        return run_regular(config)
    first = config.family[0]
    q0 = coarsest_equitable(first, config.tol)
    shared = q0.profile()
    coarsenings = [q0] + [_aligned_coarsening(first, W, k, config.tol) for k, W in enumerate(config.family[1:], 1)]
    params = _resolve_params(config, q0.num_classes)
    notes = [f"setup violation: {v}" for v in params.violations]
    K = shared.size
    on = [shared.footprint[i] >= params.delta / K for i in range(K)]
    if params.gamma is None:
        params = params.with_gamma(choose_gamma(shared.footprint, params, on))
    n = int(config.n)
    members = []
    for k, (W, q) in enumerate(zip(config.family, coarsenings)):
        cleaning = clean_beta_robust(W, params.beta, q, shared, config.tol)

        def build(seed, q=q, cleaning=cleaning):
            sample = sample_with_events(cleaning.graphon, cleaning.profile, params, seed, config.sampler_budget, q.class_of)
            return sample, build_balanced(sample.graph, cleaning.profile, params, n)

        (sample, balanced), tries = _with_retries(config, k, build)
        report = certified_distance_report(W, balanced.graph, balanced.certificate, cleaning, balanced)
        members.append(MemberResult(k, balanced, sample, cleaning, report, tries))
    return RunResult(members, params, _pairwise_verdicts(members), "general", shared, notes)


def _trivial_regular(n: int, d: Fraction, W: StepGraphon, q, profile, k: int, params) -> MemberResult:
    from .balancer import BufferLayout, TargetDegreeMatrix

    g = FiniteGraph.empty(n) if d == 0 else FiniteGraph.complete(n)
    D = 0 if d == 0 else n - 1
    targets = TargetDegreeMatrix(((Fraction(D, n),),), ((D,),), (n,), (True,), ((d,),), None)
    labels = np.ones(n, dtype=np.int64)
    G = PartitionedGraph(g, labels, 2)
    cert = FICertificate((0, n), ((0, 0), (0, D)), "layout")
    layout = BufferLayout((np.arange(n),), (np.arange(0),), np.arange(0), (np.arange(0),), n)
    balanced = BalancedGraph(G, cert, targets, layout, n, 0, {})
    cleaning = CleaningResult(W, profile, Fraction(0), q)
    return MemberResult(k, balanced, None, cleaning, None, 0)


def run_regular(config: RunConfig) -> RunResult:
    """Regular mode: every member's quotient must be one class of common density d."""
    quotients = [coarsest_equitable(W, config.tol) for W in config.family]
    for k, q in enumerate(quotients):
        if q.num_classes != 1:
            raise UsageError(f"member {k} has {q.num_classes} quotient classes; regular mode needs 1, use general mode")
    d = quotients[0].class_matrix[0][0]
    for k, q in enumerate(quotients[1:], 1):
        if abs(q.class_matrix[0][0] - d) > config.tol:
            raise InputNotFIError(f"member {k} has degree {float(q.class_matrix[0][0])}, member 0 has {float(d)}", k)
    n = int(config.n)
    params = _resolve_params(config, 1)
    notes = [f"setup violation: {v}" for v in params.violations]
    shared = DensityProfile((Fraction(1),), ((d,),))
    members = []
    if d in (0, 1):
        members = [_trivial_regular(n, d, W, q, shared, k, params) for k, (W, q) in enumerate(zip(config.family, quotients))]
        return RunResult(members, params, _pairwise_verdicts(members), "regular", shared, notes)
    profile = RobustProfile(shared, min(params.beta, d, 1 - d))
    targets = regular_targets(d, params.m, n)
    for k, (W, q) in enumerate(zip(config.family, quotients)):
        cleaning = CleaningResult(W, profile, Fraction(0), q)

        def build(seed, W=W, q=q):
            sample = sample_with_events(W, profile, params, seed, config.sampler_budget, q.class_of)
            return sample, realize_targets(sample.graph, targets, n)

        (sample, balanced), tries = _with_retries(config, k, build)
        report = certified_distance_report(W, balanced.graph, balanced.certificate, cleaning, balanced)
        members.append(MemberResult(k, balanced, sample, cleaning, report, tries))
    result = RunResult(members, params, _pairwise_verdicts(members), "regular", shared, notes)
    if result.regular_degree() is None:
        raise AssertionError("regular mode produced a graph that is not regular")
    return result
