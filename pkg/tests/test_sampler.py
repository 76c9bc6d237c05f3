import math
from fractions import Fraction
from types import SimpleNamespace

import numpy as np
import pytest

from fiforge.errors import ConcentrationFailure, UsageError
from fiforge.kernelcore import DensityProfile, FiniteGraph, RobustProfile, StepGraphon
from fiforge.sampler import check_events, sample_once, sample_with_events


def params(m, lam, delta=Fraction(1, 10**6)):
    return SimpleNamespace(m=m, lam=Fraction(lam), delta=delta)


def profile_of(W, beta=Fraction(1, 100)):
    return RobustProfile(DensityProfile(W.weights, W.densities), beta)


def test_trivial_graphons():
    assert sample_once(StepGraphon.constant(1), 4, 0).graph == FiniteGraph.complete(4)
    assert sample_once(StepGraphon.constant(0), 5, 0).graph.num_edges == 0


def test_two_cliques():
    W = StepGraphon([0.5, 0.5], [[1, 0], [0, 1]])
    for seed in range(5):
        G = sample_once(W, 6, seed)
        adj = G.graph.adjacency
        same = G.labels[:, None] == G.labels[None, :]
        assert np.array_equal(adj, same & ~np.eye(6, dtype=bool))


def test_class_labels_follow_grouping():
    W = StepGraphon([0.25, 0.25, 0.5], [[0.5] * 3] * 3)
    G = sample_once(W, 50, 1, class_of=[1, 1, 0])
    raw = sample_once(W, 50, 1)
    assert np.array_equal(G.labels, np.array([1, 1, 0])[raw.labels])
    assert G.graph == raw.graph


def test_determinism():
    W = StepGraphon([0.3, 0.7], [[0.2, 0.6], [0.6, 0.4]])
    a, b = sample_once(W, 200, 42), sample_once(W, 200, 42)
    assert a.graph == b.graph and np.array_equal(a.labels, b.labels)
    assert sample_once(W, 200, 43).graph != a.graph


def test_edge_frequency():
    d = 0.3
    W = StepGraphon.constant(d)
    trials = 10_000
    freq = sum(sample_once(W, 2, s).graph.num_edges for s in range(trials)) / trials
    assert abs(freq - d) <= 3 * math.sqrt(d * (1 - d) / trials)


def test_part_size_mean():
    W = StepGraphon([0.2, 0.8], [[0, 0], [0, 0]])
    m, trials = 10, 10_000
    sizes = np.array([sample_once(W, m, s).part_sizes[0] for s in range(trials)])
    se = math.sqrt(m * 0.2 * 0.8 / trials)
    assert abs(sizes.mean() - m * 0.2) <= 3 * se


def test_dense_graphon_accepted_first_try():
    W = StepGraphon.constant(0.9)
    prof = RobustProfile(DensityProfile([1], [[Fraction(9, 10)]]), Fraction(1, 10))
    out = sample_with_events(W, prof, params(400, Fraction(1, 5)), 0)
    assert out.attempts == 1 and out.event_report.passed


def test_constant_half_accepted_quickly():
    W = StepGraphon.constant(0.5)
    out = sample_with_events(W, profile_of(W), params(2000, Fraction(1, 20)), 0)
    assert out.attempts == 1
    re = check_events(out.graph, profile_of(W), Fraction(1, 20), Fraction(1, 10**6))
    assert re.passed and re == out.event_report


def test_budget_exhaustion_reports_best():
    # two equal classes at m = 3 can never hit the expected size 1.5
    W = StepGraphon([0.5, 0.5], [[0.5, 0.5], [0.5, 0.5]])
    prof = RobustProfile(DensityProfile([0.5, 0.5], [[0.5, 0.5], [0.5, 0.5]]), Fraction(1, 10))
    with pytest.raises(ConcentrationFailure) as info:
        sample_with_events(W, prof, params(3, Fraction(1, 10**6)), 0, max_attempts=5)
    assert info.value.attempts == 5 and info.value.best_report is not None
    assert not info.value.best_report.passed


def test_profile_mismatch_rejected():
    W = StepGraphon([0.5, 0.5], [[0.5, 0.5], [0.5, 0.5]])
    bad = RobustProfile(DensityProfile([0.4, 0.6], [[0.5, 0.5], [0.5, 0.5]]), Fraction(1, 10))
    with pytest.raises(UsageError):
        sample_with_events(W, bad, params(10, 0.1), 0)
    with pytest.raises(UsageError):
        sample_with_events(W, bad, params(10, 0.1), 0, max_attempts=0)


def test_accepted_samples_pass_recheck():
    W = StepGraphon([0.5, 0.5], [[0.6, 0.3], [0.3, 0.6]])
    prof = profile_of(W, Fraction(1, 10))
    out = sample_with_events(W, prof, params(600, Fraction(1, 5)), 3)
    # independent recomputation from the adjacency matrix
    G = out.graph
    adj = G.graph.adjacency
    for i in range(2):
        xi = np.nonzero(G.labels == i)[0]
        assert abs(len(xi) - 300) <= 0.2 * 300
        for j in range(2):
            xj = np.nonzero(G.labels == j)[0]
            deg = adj[np.ix_(xi, xj)].sum(1)
            t = float(W.densities[i][j]) * 0.5 * 600
            assert deg.min() >= (1 - 1.2) * t - 1 and deg.max() <= (1 + 1.2) * t + 1
