from fractions import Fraction

import numpy as np
import pytest

from fiforge.balancer import (
    TargetDegreeMatrix,
    build_balanced,
    gamma_round_matrix,
    make_layout,
    plan_targets,
    realize_targets,
    regular_targets,
    verify_certificate,
)
from fiforge.errors import LayoutError, UsageError
from fiforge.fintest import FICertificate, coarsest_equitable_graph, fractionally_isomorphic
from fiforge.kernelcore import DensityProfile, FiniteGraph, PartitionedGraph, RobustProfile, StepGraphon
from fiforge.params import choose_gamma, derive_params
from fiforge.quotient import clean_beta_robust
from fiforge.sampler import sample_once, sample_with_events

A, B = Fraction(1, 10), Fraction(1, 5)


def test_gamma_round_examples():
    # ceil(100 * 1.1/1.2 * 0.53) / 100 = ceil(48.58...) / 100
    assert gamma_round_matrix([[0, 0.53], [0.53, 0]], A, B, 100)[0][1] == Fraction(49, 100)
    assert gamma_round_matrix([[0.53]], A, B, 100, even_diagonal=True) == ((Fraction(1, 2),),)
    assert gamma_round_matrix([[0.53]], A, B, 100) == ((Fraction(49, 100),),)
    assert gamma_round_matrix([[0]], A, B, 100) == ((0,),)
    with pytest.raises(UsageError):
        gamma_round_matrix([[0.5]], A, B, 7)
    with pytest.raises(UsageError):
        gamma_round_matrix([[0.5]], 0, B, 10)


def test_gamma_round_is_exact_ceiling():
    rng = np.random.default_rng(0)
    for _ in range(200):
        d = Fraction(int(rng.integers(0, 1000)), 1000)
        g = 2 * int(rng.integers(1, 200))
        x = gamma_round_matrix([[d]], A, B, g)[0][0]
        scaled = d * (1 + A) / (1 + B)
        assert x * g == int(x * g) and scaled <= x < scaled + Fraction(1, g)


def test_verify_certificate_examples():
    C6 = FiniteGraph.cycle(6)
    G = PartitionedGraph(C6, np.zeros(6, dtype=int), 1)
    assert verify_certificate(G, FICertificate((6,), ((2,),)))
    bent = FiniteGraph.from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 2)])
    assert not verify_certificate(PartitionedGraph(bent, np.zeros(6, dtype=int), 1), FICertificate((6,), ((2,),)))
    assert not verify_certificate(G, FICertificate((3, 3), ((1, 1), (1, 1))))


def test_target_matrix_validation():
    with pytest.raises(UsageError):
        TargetDegreeMatrix(((Fraction(1, 2), 0), (0, Fraction(1, 2))), ((2, 1), (1, 2)), (4, 4), (True, True), ((0, 0), (0, 0)))
    with pytest.raises(UsageError):
        # double counting fails: 1 * 4 != 1 * 6
        TargetDegreeMatrix(((0, Fraction(1, 6)), (Fraction(1, 6), 0)), ((0, 1), (1, 0)), (4, 6), (True, True), ((0, 0), (0, 0)))


def two_class_setup(seed=0):
    W = StepGraphon([0.5, 0.5], [[0.7, 0.3], [0.3, 0.6]])
    p = derive_params(0.5, 2100, num_parts=2)
    cl = clean_beta_robust(W, p.beta)
    p = p.with_gamma(choose_gamma(cl.profile.footprint, p))
    s = sample_with_events(cl.graphon, cl.profile, p, seed)
    return cl, p, s


def test_end_to_end_two_classes():
    cl, p, s = two_class_setup()
    bal = build_balanced(s.graph, cl.profile, p, 2100)
    G = bal.graph
    assert G.graph.n == 2100
    assert verify_certificate(G, bal.certificate)
    # F sits unchanged on the first m vertices
    assert np.array_equal(G.graph.adjacency[: p.m, : p.m], s.graph.graph.adjacency)
    assert bal.deleted_edges == 0
    added = G.graph.num_edges - s.graph.graph.num_edges
    assert added == sum(bal.added_edges.values())
    # first-step additions equal the total deficit sum(a) over X
    T = bal.targets
    deficit = 0
    for i in range(2):
        xi = bal.layout.X[i]
        for j in range(2):
            deficit += int((T.degrees[i][j] - s.graph.graph.adjacency[np.ix_(xi, bal.layout.X[j])].sum(1)).sum())
    assert bal.added_edges["first"] == deficit
    # the coarsest certificate of G is at most as fine as the layout one
    _, coarse = coarsest_equitable_graph(G.graph)
    assert coarse.num_parts <= bal.certificate.num_parts


def test_members_with_same_targets_are_fi():
    cl, p, s0 = two_class_setup(0)
    _, _, s1 = two_class_setup(11)
    g0 = build_balanced(s0.graph, cl.profile, p, 2100)
    g1 = build_balanced(s1.graph, cl.profile, p, 2100)
    assert g0.certificate == g1.certificate
    assert fractionally_isomorphic(g0.graph.graph, g1.graph.graph)


def test_double_counting_identity():
    cl, p, _ = two_class_setup()
    T = plan_targets(cl.profile, p)
    for i in range(2):
        for j in range(2):
            assert T.degrees[i][j] * T.part_sizes[i] == T.degrees[j][i] * T.part_sizes[j]
            assert T.degrees[i][j] == T.dstar[i][j] * T.part_sizes[j]
    assert all(s % T.gamma == 0 for s in T.part_sizes)


def test_sub_threshold_cluster_is_isolated():
    m, n = 400, 500
    base = sample_once(StepGraphon.constant(0.5), m, 1)
    labels = np.ones(m, dtype=int)
    labels[0] = 0
    F = PartitionedGraph(base.graph, labels, 2)
    beta = Fraction(1, 4)
    prof = RobustProfile(DensityProfile([Fraction(1, 10**6), 1 - Fraction(1, 10**6)], [[0, Fraction(1, 2)], [Fraction(1, 2), Fraction(1, 2)]]), beta)
    on = (False, True)
    degs = ((0, 0), (0, 236))
    T = TargetDegreeMatrix(((0, 0), (0, Fraction(236, 480))), degs, (0, 480), on, prof.matrix)
    bal = realize_targets(F, T, n)
    assert bal.deleted_edges == base.graph.degrees()[0]
    assert 0 in bal.layout.Z0
    assert bal.graph.graph.degrees()[0] == 0
    assert verify_certificate(bal.graph, bal.certificate)
    assert bal.certificate.part_sizes == (20, 0, 480)


def test_layout_overflow_raises():
    F = sample_once(StepGraphon.constant(0.5), 100, 0)
    T = TargetDegreeMatrix(((Fraction(1, 2),),), ((40,),), (80,), (True,), ((Fraction(1, 2),),))
    with pytest.raises(LayoutError):
        make_layout(F, T, 120)
    with pytest.raises(LayoutError):
        build_balanced(F, RobustProfile(DensityProfile([1], [[Fraction(1, 2)]]), B), derive_params(0.5, 110), 110)


def test_regular_targets():
    T = regular_targets(Fraction(1, 2), 2000, 2100)
    D = T.degrees[0][0]
    assert D % 2 == 0 and T.part_sizes == (2100,)
    # window centre (m d (m-1) - Y(Y-1)/2) / (m - Y) = 1049.5
    assert D == 1050
    with pytest.raises(LayoutError):
        regular_targets(Fraction(1, 2), 100, 100)
    with pytest.raises(UsageError):
        regular_targets(1, 100, 150)


def test_regular_build_is_regular():
    m, n = 1000, 1250
    F = sample_once(StepGraphon.constant(0.5), m, 5)
    bal = realize_targets(F, regular_targets(Fraction(1, 2), m, n), n)
    deg = bal.graph.graph.degrees()
    assert (deg == deg[0]).all() and deg[0] == bal.targets.degrees[0][0]
