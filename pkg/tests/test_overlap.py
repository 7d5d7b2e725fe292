"""Geometric overlap: exact depth, sampling, placement search, spectral bound."""

import math
from fractions import Fraction

import numpy as np
import pytest

from hdx.complexes import (
    bowtie,
    complete_complex,
    cycle_graph,
    from_top_cells,
    mobius_band,
    octahedron_with_pendant,
    path_graph,
)
from hdx.overlap import (
    ConstantError,
    PlacementError,
    depth_at_point,
    depth_at_rational,
    max_depth,
    max_depth_rational,
    overlap_upper_bound,
    rational_placement,
    sample_depth,
    spectral_overlap_bound,
)
from hdx.rng import derive_rng


def test_single_triangle_depth_one():
    T = from_top_cells(3, [(0, 1, 2)])
    pl = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    result = max_depth(T, pl)
    assert result.depth == 1 and result.fraction == 1.0 and result.exact


def test_path_on_line_closed_hull_convention():
    # both closed intervals contain the shared endpoint, so depth is 2 there
    P = path_graph(3)
    pl = np.array([[0.0], [1.0], [2.0]])
    result = max_depth(P, pl)
    assert result.depth == 2
    assert result.point == (1.0,)


def test_two_disjoint_triangles():
    X = from_top_cells(6, [(0, 1, 2), (3, 4, 5)])
    base = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    pl = np.vstack([base, base + 50.0])
    result = max_depth(X, pl)
    assert result.depth == 1 and result.fraction == 0.5


def test_crossing_triangles_depth_two():
    X = from_top_cells(6, [(0, 1, 2), (3, 4, 5)])
    pl = np.array(
        [[0, 0], [4, 0], [0, 4], [2, -1], [2, 3], [-1, 3]], dtype=float
    )
    assert max_depth(X, pl).depth == 2


def test_degenerate_placement_all_equal():
    X = from_top_cells(6, [(0, 1, 2), (3, 4, 5)])
    pl = np.zeros((6, 2))
    result = max_depth(X, pl)
    assert result.depth == 2  # closed hulls collapse onto the single point


def test_depth_at_point():
    T = from_top_cells(3, [(0, 1, 2)])
    pl = np.array([[0.0, 0.0], [2.0, 0.0], [0.0, 2.0]])
    assert depth_at_point(T, pl, (0.5, 0.5)).depth == 1
    assert depth_at_point(T, pl, (1.0, 1.0)).depth == 1  # boundary counts
    assert depth_at_point(T, pl, (2.0, 2.0)).depth == 0


def test_placement_validation():
    T = from_top_cells(3, [(0, 1, 2)])
    with pytest.raises(PlacementError):
        max_depth(T, np.zeros((2, 2)))
    with pytest.raises(PlacementError):
        max_depth(T, np.array([[0.0, np.inf]] * 3))


def test_exact_at_least_sampled_mobius():
    M = mobius_band()
    rng = derive_rng(100, stream=8)
    for i in range(15):
        pl = rng.standard_normal((5, 2))
        exact = max_depth(M, pl)
        sampled = sample_depth(M, pl, samples=4000, seed=i)
        assert exact.depth >= sampled.depth


def test_sampled_equals_exact_generic_corpus():
    corpus = [
        from_top_cells(3, [(0, 1, 2)]),
        from_top_cells(6, [(0, 1, 2), (3, 4, 5)]),
        bowtie(),
        from_top_cells(4, [(0, 1, 2), (1, 2, 3)]),
        from_top_cells(5, [(0, 1, 2), (0, 2, 3), (0, 3, 4)]),
    ]
    rng = derive_rng(7, stream=8)
    equal = 0
    total = 0
    for X in corpus:
        for i in range(10):
            pl = rng.standard_normal((X.n, 2))
            exact = max_depth(X, pl)
            sampled = sample_depth(X, pl, samples=4000, seed=i)
            assert exact.depth >= sampled.depth
            equal += exact.depth == sampled.depth
            total += 1
    assert equal / total >= 0.95


def test_affine_invariance_exact():
    M = mobius_band()
    rng = derive_rng(5, stream=8)
    A = [[Fraction(3), Fraction(1, 2)], [Fraction(-2), Fraction(5, 3)]]
    b = [Fraction(7, 3), Fraction(-1)]

    def apply(p):
        return (
            A[0][0] * p[0] + A[0][1] * p[1] + b[0],
            A[1][0] * p[0] + A[1][1] * p[1] + b[1],
        )

    for _ in range(5):
        pl = rng.standard_normal((5, 2))
        rat = rational_placement(pl)
        witness, depth, mask = max_depth_rational(M, rat)
        mapped = [apply(p) for p in rat]
        depth2, mask2 = depth_at_rational(M, mapped, apply(witness))
        assert depth2 == depth and mask2 == mask


def test_d1_max_depth_interval_stabbing():
    C = cycle_graph(4)
    pl = np.array([[0.0], [1.0], [2.0], [3.0]])
    # edges 01, 12, 23, 03; point 1 is in [0,1], [1,2], [0,3]
    assert max_depth(C, pl).depth == 3


def test_d3_sampled_lower_bound():
    O = octahedron_with_pendant()
    rng = derive_rng(2, stream=8)
    pl = rng.standard_normal((7, 3))
    result = max_depth(O, pl, samples=200, seed=3)
    assert not result.exact
    assert result.depth == 1  # only one tetrahedron exists


def test_overlap_upper_bound_monotone_in_iterations():
    X = from_top_cells(6, [(0, 1, 2), (3, 4, 5)])
    fractions = [
        overlap_upper_bound(X, "random", seed=13, iterations=k).fraction
        for k in (1, 5, 20)
    ]
    assert fractions[0] >= fractions[1] >= fractions[2]


def test_overlap_upper_bound_disjoint_pair():
    X = from_top_cells(6, [(0, 1, 2), (3, 4, 5)])
    result = overlap_upper_bound(X, "random", seed=13, iterations=20)
    assert result.fraction == 0.5


def test_overlap_upper_bound_deterministic():
    X = bowtie()
    a = overlap_upper_bound(X, "adversarial-descent", seed=21, iterations=10)
    b = overlap_upper_bound(X, "adversarial-descent", seed=21, iterations=10)
    assert a.fraction == b.fraction
    assert np.array_equal(a.placement, b.placement)


def test_overlap_upper_bound_descent_not_worse():
    X = bowtie()
    plain = overlap_upper_bound(X, "random", seed=21, iterations=10)
    descent = overlap_upper_bound(X, "adversarial-descent", seed=21, iterations=10)
    assert descent.fraction <= plain.fraction


def test_c4_line_upper_bound():
    C = cycle_graph(4)
    best = 1.0
    import itertools

    for perm in itertools.permutations(range(4)):
        pl = np.array([[float(perm.index(v))] for v in range(4)])
        best = min(best, max_depth(C, pl).fraction)
    assert best <= 0.75


def test_spectral_bound_complete_closed_form():
    for c_d in (0.1, 0.5, 1.0):
        for n, d in [(5, 2), (6, 2), (7, 3)]:
            K = complete_complex(n, d)
            bound = spectral_overlap_bound(K, c_d)
            closed = (c_d**d * n / (math.e ** (d + 1) * (n - d))) * c_d
            assert abs(bound.value - closed) < 1e-12
            assert not bound.vacuous


def test_spectral_bound_vacuous_cases():
    # a zero spectral gap puts the whole spectrum width in play
    M = mobius_band()
    bound = spectral_overlap_bound(M, 0.5)
    assert bound.vacuous
    # explicit width too wide for the constant
    K = complete_complex(5, 2)
    wide = spectral_overlap_bound(K, 0.5, eps=10.0, eps_prime=10.0)
    assert wide.vacuous


def test_spectral_bound_constant_validation():
    K = complete_complex(5, 2)
    with pytest.raises(ConstantError):
        spectral_overlap_bound(K, 0.0)
    with pytest.raises(ConstantError):
        spectral_overlap_bound(K, 1.5)
    with pytest.raises(ValueError):
        spectral_overlap_bound(bowtie(), 0.5)


def test_spectral_bound_d1_sanity():
    # complete graphs on a line: the spectral bound with the centerpoint
    # constant 1/2 stays below the measured overlap upper bound
    import itertools

    for n in (4, 5):
        K = complete_complex(n, 1)
        bound = spectral_overlap_bound(K, 0.5)
        best = 1.0
        for perm in itertools.permutations(range(n)):
            pl = np.array([[float(perm.index(v))] for v in range(n)])
            best = min(best, max_depth(K, pl).fraction)
        assert bound.value <= best + 1e-9
