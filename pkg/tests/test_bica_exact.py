import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gbica.bica_exact import (
    NotDecomposable,
    branch_and_bound_optimal,
    exhaustive_optimum,
    product_probs,
    recover_independent_components,
)
from gbica.probability import JointDistribution, entropy
from gbica.transforms import PermutationTransform, apply, cost, order_permutation


def scrambled_product(pi, rng):
    p = product_probs(pi)
    return JointDistribution(p[rng.permutation(p.size)])


class TestRecover:
    def test_single_bit(self):
        pi, t = recover_independent_components(JointDistribution([0.3, 0.7]))
        assert np.allclose(pi, [0.3])

    def test_three_bits(self):
        rng = np.random.default_rng(0)
        dist = scrambled_product([0.1, 0.2, 0.3], rng)
        pi, t = recover_independent_components(dist)
        assert np.allclose(np.sort(pi), [0.1, 0.2, 0.3], atol=1e-12)
        assert cost(dist, t) == pytest.approx(0, abs=1e-12)

    def test_equal_parameters(self):
        pi, _ = recover_independent_components(JointDistribution(product_probs([0.25, 0.25])))
        assert np.allclose(pi, [0.25, 0.25])

    @given(st.integers(1, 10), st.integers(0, 2 ** 32 - 1))
    @settings(max_examples=60, deadline=None)
    def test_roundtrip(self, d, seed):
        rng = np.random.default_rng(seed)
        pi_true = rng.uniform(0.02, 0.5, d)
        dist = scrambled_product(pi_true, rng)
        pi, t = recover_independent_components(dist)
        assert np.all(np.diff(pi) <= 0) and np.all(pi <= 0.5)
        assert np.allclose(np.sort(pi), np.sort(pi_true), atol=1e-9)
        assert np.allclose(apply(t, dist).probs, product_probs(pi), atol=1e-12)

    def test_not_decomposable(self):
        with pytest.raises(NotDecomposable):
            recover_independent_components(JointDistribution([0.1, 0.2, 0.3, 0.4]))
        with pytest.raises(NotDecomposable):
            recover_independent_components(JointDistribution([0.0, 0.5, 0.5, 0.0]))


def simplex(rng, d):
    return JointDistribution(rng.dirichlet(np.ones(1 << d)))


class TestBranchAndBound:
    def test_d2_ascending(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            dist = simplex(rng, 2)
            t, c = branch_and_bound_optimal(dist)
            assert np.array_equal(apply(t, dist).probs, np.sort(dist.probs))
            assert c == pytest.approx(cost(dist, order_permutation(dist)), abs=1e-12)

    def test_d3_matches_exhaustive(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            dist = simplex(rng, 3)
            t, c = branch_and_bound_optimal(dist)
            best = exhaustive_optimum(dist)
            assert c == pytest.approx(best, abs=1e-10)
            assert cost(dist, t) == pytest.approx(c, abs=1e-12)

    def test_product_zero(self):
        rng = np.random.default_rng(3)
        dist = scrambled_product([0.1, 0.3, 0.45], rng)
        assert branch_and_bound_optimal(dist)[1] == pytest.approx(0, abs=1e-12)

    @given(st.integers(1, 4), st.integers(0, 2 ** 32 - 1))
    @settings(max_examples=40, deadline=None)
    def test_ordering_of_costs(self, d, seed):
        dist = simplex(np.random.default_rng(seed), d)
        _, c = branch_and_bound_optimal(dist)
        order = cost(dist, order_permutation(dist))
        assert c <= order + 1e-12 <= cost(dist) + 2e-12

    def test_pruning_does_not_change_result(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            dist = simplex(rng, 3)
            assert branch_and_bound_optimal(dist)[1] == pytest.approx(
                branch_and_bound_optimal(dist, prune=False)[1], abs=1e-12)

    def test_dominance_order_at_optimum(self):
        # a word whose zeros include another word's zeros gets no more probability
        rng = np.random.default_rng(5)
        for _ in range(20):
            dist = simplex(rng, 3)
            t, _ = branch_and_bound_optimal(dist)
            y = apply(t, dist).probs
            for a in range(8):
                for b in range(8):
                    if a & b == a:
                        assert y[a] <= y[b] + 1e-15

    def test_limit(self):
        with pytest.raises(ValueError):
            branch_and_bound_optimal(JointDistribution(np.full(32, 1 / 32)), limit=4)
