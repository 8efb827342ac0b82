import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gbica.bica_exact import branch_and_bound_optimal, product_probs
from gbica.bica_relax import (
    build_phi_bound,
    build_pwl_bound,
    coefficient_rows,
    objective_descent_qary,
    pwl_objective,
    qary_cost,
    region_assignments,
    relaxed_bica_binary,
    slope_matrix,
    unique_coefficients,
)
from gbica.probability import JointDistribution, binary_entropy, gen_zipf
from gbica.transforms import PermutationTransform, cost

HB_QUARTER = 0.811278124459132863909695792039
GRID = np.linspace(0, 0.5, 100_001)


def simplex(rng, d):
    return JointDistribution(rng.dirichlet(np.ones(1 << d)))


class TestBound:
    def test_one_chord(self):
        b = build_pwl_bound(1, "chord")
        assert np.allclose(b(GRID), 2 * GRID)

    def test_two_chords(self):
        b = build_pwl_bound(2, "chord")
        assert np.allclose(b(np.array([0, 0.25, 0.5])), [0, HB_QUARTER, 1], atol=1e-12)

    @pytest.mark.parametrize("k", [1, 2, 4, 8, 16])
    def test_tangent_bounds_from_above(self, k):
        b = build_pwl_bound(k)
        assert np.all(b(GRID) >= binary_entropy(GRID) - 1e-12)

    def test_tangent_gap_k8(self):
        gap = build_pwl_bound(8)(GRID) - binary_entropy(GRID)
        assert gap.max() <= 0.011

    def test_chord_is_below(self):
        b = build_pwl_bound(8, "chord")
        assert np.all(b(GRID) <= binary_entropy(GRID) + 1e-12)

    def test_phi_bound(self):
        p = np.linspace(0, 1, 10_001)
        phi = np.where(p > 0, -p * np.log2(np.where(p > 0, p, 1)), 0.0)
        assert np.all(build_phi_bound(8)(p) >= phi - 1e-12)


class TestCoefficients:
    def test_worked_slope_matrix(self):
        b = build_pwl_bound(4)
        a1, a2 = b.slopes[0], b.slopes[1]
        want = np.array([[a1, a1, a2], [a1, a1, 0], [a1, 0, a2], [a1, 0, 0],
                         [0, a1, a2], [0, a1, 0], [0, 0, a2], [0, 0, 0]])
        got = slope_matrix(3, [0, 0, 1], b)
        assert np.allclose(got, want)
        sums = [2 * a1 + a2, 2 * a1, a1 + a2, a1, a1 + a2, a1, a2, 0]
        assert np.allclose(got.sum(axis=1), sums)

    def test_single_piece(self):
        b = build_pwl_bound(1)
        assign, rows = coefficient_rows(3, 1, b)
        assert assign.shape == (1, 3)
        assert unique_coefficients(rows[0]).size <= 4

    @pytest.mark.parametrize("d,k", [(3, 2), (5, 3), (6, 4), (8, 2)])
    def test_assignment_count_and_unique(self, d, k):
        b = build_pwl_bound(k)
        assign, rows = coefficient_rows(d, k, b)
        assert assign.shape[0] == math.comb(d + k - 1, k - 1)
        assert region_assignments(d, k).shape == assign.shape
        for a, row in zip(assign, rows):
            counts = np.bincount(a, minlength=k)
            assert unique_coefficients(row).size <= np.prod(counts + 1)
            assert np.prod(counts + 1) - 1 <= (d / k + 1) ** k

    def test_filter_soundness(self):
        # evaluating each component on the piece it actually falls in never
        # exceeds the value under an assumed (possibly wrong) piece
        rng = np.random.default_rng(0)
        b = build_pwl_bound(4)
        assign, rows = coefficient_rows(3, 4, b)
        for _ in range(10):
            dist = simplex(rng, 3)
            p_desc = np.sort(dist.probs)[::-1]
            for a, row in zip(assign, rows):
                order = row.size - 1 - np.argsort(row[::-1], kind="stable")
                table = np.empty(8, dtype=np.int64)
                table[np.argsort(-dist.probs, kind="stable")] = order
                placed = np.empty(8)
                placed[order] = p_desc
                assumed = row @ placed + b.intercepts[a].sum()
                assert pwl_objective(dist, PermutationTransform(table), b) <= assumed + 1e-12


class TestRelaxed:
    def test_uniform(self):
        for k in (1, 2, 8):
            t, c, pi = relaxed_bica_binary(JointDistribution(np.full(16, 1 / 16)), k=k)
            assert c == pytest.approx(0, abs=1e-12)
            assert np.allclose(pi, 0.5)

    def test_product_recovery_rate(self):
        rng = np.random.default_rng(7)
        trials, hits = 20, 0
        for _ in range(trials):
            pi_true = rng.uniform(0, 0.5, 10)
            p = product_probs(pi_true)
            dist = JointDistribution(p[rng.permutation(p.size)])
            _, _, pi = relaxed_bica_binary(dist, k=8)
            pi = np.sort(np.minimum(pi, 1 - pi))
            hits += np.allclose(pi, np.sort(pi_true), atol=1e-6)
        assert hits >= 0.9 * trials

    def test_d3_against_optimum(self):
        rng = np.random.default_rng(8)
        for _ in range(50):
            dist = simplex(rng, 3)
            _, c, _ = relaxed_bica_binary(dist, k=8)
            opt = branch_and_bound_optimal(dist)[1]
            assert opt - 1e-12 <= c <= opt + 0.05

    @given(st.integers(1, 6), st.integers(0, 2 ** 32 - 1))
    @settings(max_examples=40, deadline=None)
    def test_true_cost_below_bound(self, d, seed):
        dist = simplex(np.random.default_rng(seed), d)
        b = build_pwl_bound(8)
        t, c, _ = relaxed_bica_binary(dist, k=8)
        assert c == pytest.approx(cost(dist, t), abs=1e-12)
        assert c + dist.entropy() <= pwl_objective(dist, t, b) + 1e-10

    def test_monotone_in_k(self):
        rng = np.random.default_rng(9)
        c2, c8 = [], []
        for _ in range(200):
            dist = simplex(rng, 6)
            c2.append(relaxed_bica_binary(dist, k=2)[1])
            c8.append(relaxed_bica_binary(dist, k=8)[1])
        assert np.mean(c8) <= np.mean(c2)


class TestDescent:
    def test_binary_not_better_than_exhaustive(self):
        rng = np.random.default_rng(10)
        for _ in range(10):
            dist = simplex(rng, 5)
            relaxed = relaxed_bica_binary(dist, k=8, refine=False)[1]
            few = objective_descent_qary(dist, q=2, n_init=3, rng=1)[1]
            many = objective_descent_qary(dist, q=2, n_init=150, rng=1)[1]
            assert few >= relaxed - 1e-12 and many >= relaxed - 1e-12
            assert many <= few + 1e-12

    def test_trace_non_increasing(self):
        dist = simplex(np.random.default_rng(11), 6)
        _, _, traces = objective_descent_qary(dist, q=2, n_init=10, rng=2, return_trace=True)
        for tr in traces:
            assert all(b <= a + 1e-12 for a, b in zip(tr, tr[1:]))

    def test_nonlinear_mixture_separation(self):
        z = gen_zipf(4, 1.6).probs
        joint = np.zeros(16)
        for a in range(4):
            for b in range(4):
                joint[4 * a + (a + b) % 4] += z[a] * z[b]
        rng = np.random.default_rng(12)
        dist = JointDistribution(joint[rng.permutation(16)], q=4)
        t, c = objective_descent_qary(dist, rng=3)
        assert c <= 0.05
        assert c == pytest.approx(qary_cost(dist, t), abs=1e-12)
