import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gbica.probability import (
    JointDistribution,
    binary_entropy,
    entropy,
    marginal_bit_probs,
    sum_marginal_entropies,
    uniform_simplex_batch,
)
from gbica.theory import (
    avg_case_cost_bound,
    avg_case_marginal_bound,
    digamma,
    expected_joint_entropy,
    expected_order_stat,
    expected_order_stats,
    harmonic,
    marginal_bound_argument,
    worst_case_cost,
    worst_case_distribution,
    worst_case_limit,
)
from gbica.transforms import (
    PermutationTransform,
    apply,
    block_order_permutation,
    cost,
    decode_descriptor,
    encode_descriptor,
    invert,
    linear_transform,
    order_permutation,
)

# 30-digit mpmath evaluations of the closed forms
E_H_2 = 0.721347520444481703680612365136          # (psi(3) - psi(2)) / ln 2
PSI2_LN2 = 0.609948863612098037897452563590       # psi(2) / ln 2
LSB_ARG = 0.153426409720027345291384475871        # 1/2 ln(1/2) + 1/2
LSB_BOUND = 0.618348885688097416658398040098      # h_b(LSB_ARG)
WORST_8 = 0.253318845797024357153813926064        # 3 h_b(4/21) - H(worst(8))
WORST_LIMIT = 0.316689088315092306898536829440    # h_b(1/6) - 1/3
SUM_10_BOUNDS = 9.4062647                          # sum of the ten per-bit bounds


def random_dist(rng, d):
    return JointDistribution(rng.dirichlet(np.ones(1 << d)))


def random_perm(rng, m):
    return PermutationTransform(rng.permutation(m))


@st.composite
def dist_and_perm(draw, max_d=5):
    d = draw(st.integers(1, max_d))
    seed = draw(st.integers(0, 2 ** 32 - 1))
    rng = np.random.default_rng(seed)
    alpha = draw(st.sampled_from([0.05, 0.3, 1.0, 5.0]))
    return JointDistribution(rng.dirichlet(np.full(1 << d, alpha))), random_perm(rng, 1 << d)


class TestOrderPermutation:
    def test_sorted_input_is_identity(self):
        p = np.arange(1, 9) / 36
        t = order_permutation(JointDistribution(p))
        assert np.array_equal(t.table, np.arange(8))

    def test_codewords_carry_ascending_probs(self):
        rng = np.random.default_rng(0)
        p = np.arange(1, 9) / 36
        q = rng.permutation(p)
        y = apply(order_permutation(JointDistribution(q)), JointDistribution(q))
        assert np.array_equal(y.probs, p)

    def test_small_example_improves(self):
        dist = JointDistribution([0.4, 0.1, 0.3, 0.2])
        assert cost(dist, order_permutation(dist)) <= cost(dist) + 1e-15

    def test_ties_by_index(self):
        t = order_permutation(JointDistribution([0.25, 0.25, 0.25, 0.25]))
        assert np.array_equal(t.table, np.arange(4))

    @given(dist_and_perm())
    @settings(max_examples=100, deadline=None)
    def test_msb_is_smallest_half(self, dp):
        dist, _ = dp
        y = apply(order_permutation(dist), dist)
        half = np.sort(dist.probs)[: dist.m // 2].sum()
        assert marginal_bit_probs(y)[0] == pytest.approx(half, abs=1e-12)


class TestBlockOrder:
    def test_full_block_equals_order(self):
        rng = np.random.default_rng(1)
        for d in (2, 3, 5):
            dist = random_dist(rng, d)
            assert np.array_equal(block_order_permutation(dist, d).table,
                                  order_permutation(dist).table)

    def test_worked_table(self):
        p = np.arange(1, 9) / 36
        labels = [6, 3, 1, 8, 2, 5, 4, 7]
        dist = JointDistribution(p[np.array(labels) - 1])
        y = apply(block_order_permutation(dist, 2), dist)
        want = [1, 3, 6, 8, 2, 4, 5, 7]
        assert np.allclose(y.probs, p[np.array(want) - 1])

    def test_pairs(self):
        rng = np.random.default_rng(2)
        dist = random_dist(rng, 4)
        y = apply(block_order_permutation(dist, 1), dist).probs
        assert np.all(y[0::2] <= y[1::2])

    @given(dist_and_perm(), st.integers(1, 5))
    @settings(max_examples=100, deadline=None)
    def test_stays_in_block(self, dp, b):
        dist, _ = dp
        b = min(b, dist.d)
        t = block_order_permutation(dist, b)
        assert np.array_equal(t.table >> b, np.arange(dist.m) >> b)


class TestApplyCost:
    @given(dist_and_perm())
    @settings(max_examples=150, deadline=None)
    def test_roundtrip_and_entropy(self, dp):
        dist, t = dp
        y = apply(t, dist)
        assert np.array_equal(apply(invert(t), y).probs, dist.probs)
        assert entropy(y) == pytest.approx(entropy(dist), abs=1e-10)
        assert cost(dist, t) >= -1e-10

    def test_identity(self):
        dist = JointDistribution([0.1, 0.2, 0.3, 0.4])
        assert np.array_equal(apply(PermutationTransform.identity(4), dist).probs, dist.probs)

    def test_trivial_costs(self):
        rng = np.random.default_rng(3)
        uni = JointDistribution(np.full(16, 1 / 16))
        point = np.zeros(16)
        point[9] = 1
        for _ in range(5):
            t = random_perm(rng, 16)
            assert cost(uni, t) == pytest.approx(0, abs=1e-12)
            assert cost(JointDistribution(point), t) == pytest.approx(0, abs=1e-12)

    def test_product_has_zero_cost(self):
        q = np.array([0.2, 0.7, 0.45])
        probs = np.ones(8)
        for w in range(8):
            for j in range(3):
                bit = (w >> (2 - j)) & 1
                probs[w] *= q[j] if bit == 0 else 1 - q[j]
        assert cost(JointDistribution(probs)) == pytest.approx(0, abs=1e-12)

    @given(dist_and_perm())
    @settings(max_examples=60, deadline=None)
    def test_cost_invariant_to_bit_flips_and_shuffles(self, dp):
        dist, _ = dp
        d = dist.d
        base = cost(dist, order_permutation(dist))
        rng = np.random.default_rng(d)
        flip = int(rng.integers(0, 1 << d))
        perm = rng.permutation(d)
        words = order_permutation(dist).table ^ flip
        shuffled = np.zeros_like(words)
        for j in range(d):
            shuffled |= ((words >> (d - 1 - j)) & 1) << (d - 1 - int(perm[j]))
        assert cost(dist, PermutationTransform(shuffled)) == pytest.approx(base, abs=1e-10)

    def test_worst_case_cost(self):
        dist = worst_case_distribution(8)
        assert cost(dist, order_permutation(dist)) == pytest.approx(WORST_8, abs=1e-10)
        assert worst_case_cost(8) == pytest.approx(WORST_8, abs=1e-10)


class TestDescriptors:
    @given(dist_and_perm(max_d=6), st.sampled_from(["explicit", "order", "block"]))
    @settings(max_examples=80, deadline=None)
    def test_roundtrip(self, dp, kind):
        dist, t = dp
        if kind == "order":
            t = order_permutation(dist)
        elif kind == "block":
            t = block_order_permutation(dist, max(1, dist.d - 1))
        back = decode_descriptor(encode_descriptor(t))
        assert np.array_equal(back.table, t.table)

    def test_linear_roundtrip(self):
        t = linear_transform([0b110, 0b010, 0b001], 3)
        assert np.array_equal(decode_descriptor(encode_descriptor(t)).table, t.table)

    def test_truncated(self):
        t = order_permutation(JointDistribution([0.4, 0.1, 0.3, 0.2]))
        data = encode_descriptor(t)
        with pytest.raises(ValueError):
            decode_descriptor(data[:-1])


class TestWorstCase:
    def test_m2(self):
        assert np.allclose(worst_case_distribution(2).probs, [1 / 3, 2 / 3])

    @pytest.mark.parametrize("m", [4, 8, 64, 1024])
    def test_marginals(self, m):
        dist = worst_case_distribution(m)
        pi = marginal_bit_probs(apply(order_permutation(dist), dist))
        assert np.allclose(pi, m / (6 * (m - 1)), atol=1e-12)

    def test_limit(self):
        assert worst_case_limit() == pytest.approx(WORST_LIMIT, abs=1e-12)
        # the approach is O(1/log m): the scaled gap settles to a constant
        ks = [8, 12, 16, 20, 24]
        ratios = [worst_case_cost(1 << k) / k for k in ks]
        assert all(a < b < WORST_LIMIT for a, b in zip(ratios, ratios[1:]))
        scaled = [(WORST_LIMIT - r) * k for r, k in zip(ratios, ks)]
        assert abs(scaled[-1] - scaled[-2]) < 1e-4


class TestExpectations:
    def test_digamma(self):
        assert digamma(1) == pytest.approx(-0.5772156649015329, abs=1e-13)
        assert digamma(2) == pytest.approx(1 - 0.5772156649015329, abs=1e-13)
        assert digamma(0.5) == pytest.approx(-1.9635100260214235, abs=1e-12)
        assert harmonic(4) == pytest.approx(25 / 12)

    def test_joint_entropy(self):
        assert expected_joint_entropy(1) == 0.0
        assert expected_joint_entropy(2) == pytest.approx(E_H_2, abs=1e-9)
        gap = math.log2(1 << 16) - expected_joint_entropy(1 << 16)
        assert gap == pytest.approx(PSI2_LN2, abs=1e-4)

    def test_joint_entropy_monte_carlo(self):
        draws = uniform_simplex_batch(2, 200_000, 5)
        h = binary_entropy(draws[:, 0])
        assert abs(h.mean() - E_H_2) < 4 * h.std() / math.sqrt(h.size)

    def test_order_stats(self):
        assert expected_order_stat(4, 1) == pytest.approx(1 / 16, abs=1e-15)
        assert expected_order_stat(4, 4) == pytest.approx(harmonic(4) / 4, abs=1e-15)
        for m in (2, 7, 64):
            s = expected_order_stats(m)
            assert math.fsum(s) == pytest.approx(1.0, abs=1e-12)
            assert np.all(np.diff(s) > 0)

    def test_marginal_bounds(self):
        assert marginal_bound_argument(1) == pytest.approx(LSB_ARG, abs=1e-12)
        assert avg_case_marginal_bound(10, 1) == pytest.approx(LSB_BOUND, abs=1e-9)
        total = sum(avg_case_marginal_bound(10, j) for j in range(1, 11))
        assert total == pytest.approx(SUM_10_BOUNDS, abs=5e-4)
        assert abs(total - 9.4063) <= 5e-4

    def test_cost_bound(self):
        assert avg_case_cost_bound(20) <= 0.0162 + 1e-4


class TestMonteCarlo:
    def test_order_cost_d10(self):
        draws = uniform_simplex_batch(1 << 10, 200, 11)
        costs, gaps = [], []
        for p in draws:
            dist = JointDistribution(p / p.sum())
            costs.append(cost(dist, order_permutation(dist)))
            gaps.append(sum_marginal_entropies(dist) - dist.entropy())
        assert np.mean(costs) <= 0.0162 + 0.004
        assert 0.55 <= np.mean(gaps) <= 0.61

    def test_block_order_cost_d12(self):
        draws = uniform_simplex_batch(1 << 12, 100, 12)
        costs = []
        for p in draws:
            dist = JointDistribution(p / p.sum())
            costs.append(cost(dist, block_order_permutation(dist, 10)))
        assert np.mean(costs) <= 0.0162 + 2 ** -10 + 0.004
