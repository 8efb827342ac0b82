import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gbica.probability import (
    JointDistribution,
    binary_entropy,
    empirical_distribution,
    entropy,
    gen_markov,
    gen_markov_symmetric,
    gen_uniform_simplex,
    gen_zipf,
    marginal_bit_probs,
    read_distribution,
    read_samples,
    sample,
    sum_marginal_entropies,
    uniform_simplex_batch,
    write_distribution,
    write_samples,
)

# oracle values from 30-digit mpmath evaluation of the formulas
HB_QUARTER = 0.811278124459132863909695792039
H_631 = 1.29546184423832178456195437994
SUM_34 = 1.85224149368536125722289528736


def dists(max_d=5):
    return st.integers(1, max_d).flatmap(
        lambda d: st.lists(st.floats(0, 1), min_size=1 << d, max_size=1 << d)
        .filter(lambda w: sum(w) > 1e-6)
        .map(lambda w: JointDistribution.from_weights(w)))


class TestBinaryEntropy:
    def test_values(self):
        assert binary_entropy(0.5) == 1.0
        assert binary_entropy(0.0) == 0.0
        assert binary_entropy(1.0) == 0.0
        assert binary_entropy(0.25) == pytest.approx(HB_QUARTER, abs=1e-15)

    @pytest.mark.parametrize("p", [-0.1, 1.0001, math.nan])
    def test_domain(self, p):
        with pytest.raises(ValueError):
            binary_entropy(p)

    def test_array(self):
        out = binary_entropy(np.array([0.0, 0.5, 0.25]))
        assert out.shape == (3,)
        assert out[2] == pytest.approx(HB_QUARTER)

    @given(st.floats(0, 1))
    def test_symmetric_and_bounded(self, p):
        assert binary_entropy(p) == pytest.approx(binary_entropy(1 - p), abs=1e-12)
        assert 0.0 <= binary_entropy(p) <= 1.0


class TestEntropy:
    def test_examples(self):
        assert entropy(JointDistribution(np.full(4, 0.25))) == 2.0
        assert entropy(JointDistribution([0.5, 0.25, 0.25, 0.0])) == 1.5
        assert entropy(JointDistribution([0.6, 0.3, 0.1, 0.0])) == pytest.approx(H_631, abs=1e-14)

    def test_validation(self):
        with pytest.raises(ValueError):
            JointDistribution([0.5, 0.6])
        with pytest.raises(ValueError):
            JointDistribution([0.5, 0.25, 0.25])
        with pytest.raises(ValueError):
            JointDistribution([1.5, -0.5])

    def test_qary(self):
        d = JointDistribution(np.full(9, 1 / 9), q=3)
        assert d.d == 2 and d.m == 9


class TestMarginals:
    def test_examples(self):
        assert np.allclose(marginal_bit_probs(JointDistribution(np.full(8, 1 / 8))), 0.5)
        point = np.zeros(8)
        point[0] = 1
        assert np.array_equal(marginal_bit_probs(JointDistribution(point)), [1, 1, 1])
        d2 = JointDistribution([0.1, 0.2, 0.3, 0.4])
        assert np.allclose(marginal_bit_probs(d2), [0.3, 0.4])
        assert sum_marginal_entropies(d2) == pytest.approx(SUM_34, abs=1e-14)

    def test_sum_examples(self):
        assert sum_marginal_entropies(JointDistribution(np.full(8, 1 / 8))) == pytest.approx(3.0)
        point = np.zeros(8)
        point[5] = 1
        assert sum_marginal_entropies(JointDistribution(point)) == 0.0

    @given(dists())
    @settings(max_examples=200, deadline=None)
    def test_ranges(self, dist):
        h, s = dist.entropy(), sum_marginal_entropies(dist)
        assert -1e-12 <= h <= dist.d + 1e-12
        assert -1e-12 <= s <= dist.d + 1e-12
        assert s >= h - 1e-9


class TestGenerators:
    def test_zipf(self):
        assert np.allclose(gen_zipf(8, 0).probs, 1 / 8)
        assert np.allclose(gen_zipf(2, 1).probs, [2 / 3, 1 / 3])
        assert np.allclose(gen_zipf(4, 1).probs, [0.48, 0.24, 0.16, 0.12])
        p = gen_zipf(1024, 1.3).probs
        assert np.all(np.diff(p) <= 0)
        assert abs(p.sum() - 1) < 1e-12

    def test_simplex_moments(self):
        m = 8
        draws = uniform_simplex_batch(m, 100_000, 3)
        assert np.allclose(draws.sum(axis=1), 1, atol=1e-12)
        assert np.all(draws >= 0)
        se = np.sqrt((m - 1) / (m * m * (m + 1)) / draws.shape[0])
        assert np.all(np.abs(draws.mean(axis=0) - 1 / m) < 3 * se)
        # expected minimum coordinate is 1/m^2
        mins = draws.min(axis=1)
        assert abs(mins.mean() - 1 / m ** 2) < 4 * mins.std() / np.sqrt(mins.size)

    def test_simplex_deterministic(self):
        a = gen_uniform_simplex(16, 7).probs
        b = gen_uniform_simplex(16, 7).probs
        assert np.array_equal(a, b)
        assert abs(a.sum() - 1) < 1e-12

    def test_markov(self):
        assert np.allclose(gen_markov_symmetric(5, 0.5).probs, 1 / 32)
        assert np.allclose(gen_markov_symmetric(2, 0.1).probs, [0.45, 0.05, 0.05, 0.45])

    def test_markov_symmetric_distinct_count(self):
        for alpha in (0.1, 0.2, 0.3):
            vals = np.unique(np.round(gen_markov_symmetric(4, alpha).probs, 14))
            assert vals.size == 14

    @pytest.mark.parametrize("d", [3, 4, 5, 6])
    def test_markov_generic_distinct_values(self, d):
        # brute force: a word's probability is a monomial in the first-bit law
        # and the four transition counts, so generic parameters separate
        # exactly the distinct signatures
        sigs = set()
        for w in itertools.product((0, 1), repeat=d):
            t = [0] * 4
            for a, b in zip(w, w[1:]):
                t[2 * a + b] += 1
            sigs.add((w[0], *t))
        probs = gen_markov(d, 0.1, 0.3, p0=0.37).probs
        assert np.unique(np.round(probs, 14)).size == len(sigs) == d * (d - 1) + 2

    def test_markov_flip_symmetric_depends_on_transitions_only(self):
        d = 5
        probs = gen_markov_symmetric(d, 0.15).probs
        flips = [bin(w ^ (w >> 1)).count("1") - (w >> (d - 1) & 1) for w in range(1 << d)]
        for r in range(d):
            assert np.ptp(probs[np.array(flips) == r]) < 1e-15
        assert np.unique(np.round(probs, 14)).size == d


class TestEmpirical:
    def test_examples(self):
        counts, dist = empirical_distribution([0, 0, 1, 1], 2)
        assert np.allclose(dist.probs, [0.5, 0.5]) and dist.entropy() == 1.0
        counts, dist = empirical_distribution([0], 4)
        assert dist.entropy() == 0.0 and counts.n == 1 and counts.n0 == 1
        with pytest.raises(ValueError):
            empirical_distribution([], 4)
        with pytest.raises(ValueError):
            empirical_distribution([4], 4)

    def test_zipf_consistency(self):
        dist = gen_zipf(1 << 12, 1.2)
        x = sample(dist, 100_000, 11)
        counts, emp = empirical_distribution(x, dist.m)
        assert counts.n == 100_000 and counts.n0 == np.count_nonzero(counts.counts)
        assert abs(emp.entropy() - dist.entropy()) < 0.1


def test_file_roundtrip(tmp_path):
    dist = gen_uniform_simplex(16, 1)
    write_distribution(tmp_path / "p.txt", dist)
    assert np.array_equal(read_distribution(tmp_path / "p.txt").probs, dist.probs)
    x = sample(dist, 100, 2)
    write_samples(tmp_path / "x.txt", x)
    assert np.array_equal(read_samples(tmp_path / "x.txt"), x)
