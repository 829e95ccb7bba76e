import numpy as np
import pytest

from otdag.hsic import HsicCache, first_order_matrix, hsic, index_to_pair, pair_count, pair_to_index
from otdag.kernels import SIGMOID

from oracles import naive_hsic


class TestPairIndexing:
    def test_lexicographic_order(self):
        d = 4
        pairs = [index_to_pair(t, d) for t in range(pair_count(d))]
        assert pairs == [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]

    @pytest.mark.parametrize("d", [2, 3, 5, 9])
    def test_roundtrip(self, d):
        for t in range(pair_count(d)):
            i, j = index_to_pair(t, d)
            assert pair_to_index(i, j, d) == t

    def test_rejects_bad_pair(self):
        with pytest.raises(ValueError):
            pair_to_index(2, 2, 4)


class TestHsic:
    def test_constant_input_gives_zero(self):
        rng = np.random.default_rng(0)
        assert abs(hsic(np.full(20, 3.0), rng.normal(size=20))) < 1e-12

    def test_matches_naive_expansion_on_fixed_vectors(self):
        x = [0.0, 1.0, 2.0, 3.0]
        y = [1.0, 0.0, 3.0, 2.0]
        assert hsic(x, y) == pytest.approx(naive_hsic(x, y), abs=1e-9)

    @pytest.mark.parametrize("seed", range(10))
    def test_matches_naive_expansion_on_random_vectors(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(4, 60))
        x = rng.normal(size=n)
        y = rng.normal(size=n) + 0.5 * x
        assert hsic(x, y) == pytest.approx(naive_hsic(x, y), abs=1e-9)

    @pytest.mark.parametrize("seed", range(10))
    def test_symmetric(self, seed):
        rng = np.random.default_rng(seed)
        x = rng.normal(size=30)
        y = rng.normal(size=30)
        assert abs(hsic(x, y) - hsic(y, x)) <= 1e-12

    @pytest.mark.parametrize("seed", range(10))
    def test_nonnegative_gaussian(self, seed):
        rng = np.random.default_rng(seed)
        assert hsic(rng.normal(size=40), rng.normal(size=40)) >= -1e-10

    def test_dependent_pair_scores_higher(self):
        wins = 0
        for seed in range(20):
            rng = np.random.default_rng(seed)
            x = rng.normal(size=500)
            independent = rng.normal(size=500)
            dependent = x + 0.1 * rng.normal(size=500)
            wins += hsic(x, dependent) > hsic(x, independent)
        assert wins >= 19

    def test_rejects_length_mismatch(self):
        with pytest.raises(ValueError):
            hsic([1.0, 2.0], [1.0, 2.0, 3.0])

    def test_rejects_single_sample(self):
        with pytest.raises(ValueError):
            hsic([1.0], [2.0])


class TestHsicCache:
    def test_single_pair_matches_direct_call(self):
        rng = np.random.default_rng(3)
        data = rng.normal(size=(50, 2))
        cache = first_order_matrix(data)
        assert cache.first_order_vector().shape == (1,)
        assert cache.first_order(0, 1) == pytest.approx(hsic(data[:, 0], data[:, 1]), abs=1e-15)

    def test_vector_order_is_lexicographic(self):
        rng = np.random.default_rng(4)
        data = rng.normal(size=(40, 3))
        cache = HsicCache(data)
        vec = cache.first_order_vector()
        expected = [hsic(data[:, i], data[:, j]) for i, j in [(0, 1), (0, 2), (1, 2)]]
        assert vec == pytest.approx(expected, abs=1e-15)

    def test_constant_column_zeroes_its_entries(self):
        rng = np.random.default_rng(5)
        data = rng.normal(size=(30, 4))
        data[:, 2] = 7.5
        m = HsicCache(data).first_order_matrix()
        assert np.all(m[2] == 0.0) and np.all(m[:, 2] == 0.0)

    def test_second_order_matches_summed_call(self):
        rng = np.random.default_rng(6)
        data = rng.normal(size=(60, 4))
        cache = HsicCache(data)
        expected = hsic(data[:, 0], data[:, 1] + data[:, 3])
        assert cache.second_order(0, 1, 3) == pytest.approx(expected, abs=1e-15)

    def test_second_order_is_unordered_in_the_pair(self):
        rng = np.random.default_rng(7)
        cache = HsicCache(rng.normal(size=(40, 3)))
        assert cache.second_order(0, 1, 2) == cache.second_order(0, 2, 1)

    def test_second_order_constant_pair_is_zero(self):
        rng = np.random.default_rng(8)
        data = rng.normal(size=(30, 3))
        data[:, 1] = 1.0
        data[:, 2] = -2.0
        assert HsicCache(data).second_order(0, 1, 2) == 0.0

    def test_second_order_rejects_duplicate_indices(self):
        cache = HsicCache(np.random.default_rng(9).normal(size=(20, 3)))
        with pytest.raises(ValueError):
            cache.second_order(0, 0, 1)

    def test_prefill_matches_lazy_values(self):
        rng = np.random.default_rng(10)
        data = rng.normal(size=(30, 4))
        lazy = HsicCache(data)
        filled = HsicCache(data)
        filled.prefill_second_order()
        for i in range(4):
            for j in range(4):
                for k in range(j + 1, 4):
                    if i in (j, k):
                        continue
                    assert filled.second_order(i, j, k) == lazy.second_order(i, j, k)

    def test_first_order_is_per_column_scale_invariant(self):
        # the median-heuristic bandwidth scales with its input
        rng = np.random.default_rng(11)
        data = rng.normal(size=(80, 2))
        scaled = data * np.array([1.0, 1000.0])
        assert HsicCache(scaled).first_order(0, 1) == pytest.approx(
            HsicCache(data).first_order(0, 1), rel=1e-9
        )

    def test_standardize_affects_summed_variables(self):
        # a huge column dominates the raw sum; z-scoring rebalances it
        rng = np.random.default_rng(11)
        data = rng.normal(size=(80, 3))
        scaled = data * np.array([1.0, 1.0, 1000.0])
        plain = HsicCache(scaled).second_order(0, 1, 2)
        standardized = HsicCache(scaled, standardize=True).second_order(0, 1, 2)
        reference = HsicCache(data).second_order(0, 1, 2)
        assert standardized != pytest.approx(plain, rel=1e-3)
        assert standardized == pytest.approx(
            HsicCache(data, standardize=True).second_order(0, 1, 2), rel=1e-9
        )
        assert reference == pytest.approx(
            HsicCache(data, standardize=False).second_order(0, 1, 2), rel=1e-12
        )

    def test_sigmoid_kernel_cache_runs(self):
        rng = np.random.default_rng(12)
        cache = HsicCache(rng.normal(size=(50, 3)), kernel_kind=SIGMOID)
        assert np.isfinite(cache.first_order_vector()).all()
        assert np.isfinite(cache.second_order(0, 1, 2))


class TestColliderDirection:
    @pytest.mark.parametrize("block", [0, 1])
    def test_summed_parents_beat_single_parents(self, block):
        # collider child with two independent parents, checked over seed blocks
        wins = 0
        for seed in range(20):
            rng = np.random.default_rng(1000 * block + seed)
            xj = rng.normal(size=600)
            xk = rng.normal(size=600)
            xi = xj + xk + rng.normal(size=600)
            cache = HsicCache(np.column_stack([xi, xj, xk]))
            wins += cache.second_order(0, 1, 2) > max(cache.first_order(0, 1), cache.first_order(0, 2))
        assert wins >= 18
