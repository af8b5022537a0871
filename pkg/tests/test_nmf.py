import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hmmnmf.exceptions import DimensionMismatch, ShapeMismatch
from hmmnmf.model import simulate
from hmmnmf.nmf import FactorPair, NmfConfig, factorize, i_divergence, nmf_step, random_init
from hmmnmf.stats import build_stats

from conftest import rows_match_up_to_permutation

# published NMF suffix factor for one Even Process realisation, F(2, 3), T = 1000
PUBLISHED_EVEN_D = np.array([
    [0, 0, 0, 0.0, 0.25, 0.24, 0.0, 0.5],
    [0.13, 0.13, 0, 0.25, 0, 0, 0.25, 0.24],
])


def random_stochastic(rng, shape, sparsity=0.0):
    X = rng.random(shape)
    X[rng.random(shape) < sparsity] = 0
    X[np.arange(shape[0]), rng.integers(0, shape[1], shape[0])] += 0.1
    return X / X.sum(axis=1, keepdims=True)


class TestIDivergence:
    def test_self_is_zero(self):
        K = np.array([[0.2, 0.8], [0, 1]])
        assert i_divergence(K, K) == 0

    def test_hand_value(self):
        K = np.eye(2)
        W = np.full((2, 2), 0.5)
        assert i_divergence(K, W) == pytest.approx(2 * np.log(2), abs=1e-15)

    def test_support_violation_is_infinite(self):
        assert i_divergence(np.array([[1.0, 0]]), np.array([[0.0, 1]])) == float("inf")

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatch):
            i_divergence(np.ones((2, 2)), np.ones((2, 3)))

    @given(st.integers(0, 10_000))
    def test_non_negative(self, seed):
        rng = np.random.default_rng(seed)
        K = rng.random((3, 4)) * (rng.random((3, 4)) > 0.3)
        W = rng.random((3, 4)) + 1e-3
        assert i_divergence(K, W) >= -1e-12


class TestRandomInit:
    def test_deterministic(self):
        a, b = random_init(4, 2, 8, seed=3), random_init(4, 2, 8, seed=3)
        np.testing.assert_array_equal(a.C, b.C)
        np.testing.assert_array_equal(a.D, b.D)

    @given(st.integers(1, 6), st.integers(1, 4), st.integers(1, 9), st.integers(0, 100))
    def test_stochastic_and_positive(self, rows, order, cols, seed):
        f = random_init(rows, order, cols, seed)
        np.testing.assert_allclose(f.C.sum(axis=1), 1, atol=1e-12)
        np.testing.assert_allclose(f.D.sum(axis=1), 1, atol=1e-12)
        assert np.all(f.C > 0) and np.all(f.D > 0)

    def test_trivial(self):
        f = random_init(1, 1, 1, seed=0)
        np.testing.assert_array_equal(f.C, [[1.0]])
        np.testing.assert_array_equal(f.D, [[1.0]])

    def test_rejects_zero_dimension(self):
        with pytest.raises(DimensionMismatch):
            random_init(0, 1, 1)


class TestFactorize:
    def test_exact_fixed_point(self):
        rng = np.random.default_rng(1)
        C = random_stochastic(rng, (6, 3))
        D = random_stochastic(rng, (3, 8), sparsity=0.3)
        F = C @ D
        res = factorize(F, 3, FactorPair(C, D))
        assert res.divergence == pytest.approx(0, abs=1e-12)
        assert np.abs(res.factors.C @ res.factors.D - F).max() < 1e-10

    def test_rank_one(self):
        f = np.array([0.1, 0.2, 0.3, 0.4])
        F = np.tile(f, (5, 1))
        res = factorize(F, 1, random_init(5, 1, 4, seed=0))
        np.testing.assert_allclose(res.factors.C, 1)
        np.testing.assert_allclose(res.factors.D[0], f, atol=1e-8)
        assert res.divergence <= 1e-10

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            factorize(np.ones((3, 4)) / 4, 2, random_init(3, 2, 5, seed=0))

    def test_iteration_cap(self):
        rng = np.random.default_rng(0)
        F = random_stochastic(rng, (5, 6))
        res = factorize(F, 2, random_init(5, 2, 6, 0), NmfConfig(max_inner_iterations=3,
                                                                relative_improvement_tolerance=1e-30))
        assert res.iterations == 3
        assert len(res.history) == 4

    def test_even_process_matches_published_factor(self, even):
        # single realisations at T = 1000 carry ~0.1 L1 sampling error per row
        hits = 0
        for seed in range(10):
            stats = build_stats(simulate(even, 1000, seed), 2, 3)
            res = factorize(stats.frequencies, 2, random_init(4, 2, 8, seed=seed))
            hits += rows_match_up_to_permutation(res.factors.D, PUBLISHED_EVEN_D, 0.1)
        assert hits >= 6

    def test_even_process_converges_to_suffix_laws(self, even):
        stats = build_stats(simulate(even, 100_000, 0), 2, 3)
        res = factorize(stats.frequencies, 2, random_init(4, 2, 8, seed=0))
        exact = np.array([[0.125, 0.125, 0, 0.25, 0, 0, 0.25, 0.25],
                          [0, 0, 0, 0, 0.25, 0.25, 0, 0.5]])
        assert rows_match_up_to_permutation(res.factors.D, exact, 0.03)

    def test_accepts_sparse(self, even):
        stats = build_stats(simulate(even, 500, 1), 2, 2)
        init = random_init(stats.frequencies.shape[0], 2, 4, seed=0)
        a = factorize(stats.frequencies, 2, init)
        b = factorize(stats.dense_frequencies(), 2, init)
        np.testing.assert_array_equal(a.factors.D, b.factors.D)


def test_monotone_on_random_stochastic_matrices():
    rng = np.random.default_rng(2024)
    eps = NmfConfig().floor_epsilon
    for trial in range(20):
        rows, cols = rng.integers(3, 12), rng.integers(3, 16)
        order = int(rng.integers(1, min(rows, cols) + 1))
        F = random_stochastic(rng, (rows, cols), sparsity=0.4)
        init = random_init(rows, order, cols, seed=trial)
        C, D = init.C, init.D
        prev = i_divergence(F, C @ D)
        for _ in range(500):
            C, D = nmf_step(F, C, D, eps)
            cur = i_divergence(F, C @ D)
            assert cur <= prev + 1e-9
            prev = cur
        assert np.all(C >= 0) and np.all(D >= 0)
        np.testing.assert_allclose(C.sum(axis=1), 1, atol=1e-9)
        np.testing.assert_allclose(D.sum(axis=1), 1, atol=1e-9)


def test_single_step_fixed_point():
    rng = np.random.default_rng(5)
    C = random_stochastic(rng, (7, 3))
    D = random_stochastic(rng, (3, 9))
    C2, D2 = nmf_step(C @ D, C, D, 1e-12)
    assert np.abs(C2 - C).max() < 1e-10
    assert np.abs(D2 - D).max() < 1e-10


def test_permutation_invariance():
    rng = np.random.default_rng(3)
    F = random_stochastic(rng, (5, 6))
    f = random_init(5, 3, 6, 0)
    perm = [2, 0, 1]
    assert i_divergence(F, f.C @ f.D) == pytest.approx(i_divergence(F, f.C[:, perm] @ f.D[perm]),
                                                       abs=1e-14)
