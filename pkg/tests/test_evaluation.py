import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hmmnmf import fixtures
from hmmnmf.evaluation import divergence_curve, prank_counterexample_check, prank_gt_rank_model_check
from hmmnmf.exceptions import AlphabetMismatch, BudgetExceeded
from hmmnmf.extract import learn
from hmmnmf.model import HmmModel, finite_dimensional_distribution, simulate

from test_model import random_models


def kl_oracle(P_model, Q_model, n):
    P = finite_dimensional_distribution(P_model, n)
    Q = finite_dimensional_distribution(Q_model, n)
    m = P > 0
    return float(np.sum(P[m] * np.log(P[m] / Q[m]))) / n


def test_identical_models(lam3):
    curve = divergence_curve(lam3, lam3, 15)
    assert curve.n_values == tuple(range(1, 16))
    assert max(abs(r) for r in curve.rates) < 1e-12
    assert not curve.clamp_flag


def test_iid_approximation_of_even_process(even):
    iid = HmmModel.from_matrices([[[1 / 3]], [[2 / 3]]])
    curve = divergence_curve(even, iid, 3)
    assert abs(curve.rates[0]) < 1e-12
    # P_2(10) = 1/6 for the Even Process against 2/9 for the iid model
    P2 = np.array([1 / 6, 1 / 6, 1 / 6, 1 / 2])
    Q2 = np.array([1 / 9, 2 / 9, 2 / 9, 4 / 9])
    assert curve.rates[1] == pytest.approx(np.sum(P2 * np.log(P2 / Q2)) / 2, abs=1e-12)
    assert curve.rates[1] > 0


def test_matches_independent_enumeration(lam2):
    est = fixtures.dhmm_equivalent_published_estimate()
    curve = divergence_curve(lam2, est, 8)
    for n, r in zip(curve.n_values, curve.rates):
        assert r == pytest.approx(kl_oracle(lam2, est, n), rel=1e-9, abs=1e-15)


def test_clamp_flag(even):
    # a learned model that can never emit "00"
    no_double_zero = HmmModel.from_matrices([[[0, 0.4], [0, 0]], [[0.6, 0], [1, 0]]])
    curve = divergence_curve(even, no_double_zero, 3)
    assert curve.clamp_flag
    assert np.isfinite(curve.rates).all()


def test_no_clamp_for_learned_even_process(even):
    learned = learn(simulate(even, 1000, 0), 2, 3, seed=0).model
    assert not divergence_curve(even, learned, 10).clamp_flag


def test_alphabet_mismatch(even):
    ternary = HmmModel.from_matrices([[[0.2]], [[0.3]], [[0.5]]])
    with pytest.raises(AlphabetMismatch):
        divergence_curve(even, ternary, 3)


def test_budget(even):
    with pytest.raises(BudgetExceeded):
        divergence_curve(even, even, 25)


@given(random_models(max_states=3, max_symbols=2), random_models(max_states=3, max_symbols=2))
@settings(max_examples=25, deadline=None)
def test_non_negative_both_directions(a, b):
    if a.alphabet_size != b.alphabet_size:
        return
    for curve in (divergence_curve(a, b, 5), divergence_curve(b, a, 5)):
        assert min(curve.rates) >= -1e-12


def test_published_estimate_normalisation():
    raw = fixtures.dhmm_equivalent_published_estimate(normalize=False)
    assert raw.transition_matrix.sum(axis=1)[1] == pytest.approx(1.002)
    fixed = fixtures.dhmm_equivalent_published_estimate()
    np.testing.assert_allclose(fixed.transition_matrix.sum(axis=1), 1, atol=1e-15)


class TestPrankChecks:
    def test_counterexample_all_pass(self):
        report = prank_counterexample_check()
        assert report.passed
        assert [name for name, _, _ in report.checks] == [
            "factorization", "rank", "posterior", "suffix-laws"]

    def test_prank_gt_rank(self):
        report = prank_gt_rank_model_check()
        assert report.passed
        assert "rank(F) = 3" in report.lines()[0]
