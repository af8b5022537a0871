"""Model accuracy by I-divergence rate, and the rank versus positive-rank checks."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import AlphabetMismatch
from .fixtures import kronecker_counterexample, prank_counterexample_model, prank_gt_rank_model
from .model import (
    ENUMERATION_BUDGET,
    HmmModel,
    _check_budget,
    _forward_all_strings,
    analytic_factors,
    simulate,
    stationary_distribution,
    validate,
)
from .spectral import numerical_rank, singular_spectrum
from .stats import build_stats

Q_FLOOR = 1e-300


@dataclass(frozen=True)
class DivergenceCurve:
    n_values: tuple
    rates: tuple
    clamp_flag: bool


def divergence_curve(true_model: HmmModel, learned_model: HmmModel, n_max: int = 15,
                     budget: int = ENUMERATION_BUDGET) -> DivergenceCurve:
    """``D(P_n || Q_n) / n`` for ``n = 1 .. n_max``.

    Both finite-dimensional laws are normalised, so the I-divergence reduces to
    the KL form.  Strings the true model can emit but the learned model
    cannot get ``Q_n`` floored at 1e-300 and set ``clamp_flag``.
    """
    validate(true_model)
    validate(learned_model)
    if true_model.alphabet_size != learned_model.alphabet_size:
        raise AlphabetMismatch(
            f"alphabet sizes {true_model.alphabet_size} and {learned_model.alphabet_size} differ"
        )
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    _check_budget(true_model.alphabet_size, n_max, budget)
    A_p, A_q = true_model.transition_emission, learned_model.transition_emission
    alpha_p = stationary_distribution(true_model)[None, None, :]
    alpha_q = stationary_distribution(learned_model)[None, None, :]
    rates, clamped = [], False
    for n in range(1, n_max + 1):
        # extend the length n-1 forward vectors by one symbol
        alpha_p = _forward_all_strings(A_p, alpha_p[0], 1).reshape(1, -1, A_p.shape[1])
        alpha_q = _forward_all_strings(A_q, alpha_q[0], 1).reshape(1, -1, A_q.shape[1])
        P = alpha_p[0].sum(axis=1)
        Q = alpha_q[0].sum(axis=1)
        pos = P > 0
        Qp = Q[pos]
        if np.any(Qp <= 0):
            clamped = True
            Qp = np.maximum(Qp, Q_FLOOR)
        rates.append(float(np.sum(P[pos] * np.log(P[pos] / Qp)) / n))
    return DivergenceCurve(tuple(range(1, n_max + 1)), tuple(rates), clamped)


@dataclass(frozen=True)
class CheckReport:
    checks: tuple  # (name, passed, detail)

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    def lines(self):
        return [f"{'PASS' if ok else 'FAIL'} {name}: {detail}" for name, ok, detail in self.checks]


def prank_counterexample_check() -> CheckReport:
    """A rank-3 stochastic matrix with an exact rank-4 factorisation that no HMM produces.

    The candidate model reproduces ``D`` exactly, but its prefix posteriors
    are uniform and so differ from ``C``.
    """
    F, C, D = kronecker_counterexample()
    residual = float(np.abs(F - C @ D).max())
    rank = numerical_rank(F)
    model = prank_counterexample_model()
    _, C_model, D_model, _ = analytic_factors(model, 2, 5)
    uniform_err = float(np.abs(C_model - 0.25).max())
    suffix_err = float(np.abs(D_model - D).max())
    checks = (
        ("factorization", residual < 1e-12, f"max|F - C D| = {residual:.3g}"),
        ("rank", rank == 3, f"numerical rank = {rank}"),
        ("posterior", C_model.shape == (4, 4) and uniform_err < 1e-12
         and not np.allclose(C_model, C),
         f"max|posterior - 1/4| = {uniform_err:.3g}, differs from C: {not np.allclose(C_model, C)}"),
        ("suffix-laws", suffix_err < 1e-12, f"max|D(model) - D| = {suffix_err:.3g}"),
    )
    return CheckReport(checks)


def prank_gt_rank_model_check(T: int = 10000, seed=0) -> CheckReport:
    """Exact ``F(2, 5)`` of a four-state model has rank 3.

    Also reports the leading singular values of an empirical ``F(2, 5)``
    built from ``T`` simulated symbols.
    """
    model = prank_gt_rank_model()
    _, C, D, _ = analytic_factors(model, 2, 5)
    F = C @ D
    rank = numerical_rank(F)
    residual = float(np.abs(F - C @ D).max())
    empirical = singular_spectrum(build_stats(simulate(model, T, seed), 2, 5).frequencies)[:4]
    checks = (
        ("analytic-rank", rank == 3, f"rank(F) = {rank}"),
        ("factorization", residual < 1e-12, f"max|F - C D| = {residual:.3g}"),
        ("empirical-spectrum", bool(empirical.size == 4 and empirical[3] < 0.25 * empirical[2]),
         "leading singular values " + " ".join(f"{x:.4f}" for x in empirical)),
    )
    return CheckReport(checks)
