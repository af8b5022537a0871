"""Recover ``A(k)`` from NMF factors and run the refinement loop.

A suffix law of length ``s`` splits by its first symbol ``k`` into blocks,
and block ``k`` of state ``i`` equals ``sum_j a_ij(k) H[j]`` where ``H``
holds the length ``s - 1`` laws.  Each state is fitted by one L1 linear
program over all symbol blocks with ``sum_jk a_ij(k) = 1``.
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from typing import List, Optional, Union

import numpy as np
from scipy.optimize import linprog

from .exceptions import (
    BadShape,
    DimensionMismatch,
    LpInfeasible,
    LpNotConverged,
    NonErgodic,
    OrderTooLarge,
    ZeroProbabilityPrefix,
)
from .model import HmmModel, ObservationSequence, index_to_string, prefix_state_posterior, \
    stationary_distribution, suffix_distributions, validate
from .nmf import FactorPair, NmfConfig, factorize, random_init
from .spectral import DEFAULT_THRESHOLD, SpectrumReport, spectrum_report
from .stats import build_stats

logger = logging.getLogger(__name__)

INIT_C_CHOICES = ("from-lp", "from-posterior")


@dataclass(frozen=True, eq=False)
class MarginalTable:
    H: np.ndarray
    source_s: int


@dataclass(frozen=True, eq=False)
class ExtractionResult:
    model: HmmModel
    per_state_residuals: np.ndarray
    per_symbol_blocks_used: tuple


@dataclass(eq=False)
class IterationRecord:
    iteration: int
    divergence: float
    nmf_iterations: int
    residuals: np.ndarray

    def format(self) -> str:
        res = ",".join(f"{r:.6g}" for r in self.residuals)
        return f"iter={self.iteration} div={self.divergence:.12g} res={res}"


@dataclass(eq=False)
class LearnResult:
    model: HmmModel
    spectrum: Optional[SpectrumReport]
    history: List[IterationRecord] = field(default_factory=list)
    factors: Optional[FactorPair] = None
    retained_rows: Optional[np.ndarray] = None


def _suffix_length(cols: int, M: int) -> int:
    s, n = 0, 1
    while n < cols:
        n *= M
        s += 1
    if n != cols:
        raise BadShape(f"{cols} columns is not a power of the alphabet size {M}")
    return s


def marginalize_last_symbol(D, alphabet_size: int) -> MarginalTable:
    """Sum out the last suffix symbol: ``H[i, w] = sum_k D[i, w*M + k]``."""
    D = np.asarray(D, dtype=float)
    M = alphabet_size
    if D.ndim != 2 or M < 2:
        raise BadShape("D must be 2-D and the alphabet must have at least two symbols")
    s = _suffix_length(D.shape[1], M)
    if s < 2:
        raise BadShape(f"D has {D.shape[1]} columns; need M**s with s >= 2")
    H = D.reshape(D.shape[0], -1, M).sum(axis=2)
    return MarginalTable(H, s)


def _l1_simplex_fit(target: np.ndarray, basis: np.ndarray):
    """Minimise ``||target - x @ basis||_1`` over the probability simplex.

    ``basis`` has shape (n_vars, n_obs).  Returns the solution and the
    recomputed L1 residual.
    """
    n_vars, n_obs = basis.shape
    c = np.concatenate([np.zeros(n_vars), np.ones(n_obs)])
    eye = np.eye(n_obs)
    A_ub = np.block([[basis.T, -eye], [-basis.T, -eye]])
    b_ub = np.concatenate([target, -target])
    A_eq = np.concatenate([np.ones(n_vars), np.zeros(n_obs)])[None, :]
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=[1.0],
                  bounds=(0, None), method="highs")
    if res.status == 2:
        raise LpInfeasible(res.message)
    if res.status != 0:
        raise LpNotConverged(res.message)
    x = np.clip(res.x[:n_vars], 0.0, None)
    x /= x.sum()
    residual = float(np.abs(target - x @ basis).sum())
    return x, residual


def solve_transition_matrices(D, H: MarginalTable, alphabet_size: int) -> ExtractionResult:
    """Fit ``A(k)`` row by row so that ``D[:, block k] ~ A(k) @ H``."""
    D = np.asarray(D, dtype=float)
    Hm = np.asarray(H.H, dtype=float)
    M = alphabet_size
    N = D.shape[0]
    L = Hm.shape[1]
    if Hm.shape[0] != N or D.shape[1] != M * L:
        raise DimensionMismatch(f"D {D.shape} and H {Hm.shape} are inconsistent for M={M}")
    if N > L:
        warnings.warn(
            f"order {N} exceeds the {L} columns of H; the extracted model is not unique",
            RuntimeWarning, stacklevel=2,
        )
    # rows of the basis are (k, j) pairs, columns are (k, w) blocks of D
    basis = np.kron(np.eye(M), Hm)
    A = np.zeros((M, N, N))
    residuals = np.zeros(N)
    for i in range(N):
        x, residuals[i] = _l1_simplex_fit(D[i], basis)
        A[:, i, :] = x.reshape(M, N)
    blocks = tuple((k * L, (k + 1) * L) for k in range(M))
    return ExtractionResult(HmmModel(A), residuals, blocks)


def extract_model(D, alphabet_size: int) -> ExtractionResult:
    return solve_transition_matrices(D, marginalize_last_symbol(D, alphabet_size), alphabet_size)


def rebuild_D_from_model(model: HmmModel, s: int) -> np.ndarray:
    return suffix_distributions(model, s)


def rebuild_C_against_F(F, D0) -> np.ndarray:
    """Row-stochastic ``C`` minimising ``||F[u] - C[u] @ D0||_1`` per row."""
    F = F.toarray() if hasattr(F, "toarray") else np.asarray(F, dtype=float)
    D0 = np.asarray(D0, dtype=float)
    if F.shape[1] != D0.shape[1]:
        raise DimensionMismatch(f"F {F.shape} and D0 {D0.shape} are inconsistent")
    C = np.empty((F.shape[0], D0.shape[0]))
    for u in range(F.shape[0]):
        C[u], _ = _l1_simplex_fit(F[u], D0)
    return C


def rebuild_C_from_posterior(model: HmmModel, F, retained_rows, p: int, D0) -> np.ndarray:
    """State posteriors after each observed prefix under ``model``.

    Rows whose prefix the model deems impossible fall back to the L1 fit.
    """
    F = F.toarray() if hasattr(F, "toarray") else np.asarray(F, dtype=float)
    pi = stationary_distribution(model)
    C = np.empty((len(retained_rows), model.num_states))
    for u, idx in enumerate(retained_rows):
        prefix = index_to_string(int(idx), p, model.alphabet_size)
        try:
            C[u] = prefix_state_posterior(model, prefix, pi)
        except ZeroProbabilityPrefix:
            C[u], _ = _l1_simplex_fit(F[u], D0)
    return C


def learn(obs: ObservationSequence, p: int, s: int, order: Union[int, str, None] = None,
          outer_iterations: int = 2, nmf_config: NmfConfig = NmfConfig(),
          threshold: float = DEFAULT_THRESHOLD, weighted_spectrum: bool = False,
          noise_aware: bool = True, init_c: str = "from-lp", seed=None) -> LearnResult:
    """Learn the recurrent part of an HMM from one observation sequence.

    ``order`` may be an integer to force the number of states, or ``None``
    / ``"auto"`` to take it from the singular value gap.
    """
    if s < 2:
        raise BadShape("suffix length must be at least 2 to extract transitions")
    if outer_iterations < 1:
        raise ValueError("outer_iterations must be at least 1")
    if init_c not in INIT_C_CHOICES:
        raise ValueError(f"init_c must be one of {INIT_C_CHOICES}")
    M = obs.alphabet_size
    stats = build_stats(obs, p, s)
    F = stats.dense_frequencies()
    report = None
    if order is None or order == "auto":
        report = spectrum_report(stats, threshold, weighted_spectrum, noise_aware)
        N = report.chosen_order
    else:
        N = int(order)
    if N < 1 or N > F.shape[0] or N > F.shape[1]:
        raise OrderTooLarge(f"order {N} not supported by F of shape {F.shape}")
    seed = nmf_config.seed if seed is None else seed

    result = LearnResult(model=None, spectrum=report, retained_rows=stats.retained_rows)
    init = random_init(F.shape[0], N, F.shape[1], seed, nmf_config.floor_epsilon)
    for it in range(1, outer_iterations + 1):
        fit = factorize(F, N, init, nmf_config)
        extracted = extract_model(fit.factors.D, M)
        validate(extracted.model)
        record = IterationRecord(it, fit.divergence, fit.iterations, extracted.per_state_residuals)
        logger.info(record.format())
        result.history.append(record)
        result.model = extracted.model
        result.factors = fit.factors
        if it == outer_iterations:
            break
        D0 = rebuild_D_from_model(extracted.model, s)
        if init_c == "from-posterior":
            try:
                C0 = rebuild_C_from_posterior(extracted.model, F, stats.retained_rows, p, D0)
            except NonErgodic:
                C0 = rebuild_C_against_F(F, D0)
        else:
            C0 = rebuild_C_against_F(F, D0)
        init = FactorPair(C0, D0)
    return result
