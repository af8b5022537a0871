"""Row-stochastic NMF under the I-divergence.

Minimises ``D(F || C @ D)`` over non-negative ``C`` (rows x N) and ``D``
(N x cols), both row-stochastic, using Lee-Seung multiplicative updates
followed by a renormalisation that moves row scale of ``D`` into ``C``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .exceptions import DimensionMismatch, NonFiniteDivergence, ShapeMismatch


@dataclass(frozen=True)
class NmfConfig:
    max_inner_iterations: int = 500
    relative_improvement_tolerance: float = 1e-7
    floor_epsilon: float = 1e-12
    seed: int = 0


@dataclass(frozen=True, eq=False)
class FactorPair:
    C: np.ndarray
    D: np.ndarray

    @property
    def order(self) -> int:
        return self.C.shape[1]


@dataclass(frozen=True, eq=False)
class NmfResult:
    factors: FactorPair
    divergence: float
    iterations: int
    history: tuple


def i_divergence(K, W) -> float:
    """Generalised KL divergence ``sum(K log(K/W) - K + W)`` with ``0 log 0 = 0``.

    Returns ``inf`` when ``W`` vanishes where ``K`` has mass.
    """
    K = K.toarray() if sp.issparse(K) else np.asarray(K, dtype=float)
    W = W.toarray() if sp.issparse(W) else np.asarray(W, dtype=float)
    if K.shape != W.shape:
        raise ShapeMismatch(f"shapes {K.shape} and {W.shape} differ")
    pos = K > 0
    if np.any(W[pos] <= 0):
        return float("inf")
    kl = np.sum(K[pos] * np.log(K[pos] / W[pos]))
    return float(kl - K.sum() + W.sum())


def random_init(rows: int, order: int, cols: int, seed=None,
                floor_epsilon: float = NmfConfig.floor_epsilon) -> FactorPair:
    if min(rows, order, cols) < 1:
        raise DimensionMismatch("all dimensions must be positive")
    rng = np.random.default_rng(seed)
    C = np.maximum(rng.random((rows, order)), floor_epsilon)
    D = np.maximum(rng.random((order, cols)), floor_epsilon)
    return FactorPair(C / C.sum(axis=1, keepdims=True), D / D.sum(axis=1, keepdims=True))


def _ratio(F, W):
    out = np.zeros_like(F)
    np.divide(F, W, out=out, where=F > 0)
    return out


def nmf_step(F: np.ndarray, C: np.ndarray, D: np.ndarray, floor: float):
    """One full iteration: C update, D update, stochastic renormalisation."""
    C = C * (_ratio(F, C @ D) @ D.T) / D.sum(axis=1)
    C = np.maximum(C, floor)
    D = D * (C.T @ _ratio(F, C @ D)) / C.sum(axis=0)[:, None]
    D = np.maximum(D, floor)
    scale = D.sum(axis=1)
    D = D / scale[:, None]
    C = C * scale
    C = C / C.sum(axis=1, keepdims=True)
    return C, D


def factorize(F, order: int, init: FactorPair, config: NmfConfig = NmfConfig()) -> NmfResult:
    """Locally optimal row-stochastic factors of ``F`` starting from ``init``.

    Stops once the relative decrease of the divergence falls below the
    configured tolerance or after ``max_inner_iterations`` full iterations.
    """
    F = F.toarray() if sp.issparse(F) else np.asarray(F, dtype=float)
    rows, cols = F.shape
    if init.C.shape != (rows, order) or init.D.shape != (order, cols):
        raise DimensionMismatch(
            f"init shapes {init.C.shape}, {init.D.shape} do not match "
            f"F {F.shape} with order {order}"
        )
    eps = config.floor_epsilon
    C = np.maximum(np.asarray(init.C, dtype=float), eps)
    D = np.maximum(np.asarray(init.D, dtype=float), eps)
    C /= C.sum(axis=1, keepdims=True)
    D /= D.sum(axis=1, keepdims=True)
    div = i_divergence(F, C @ D)
    history = [div]
    it = 0
    while it < config.max_inner_iterations:
        C, D = nmf_step(F, C, D, eps)
        it += 1
        new = i_divergence(F, C @ D)
        if not np.isfinite(new):
            raise NonFiniteDivergence("C @ D vanished where F has mass")
        history.append(new)
        improvement = (div - new) / max(abs(div), np.finfo(float).tiny)
        div = new
        if div == 0 or improvement < config.relative_improvement_tolerance:
            break
    return NmfResult(FactorPair(C, D), div, it, tuple(history))
