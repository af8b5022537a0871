"""Order estimation from the singular values of a frequency matrix."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.sparse as sp

from .exceptions import ValidationError
from .stats import DENSE_CAP, PrefixSuffixStats, _densify, weighted_frequencies

DEFAULT_THRESHOLD = 0.05


@dataclass(frozen=True)
class SpectrumReport:
    singular_values: tuple
    chosen_order: int
    threshold_used: float
    source: str = "frequencies"
    noise_floor: float = 0.0


def _as_dense(matrix) -> np.ndarray:
    if sp.issparse(matrix):
        return _densify(matrix, DENSE_CAP, DENSE_CAP)
    arr = np.asarray(matrix, dtype=float)
    if arr.ndim != 2 or arr.size == 0:
        raise ValidationError("expected a non-empty 2-D matrix")
    return arr


def singular_spectrum(matrix) -> np.ndarray:
    """All singular values, non-increasing."""
    s = np.linalg.svd(_as_dense(matrix), compute_uv=False)
    return np.sort(np.clip(s, 0.0, None))[::-1]


def estimate_order(spectrum, threshold: float = DEFAULT_THRESHOLD,
                   source: str = "frequencies", noise_floor: float = 0.0) -> SpectrumReport:
    """Smallest N with ``sigma[N] < max(threshold * sigma[0], noise_floor)``.

    ``sigma`` is 0-based, so ``sigma[N]`` is the (N+1)-th largest value.  With
    the default ``noise_floor=0`` this is a pure ratio-to-largest rule.  Falls
    back to the full length when no singular value drops below the cut.
    """
    s = np.asarray(spectrum, dtype=float)
    if s.ndim != 1 or s.size == 0:
        raise ValidationError("spectrum must be a non-empty vector")
    if np.any(np.diff(s) > 1e-12 * max(s[0], 1.0)):
        raise ValidationError("spectrum must be non-increasing")
    order = s.size
    if s[0] > 0:
        below = np.flatnonzero(s[1:] < max(threshold * s[0], noise_floor))
        if below.size:
            order = int(below[0]) + 1
    else:
        order = 1
    return SpectrumReport(tuple(float(x) for x in s), order, float(threshold), source,
                          float(noise_floor))


def numerical_rank(matrix, relative_tolerance: float = 1e-10) -> int:
    s = singular_spectrum(matrix)
    if s[0] == 0:
        return 0
    return int(np.count_nonzero(s / s[0] >= relative_tolerance))


def sampling_noise_floor(stats: PrefixSuffixStats, weighted: bool = False) -> float:
    """Expected Frobenius norm of the multinomial sampling error in ``F``.

    Row ``u`` of ``F`` is a multinomial average of ``g_u`` draws, so its error
    has expected squared norm ``(1 - ||F_u||^2) / g_u``.  The Frobenius norm
    bounds the spectral norm, and by Weyl's inequality singular values
    below it cannot be told apart from zero.
    """
    g = stats.row_sums.astype(float)
    sq = np.asarray(stats.frequencies.multiply(stats.frequencies).sum(axis=1)).ravel()
    per_row = (1.0 - sq) / g
    if weighted:
        per_row = per_row * g ** 2
    return float(np.sqrt(per_row.sum()))


def spectrum_report(stats: PrefixSuffixStats, threshold: float = DEFAULT_THRESHOLD,
                    weighted: bool = False, noise_aware: bool = True) -> SpectrumReport:
    """Spectrum of ``F`` (or ``diag(G) F``) and the order it suggests."""
    matrix = weighted_frequencies(stats) if weighted else stats.frequencies
    floor = sampling_noise_floor(stats, weighted) if noise_aware else 0.0
    return estimate_order(singular_spectrum(matrix), threshold,
                          "weighted" if weighted else "frequencies", floor)
