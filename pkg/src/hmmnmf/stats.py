"""Prefix-suffix histograms of an observation sequence.

Every window of ``p + s`` consecutive symbols contributes one count to the
cell (prefix, suffix).  Windows slide by one symbol.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .exceptions import EmptyStats, SequenceTooShort, ValidationError
from .model import ObservationSequence, index_to_string

WINDOW_STRIDE = 1
DENSE_CAP = 4096


@dataclass(frozen=True, eq=False)
class PrefixSuffixStats:
    """Sparse counts ``R`` with row sums ``G`` and row-normalised ``F``.

    Only prefixes that were observed are kept.  ``retained_rows[u]`` is the
    lexicographic index of the prefix behind row ``u`` of ``counts`` and
    ``frequencies``; columns are suffix indices in ``range(M**s)``.
    """

    p: int
    s: int
    alphabet_size: int
    retained_rows: np.ndarray
    row_sums: np.ndarray
    counts: sp.csr_matrix
    frequencies: sp.csr_matrix
    num_windows: int

    @property
    def empty(self) -> bool:
        return self.num_windows == 0

    @property
    def n_columns(self) -> int:
        return self.alphabet_size ** self.s

    def dense_frequencies(self, max_rows: int = DENSE_CAP, max_cols: int = DENSE_CAP) -> np.ndarray:
        return _densify(self.frequencies, max_rows, max_cols)

    def items(self):
        """Yield ``(prefix_index, suffix_index, count, frequency)`` in index order."""
        R = self.counts.tocoo()
        order = np.lexsort((R.col, R.row))
        for r, c, n in zip(R.row[order], R.col[order], R.data[order]):
            yield int(self.retained_rows[r]), int(c), int(n), n / self.row_sums[r]


def _densify(matrix, max_rows: int, max_cols: int) -> np.ndarray:
    rows, cols = matrix.shape
    if rows > max_rows or cols > max_cols:
        raise ValidationError(
            f"matrix of shape {rows}x{cols} exceeds the dense cap {max_rows}x{max_cols}"
        )
    return matrix.toarray() if sp.issparse(matrix) else np.asarray(matrix, dtype=float)


def _window_indices(symbols: np.ndarray, length: int, M: int) -> np.ndarray:
    windows = np.lib.stride_tricks.sliding_window_view(symbols, length)[::WINDOW_STRIDE]
    idx = np.zeros(windows.shape[0], dtype=np.int64)
    for col in range(length):
        idx = idx * M + windows[:, col]
    return idx


def build_stats(obs: ObservationSequence, p: int, s: int) -> PrefixSuffixStats:
    """Count prefix-suffix windows of ``obs``.

    Raises :class:`SequenceTooShort` when the sequence has fewer than
    ``p + s`` symbols.
    """
    if p < 1 or s < 1:
        raise ValidationError("prefix and suffix lengths must be at least 1")
    M = obs.alphabet_size
    if (p + s) * np.log2(max(M, 2)) > 62:
        raise ValidationError("p + s too large for 64-bit string indices")
    T = len(obs)
    if T < p + s:
        raise SequenceTooShort(f"sequence of length {T} has no windows of length {p + s}")
    sym = obs.symbols
    ncols = M ** s
    joint = _window_indices(sym, p + s, M)
    keys, n = np.unique(joint, return_counts=True)
    prefix, suffix = np.divmod(keys, ncols)
    retained, row = np.unique(prefix, return_inverse=True)
    R = sp.csr_matrix((n.astype(np.int64), (row, suffix)), shape=(retained.size, ncols))
    G = np.asarray(R.sum(axis=1)).ravel().astype(np.int64)
    F = sp.csr_matrix((R.data / np.repeat(G, np.diff(R.indptr)), R.indices, R.indptr),
                      shape=R.shape)
    return PrefixSuffixStats(p, s, M, retained, G, R, F, int(joint.size))


def weighted_frequencies(stats: PrefixSuffixStats) -> sp.csr_matrix:
    """``diag(G) @ F`` over the retained rows."""
    if stats.empty or stats.retained_rows.size == 0:
        raise EmptyStats("statistics contain no windows")
    return sp.diags(stats.row_sums.astype(float)) @ stats.frequencies


def format_stats(stats: PrefixSuffixStats) -> str:
    M = stats.alphabet_size
    lines = []
    for u, v, n, f in stats.items():
        pre = "".join(str(k) for k in index_to_string(u, stats.p, M))
        suf = "".join(str(k) for k in index_to_string(v, stats.s, M))
        lines.append(f"{pre} {suf} {n} {f:.12g}")
    return "\n".join(lines) + ("\n" if lines else "")


def parse_observations(text: str) -> ObservationSequence:
    tokens = text.split()
    if len(tokens) < 2 or tokens[0] != "M":
        raise ValidationError("observation file must start with a 'M <alphabet_size>' header")
    try:
        M = int(tokens[1])
        symbols = np.array([int(t) for t in tokens[2:]], dtype=np.int64)
    except ValueError as exc:
        raise ValidationError(f"malformed observation file: {exc}") from exc
    return ObservationSequence(symbols, M)


def format_observations(obs: ObservationSequence, per_line: int = 50) -> str:
    lines = [f"M {obs.alphabet_size}"]
    sym = obs.symbols
    for start in range(0, sym.size, per_line):
        lines.append(" ".join(str(int(x)) for x in sym[start:start + per_line]))
    return "\n".join(lines) + "\n"


def read_observations(path) -> ObservationSequence:
    with open(path) as fh:
        return parse_observations(fh.read())


def write_observations(obs: ObservationSequence, path) -> None:
    with open(path, "w") as fh:
        fh.write(format_observations(obs))
