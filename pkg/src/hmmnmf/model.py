"""Hidden Markov models with joint transition-emission matrices.

A model of order N over an alphabet of M symbols is a stack of M
non-negative N x N matrices ``A[k]`` with ``A[k][i, j]`` the probability of
moving from state i to state j while emitting symbol k.  The sum over k is
the row-stochastic transition matrix of the hidden chain.

Strings of symbols are indexed lexicographically with the first symbol most
significant, so ``j1 j2 ... jL`` maps to ``sum(j_r * M**(L - r))``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.sparse.csgraph import connected_components

from .exceptions import (
    BadInitial,
    BudgetExceeded,
    NegativeEntry,
    NonErgodic,
    RowSumViolation,
    SymbolOutOfRange,
    ValidationError,
    ZeroProbabilityPrefix,
)

ROW_SUM_TOL = 1e-9
STATIONARY_TOL = 1e-12
STATIONARY_RESIDUAL_TOL = 1e-10
STATIONARY_MAX_ITER = 100_000
ENUMERATION_BUDGET = 2 ** 20


@dataclass(frozen=True, eq=False)
class HmmModel:
    """Joint transition-emission parameterisation of a discrete HMM.

    Parameters
    ----------
    transition_emission : array_like, shape (M, N, N)
        ``transition_emission[k, i, j] = P(next state j, emit k | state i)``.
    initial_distribution : array_like, shape (N,), optional
        Start-state law used only by :func:`simulate`.
    """

    transition_emission: np.ndarray
    initial_distribution: Optional[np.ndarray] = None

    def __post_init__(self):
        A = np.array(self.transition_emission, dtype=float)
        if A.ndim != 3 or A.shape[1] != A.shape[2] or A.shape[0] < 1 or A.shape[1] < 1:
            raise ValidationError(
                f"transition_emission must have shape (M, N, N), got {A.shape}"
            )
        A.setflags(write=False)
        object.__setattr__(self, "transition_emission", A)
        if self.initial_distribution is not None:
            g = np.array(self.initial_distribution, dtype=float).ravel()
            if g.shape != (A.shape[1],):
                raise BadInitial(
                    f"initial distribution has length {g.size}, expected {A.shape[1]}"
                )
            g.setflags(write=False)
            object.__setattr__(self, "initial_distribution", g)

    @classmethod
    def from_matrices(cls, matrices: Sequence, initial_distribution=None) -> "HmmModel":
        return cls(np.stack([np.asarray(a, dtype=float) for a in matrices]),
                   initial_distribution)

    @property
    def num_states(self) -> int:
        return self.transition_emission.shape[1]

    @property
    def alphabet_size(self) -> int:
        return self.transition_emission.shape[0]

    @property
    def transition_matrix(self) -> np.ndarray:
        """State transition matrix ``sum_k A(k)``."""
        return self.transition_emission.sum(axis=0)

    def permute_states(self, perm) -> "HmmModel":
        """Relabel states so that new state ``r`` is old state ``perm[r]``."""
        perm = np.asarray(perm)
        A = self.transition_emission[:, perm][:, :, perm]
        g = None if self.initial_distribution is None else self.initial_distribution[perm]
        return HmmModel(A, g)


@dataclass(frozen=True, eq=False)
class ObservationSequence:
    """A sequence of integer symbols drawn from ``range(alphabet_size)``."""

    symbols: np.ndarray
    alphabet_size: int

    def __post_init__(self):
        s = np.asarray(self.symbols)
        if s.size == 0:
            s = np.zeros(0, dtype=np.int64)
        if s.ndim != 1:
            raise ValidationError("observation sequence must be one-dimensional")
        if not np.issubdtype(s.dtype, np.integer):
            if not np.all(np.equal(np.mod(s, 1), 0)):
                raise SymbolOutOfRange("observations must be integers")
        s = s.astype(np.int64)
        if int(self.alphabet_size) < 1:
            raise ValidationError("alphabet size must be positive")
        if s.size and (s.min() < 0 or s.max() >= self.alphabet_size):
            raise SymbolOutOfRange(
                f"symbols must lie in [0, {self.alphabet_size}), "
                f"found range [{s.min()}, {s.max()}]"
            )
        s.setflags(write=False)
        object.__setattr__(self, "symbols", s)
        object.__setattr__(self, "alphabet_size", int(self.alphabet_size))

    def __len__(self):
        return self.symbols.size


def validate(model: HmmModel) -> None:
    """Raise if ``model`` is not a valid HMM; return ``None`` otherwise."""
    A = model.transition_emission
    if not np.all(np.isfinite(A)):
        raise NegativeEntry("transition-emission matrices contain non-finite values")
    if np.any(A < 0):
        k, i, j = np.argwhere(A < 0)[0]
        raise NegativeEntry(f"A({k})[{i},{j}] = {A[k, i, j]!r} is negative")
    rows = A.sum(axis=(0, 2))
    bad = np.flatnonzero(np.abs(rows - 1.0) > ROW_SUM_TOL)
    if bad.size:
        raise RowSumViolation(
            f"row {bad[0]} of sum_k A(k) sums to {rows[bad[0]]!r}, expected 1"
        )
    g = model.initial_distribution
    if g is not None:
        if not np.all(np.isfinite(g)) or np.any(g < 0) or abs(g.sum() - 1.0) > ROW_SUM_TOL:
            raise BadInitial("initial distribution must be non-negative and sum to 1")


def _recurrent_classes(P: np.ndarray) -> list:
    n_comp, labels = connected_components(P > 0, directed=True, connection="strong")
    closed = []
    for c in range(n_comp):
        members = labels == c
        if not np.any(P[np.ix_(members, ~members)] > 0):
            closed.append(np.flatnonzero(members))
    return closed


def _period(P: np.ndarray, members: np.ndarray) -> int:
    """Period of a closed class: gcd of ``level[u] + 1 - level[v]`` over its edges."""
    sub = P[np.ix_(members, members)] > 0
    level = np.full(members.size, -1)
    level[0] = 0
    frontier = [0]
    while frontier:
        nxt = []
        for u in frontier:
            for v in np.flatnonzero(sub[u]):
                if level[v] < 0:
                    level[v] = level[u] + 1
                    nxt.append(v)
        frontier = nxt
    g = 0
    for u, v in zip(*np.nonzero(sub)):
        g = math.gcd(g, int(level[u] + 1 - level[v]))
    return g


def stationary_distribution(model: HmmModel) -> np.ndarray:
    """Stationary law of the hidden chain by power iteration from uniform.

    Raises :class:`NonErgodic` when the chain has more than one recurrent
    class, when that class is periodic, or when the iteration fails to settle.
    """
    validate(model)
    P = model.transition_matrix
    classes = _recurrent_classes(P)
    if len(classes) != 1:
        raise NonErgodic(f"chain has {len(classes)} recurrent classes")
    period = _period(P, classes[0])
    if period != 1:
        raise NonErgodic(f"recurrent class is periodic with period {period}")
    n = P.shape[0]
    pi = np.full(n, 1.0 / n)
    for _ in range(STATIONARY_MAX_ITER):
        nxt = pi @ P
        nxt /= nxt.sum()
        if np.abs(nxt - pi).sum() < STATIONARY_TOL:
            pi = nxt
            break
        pi = nxt
    residual = np.abs(pi @ P - pi).sum()
    if residual >= STATIONARY_RESIDUAL_TOL:
        raise NonErgodic(
            f"power iteration did not converge (residual {residual:.3g})"
        )
    return pi


def simulate(model: HmmModel, length: int, seed=None) -> ObservationSequence:
    """Draw ``length`` symbols from ``model``.

    The start state is drawn from the initial distribution if the model has
    one, otherwise from the stationary distribution.
    """
    validate(model)
    if length < 0:
        raise ValidationError("length must be non-negative")
    M, N = model.alphabet_size, model.num_states
    if length == 0:
        return ObservationSequence(np.zeros(0, dtype=np.int64), M)
    rng = np.random.default_rng(seed)
    start = model.initial_distribution
    if start is None:
        start = stationary_distribution(model)
    # joint (k, j) outcomes per source state, flattened as k * N + j
    joint = np.transpose(model.transition_emission, (1, 0, 2)).reshape(N, M * N)
    cdf = np.cumsum(joint, axis=1)
    cdf /= cdf[:, -1:]
    u = rng.random(length)
    state = int(rng.choice(N, p=start / start.sum()))
    out = np.empty(length, dtype=np.int64)
    for t in range(length):
        idx = min(int(np.searchsorted(cdf[state], u[t], side="right")), M * N - 1)
        out[t], state = divmod(idx, N)
    return ObservationSequence(out, M)


def string_to_index(symbols: Sequence[int], alphabet_size: int) -> int:
    idx = 0
    for k in symbols:
        idx = idx * alphabet_size + int(k)
    return idx


def index_to_string(index: int, length: int, alphabet_size: int) -> list:
    out = []
    for _ in range(length):
        index, k = divmod(index, alphabet_size)
        out.append(k)
    return out[::-1]


def _check_budget(alphabet_size: int, n: int, budget: int) -> None:
    if alphabet_size ** n > budget:
        raise BudgetExceeded(
            f"{alphabet_size}^{n} strings exceed the enumeration budget of {budget}"
        )


def _forward_all_strings(A: np.ndarray, start: np.ndarray, n: int) -> np.ndarray:
    """Row vectors ``start @ A(y1) @ ... @ A(yn)`` for every string, lexicographic.

    ``start`` has shape (B, N); the result has shape (B, M**n, N).
    """
    M, N = A.shape[0], A.shape[1]
    alpha = start[:, None, :]
    for _ in range(n):
        # appending a symbol makes it the least significant digit
        alpha = np.einsum("bai,kij->bakj", alpha, A).reshape(start.shape[0], -1, N)
    return alpha


def suffix_distributions(model: HmmModel, length: int,
                         budget: int = ENUMERATION_BUDGET) -> np.ndarray:
    """All per-state suffix laws at once, shape (N, M**length)."""
    if length < 1:
        raise ValidationError("suffix length must be at least 1")
    validate(model)
    _check_budget(model.alphabet_size, length, budget)
    N = model.num_states
    return _forward_all_strings(model.transition_emission, np.eye(N), length).sum(axis=2)


def suffix_distribution(model: HmmModel, state: int, length: int,
                        budget: int = ENUMERATION_BUDGET) -> np.ndarray:
    """Law of the next ``length`` symbols given the chain sits in ``state``."""
    if not 0 <= state < model.num_states:
        raise ValidationError(f"state {state} out of range")
    if length < 1:
        raise ValidationError("suffix length must be at least 1")
    validate(model)
    _check_budget(model.alphabet_size, length, budget)
    e = np.zeros((1, model.num_states))
    e[0, state] = 1.0
    return _forward_all_strings(model.transition_emission, e, length)[0].sum(axis=1)


def prefix_state_posterior(model: HmmModel, prefix: Sequence[int], pi=None) -> np.ndarray:
    """State law right after observing ``prefix`` in stationarity."""
    validate(model)
    if pi is None:
        pi = stationary_distribution(model)
    v = np.asarray(pi, dtype=float)
    for k in prefix:
        if not 0 <= int(k) < model.alphabet_size:
            raise SymbolOutOfRange(f"symbol {k} out of range")
        v = v @ model.transition_emission[int(k)]
    total = v.sum()
    if total <= 0:
        raise ZeroProbabilityPrefix(f"prefix {list(prefix)} has probability zero")
    return v / total


def finite_dimensional_distribution(model: HmmModel, n: int,
                                    budget: int = ENUMERATION_BUDGET) -> np.ndarray:
    """Stationary probability of every length-``n`` string, lexicographic order."""
    if n < 1:
        raise ValidationError("n must be at least 1")
    validate(model)
    _check_budget(model.alphabet_size, n, budget)
    pi = stationary_distribution(model)
    return _forward_all_strings(model.transition_emission, pi[None, :], n)[0].sum(axis=1)


def analytic_factors(model: HmmModel, p: int, s: int,
                     budget: int = ENUMERATION_BUDGET):
    """Exact prefix/suffix factors of a model.

    Returns ``(rows, C, D, prefix_probs)`` where ``rows`` lists the indices of
    prefixes with positive probability, ``C[u]`` is the state posterior after
    prefix ``rows[u]`` and ``D`` holds the per-state suffix laws.  The product
    ``C @ D`` is the limiting prefix-suffix frequency matrix.
    """
    validate(model)
    _check_budget(model.alphabet_size, p, budget)
    pi = stationary_distribution(model)
    alpha = _forward_all_strings(model.transition_emission, pi[None, :], p)[0]
    probs = alpha.sum(axis=1)
    rows = np.flatnonzero(probs > 0)
    C = alpha[rows] / probs[rows, None]
    D = suffix_distributions(model, s, budget)
    return rows, C, D, probs[rows]


# ---------------------------------------------------------------------------
# text format


def format_model(model: HmmModel) -> str:
    N, M = model.num_states, model.alphabet_size
    lines = [f"{N} {M}"]
    for k in range(M):
        lines.append(f"A {k}")
        for row in model.transition_emission[k]:
            lines.append(" ".join(f"{x:.17g}" for x in row))
    if model.initial_distribution is not None:
        lines.append("G")
        lines.append(" ".join(f"{x:.17g}" for x in model.initial_distribution))
    return "\n".join(lines) + "\n"


def parse_model(text: str) -> HmmModel:
    lines = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    try:
        N, M = int(lines[0][0]), int(lines[0][1])
        pos = 1
        mats = []
        for k in range(M):
            head = lines[pos]
            if head[0] != "A" or int(head[1]) != k:
                raise ValidationError(f"expected 'A {k}', got {' '.join(head)!r}")
            rows = [[float(x) for x in ln] for ln in lines[pos + 1: pos + 1 + N]]
            if len(rows) != N or any(len(r) != N for r in rows):
                raise ValidationError(f"matrix A {k} must be {N}x{N}")
            mats.append(rows)
            pos += 1 + N
        gamma = None
        if pos < len(lines):
            if lines[pos] != ["G"] or pos + 1 >= len(lines):
                raise ValidationError("trailing content after matrices; expected 'G' line")
            gamma = [float(x) for x in lines[pos + 1]]
            if pos + 2 != len(lines):
                raise ValidationError("unexpected content after initial distribution")
    except (IndexError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"malformed model file: {exc}") from exc
    model = HmmModel(np.array(mats, dtype=float), gamma)
    validate(model)
    return model


def read_model(path) -> HmmModel:
    with open(path) as fh:
        return parse_model(fh.read())


def write_model(model: HmmModel, path) -> None:
    with open(path, "w") as fh:
        fh.write(format_model(model))
