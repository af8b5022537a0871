import itertools

import numpy as np
import pytest

from hmmnmf import fixtures


@pytest.fixture
def even():
    return fixtures.even_process()


@pytest.fixture
def lam2():
    return fixtures.dhmm_equivalent()


@pytest.fixture
def lam3():
    return fixtures.no_finite_dhmm()


def best_permutation_error(A, B):
    """Max-entry error between stacked ``A(k)`` up to relabelling of states."""
    N = A.shape[1]
    best = np.inf
    for perm in itertools.permutations(range(N)):
        p = list(perm)
        best = min(best, np.abs(A[:, p][:, :, p] - B).max())
    return best


def rows_match_up_to_permutation(X, Y, tol, norm=1):
    for perm in itertools.permutations(range(X.shape[0])):
        if all(np.linalg.norm(X[list(perm)][i] - Y[i], norm) <= tol for i in range(Y.shape[0])):
            return True
    return False
