"""Reference models used in examples, tests and the bundled data files."""
import numpy as np

from .model import HmmModel


def even_process() -> HmmModel:
    """Two-state Even Process: runs of 1s between 0s have even length."""
    return HmmModel.from_matrices(
        [[[0.5, 0.0], [0.0, 0.0]],
         [[0.0, 0.5], [1.0, 0.0]]],
        [0.0, 1.0],
    )


def dhmm_equivalent() -> HmmModel:
    """Two-state model whose observation process has a deterministic representation."""
    return HmmModel.from_matrices(
        [[[0.67, 0.33], [0.0, 0.0]],
         [[0.0, 0.0], [1.0, 0.0]]],
        [0.0, 1.0],
    )


def no_finite_dhmm() -> HmmModel:
    """Three-state model with no finite deterministic equivalent."""
    return HmmModel.from_matrices(
        [[[0.5, 0.5, 0.0], [0.0, 0.5, 0.0], [0.5, 0.5, 0.0]],
         [[0.0, 0.0, 0.0], [0.0, 0.0, 0.5], [0.0, 0.0, 0.0]]],
        [1.0, 0.0, 0.0],
    )


def dhmm_equivalent_published_estimate(normalize: bool = True) -> HmmModel:
    """Two-digit transcription of a published estimate of :func:`dhmm_equivalent`.

    The printed second row sums to 1.002; with ``normalize`` each row of
    ``sum_k A(k)`` is rescaled to one so the result is a valid model.
    """
    A = np.array([[[0.6, 0.4], [0.1, 0.072]],
                  [[0.0, 4.2e-21], [0.83, 0.0]]])
    if normalize:
        A = A / A.sum(axis=(0, 2))[None, :, None]
    return HmmModel(A)


def prank_counterexample_model() -> HmmModel:
    """Four-state model whose suffix laws match the Kronecker counterexample ``D``."""
    return HmmModel.from_matrices(
        [[[0.5, 0, 0.5, 0], [0, 0, 0, 0], [0, 0.5, 0, 0.5], [0, 0, 0, 0]],
         [[0, 0, 0, 0], [0.5, 0, 0.5, 0], [0, 0, 0, 0], [0, 0.5, 0, 0.5]]]
    )


def prank_gt_rank_model() -> HmmModel:
    """Four-state model whose exact ``F(2, 5)`` has rank 3 but positive rank 4."""
    return HmmModel.from_matrices(
        [[[0.5, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]],
         [[0, 0.5, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0]]]
    )


def kronecker_counterexample():
    """The 4 x 32 matrix ``F = C @ D`` with rank 3 and positive rank 4."""
    B = np.array([[1, 1, 0, 0], [1, 0, 1, 0], [0, 1, 0, 1], [0, 0, 1, 1]], dtype=float)
    F = np.kron(B, np.ones((1, 8))) / 16.0
    C = np.array([[0.5, 0, 0.5, 0], [0.5, 0.5, 0, 0], [0, 0, 0.5, 0.5], [0, 0.5, 0, 0.5]])
    D = np.kron(np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=float),
                np.ones((1, 8))) / 8.0
    return F, C, D


MODELS = {
    "even": even_process,
    "dhmm-equivalent": dhmm_equivalent,
    "no-finite-dhmm": no_finite_dhmm,
    "dhmm-equivalent-estimate": dhmm_equivalent_published_estimate,
    "prank-counterexample": prank_counterexample_model,
    "prank-gt-rank": prank_gt_rank_model,
}
