"""Scikit-learn compatible front end to the learning pipeline."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_observations, check_order, check_positive_int
from .exceptions import ValidationError
from .extract import INIT_C_CHOICES, learn
from .model import simulate, stationary_distribution
from .nmf import NmfConfig
from .spectral import DEFAULT_THRESHOLD


class NMFHMMLearner(BaseEstimator):
    """Learn the recurrent part of an HMM from a single symbol sequence.

    Parameters
    ----------
    prefix_length, suffix_length : int
        Window lengths ``p`` and ``s`` of the prefix-suffix statistics.
    order : int or "auto"
        Number of hidden states, or ``"auto"`` to read it off the singular
        value gap of the frequency matrix.
    outer_iterations : int
        Number of NMF + extraction passes; later passes are seeded from the
        previous estimate.
    threshold : float
        Ratio-to-largest cut used by the order estimate.
    noise_aware : bool
        Also treat singular values below the sampling noise floor as zero.
    weighted_spectrum : bool
        Estimate the order from ``diag(G) F`` instead of ``F``.
    init_c : {"from-lp", "from-posterior"}
        How the prefix factor is reseeded between passes.
    max_iter, tol, floor_epsilon :
        NMF stopping rule and entry floor.
    alphabet_size : int, optional
        Defaults to ``max(X) + 1``.
    random_state : int, optional
        Seed of the first NMF initialisation.

    Attributes
    ----------
    model_ : HmmModel
    spectrum_ : SpectrumReport or None
        ``None`` when the order was forced.
    history_ : list of IterationRecord
    n_states_ : int
    """

    def __init__(self, prefix_length=2, suffix_length=3, order="auto", outer_iterations=2,
                 threshold=DEFAULT_THRESHOLD, noise_aware=True, weighted_spectrum=False,
                 init_c="from-lp", max_iter=500, tol=1e-7, floor_epsilon=1e-12,
                 alphabet_size=None, random_state=0):
        self.prefix_length = prefix_length
        self.suffix_length = suffix_length
        self.order = order
        self.outer_iterations = outer_iterations
        self.threshold = threshold
        self.noise_aware = noise_aware
        self.weighted_spectrum = weighted_spectrum
        self.init_c = init_c
        self.max_iter = max_iter
        self.tol = tol
        self.floor_epsilon = floor_epsilon
        self.alphabet_size = alphabet_size
        self.random_state = random_state

    def _check_params(self):
        check_positive_int(self.prefix_length, "prefix_length")
        check_positive_int(self.suffix_length, "suffix_length", minimum=2)
        check_positive_int(self.outer_iterations, "outer_iterations")
        check_positive_int(self.max_iter, "max_iter")
        if self.init_c not in INIT_C_CHOICES:
            raise ValidationError(f"init_c must be one of {INIT_C_CHOICES}")
        if not self.threshold > 0 or not self.tol > 0 or not self.floor_epsilon > 0:
            raise ValidationError("threshold, tol and floor_epsilon must be positive")
        return check_order(self.order)

    def fit(self, X, y=None):
        order = self._check_params()
        obs = check_observations(X, self.alphabet_size)
        config = NmfConfig(self.max_iter, self.tol, self.floor_epsilon,
                           0 if self.random_state is None else self.random_state)
        result = learn(obs, self.prefix_length, self.suffix_length, order,
                       self.outer_iterations, config, self.threshold,
                       self.weighted_spectrum, self.noise_aware, self.init_c)
        self.model_ = result.model
        self.spectrum_ = result.spectrum
        self.history_ = result.history
        self.factors_ = result.factors
        self.n_states_ = result.model.num_states
        self.alphabet_size_ = obs.alphabet_size
        return self

    def score(self, X, y=None):
        """Mean log-likelihood per symbol of ``X``, started in stationarity."""
        check_is_fitted(self, "model_")
        obs = check_observations(X, self.alphabet_size_)
        A = self.model_.transition_emission
        alpha = stationary_distribution(self.model_)
        loglik = 0.0
        for k in obs.symbols:
            alpha = alpha @ A[k]
            c = alpha.sum()
            if c <= 0:
                return -np.inf
            loglik += np.log(c)
            alpha /= c
        return loglik / len(obs)

    def sample(self, n_samples, random_state=None):
        check_is_fitted(self, "model_")
        return simulate(self.model_, n_samples, random_state).symbols
