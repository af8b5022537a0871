"""Input checks shared by the estimator and the CLI."""
import numbers

import numpy as np

from .exceptions import ValidationError
from .model import ObservationSequence


def check_observations(X, alphabet_size=None) -> ObservationSequence:
    """Coerce ``X`` into an :class:`ObservationSequence`.

    Accepts an existing sequence, a 1-D integer array, or an ``(T, 1)``
    column as produced by scikit-learn style pipelines.
    """
    if isinstance(X, ObservationSequence):
        if alphabet_size is not None and alphabet_size != X.alphabet_size:
            raise ValidationError(
                f"alphabet size {X.alphabet_size} does not match {alphabet_size}"
            )
        return X
    arr = np.asarray(X)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim != 1:
        raise ValidationError(f"expected a 1-D symbol sequence, got shape {arr.shape}")
    if arr.size == 0:
        raise ValidationError("observation sequence is empty")
    if alphabet_size is None:
        alphabet_size = int(arr.max()) + 1
    return ObservationSequence(arr, alphabet_size)


def check_positive_int(value, name, minimum=1) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral) or value < minimum:
        raise ValidationError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)


def check_order(order):
    if order is None or order == "auto":
        return "auto"
    return check_positive_int(order, "order")
