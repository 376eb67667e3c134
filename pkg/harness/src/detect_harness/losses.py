"""Class-weighted binary cross-entropy for the imbalanced detection task."""

from __future__ import annotations

import numpy as np


def class_weights(class_counts: dict[int, int]) -> tuple[float, float]:
    """(w0, w1) with w_c = N / (2 * n_c): inversely proportional to size,
    normalized so balanced classes give unit weights."""
    n0 = class_counts.get(0, 0)
    n1 = class_counts.get(1, 0)
    if n0 == 0 or n1 == 0:
        raise ValueError("both classes need at least one sample")
    total = n0 + n1
    return total / (2.0 * n0), total / (2.0 * n1)


def weighted_bce(
    predictions: np.ndarray, labels: np.ndarray, class_counts: dict[int, int]
) -> float:
    """Summed weighted BCE: -sum(w1*y*log(p) + w0*(1-y)*log(1-p))."""
    p = np.asarray(predictions, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64)
    if np.any((p <= 0) | (p >= 1)):
        raise ValueError("predictions must lie strictly inside (0, 1)")
    w0, w1 = class_weights(class_counts)
    terms = w1 * y * np.log(p) + w0 * (1.0 - y) * np.log(1.0 - p)
    return float(-np.sum(terms))
