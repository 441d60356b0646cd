"""Per-sample weighted classification losses and their logit gradients.

Both losses normalize by the total sample weight, so duplicating a sample is
exactly equivalent to doubling its weight, and a zero total weight yields
zero loss and zero gradients rather than a division error.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigurationError
from .activations import log_softmax, sigmoid, softmax


def _one_hot(labels: np.ndarray, n_classes: int) -> np.ndarray:
    y = np.zeros((len(labels), n_classes))
    y[np.arange(len(labels)), labels] = 1.0
    return y


def weighted_cross_entropy(
    logits: np.ndarray,
    labels: np.ndarray,
    weights: np.ndarray | None = None,
    output: str = "softmax",
) -> tuple[float, np.ndarray]:
    """(scalar loss, dloss/dlogits) for a batch.

    ``output='softmax'`` is categorical cross-entropy over mutually
    exclusive classes; ``output='sigmoid'`` scores each class as an
    independent binary decision and sums the per-class terms.
    """
    logits = np.asarray(logits, dtype=float)
    labels = np.asarray(labels, dtype=int)
    n, n_classes = logits.shape
    if labels.shape != (n,):
        raise ConfigurationError("labels must be a vector matching the batch")
    if np.any(labels < 0) or np.any(labels >= n_classes):
        raise ConfigurationError("label out of range for the logit width")

    if weights is None:
        w = np.ones(n)
    else:
        w = np.asarray(weights, dtype=float)
        if w.shape != (n,):
            raise ConfigurationError("weights must be a vector matching the batch")
        if np.any(w < 0):
            raise ConfigurationError("weights must be >= 0")
    w_total = float(np.sum(w))
    if w_total == 0.0:
        return 0.0, np.zeros_like(logits)

    y = _one_hot(labels, n_classes)
    if output == "softmax":
        logp = log_softmax(logits, axis=1)
        loss = float(-np.sum(w * logp[np.arange(n), labels]) / w_total)
        dlogits = (softmax(logits, axis=1) - y) * (w / w_total)[:, None]
    elif output == "sigmoid":
        # -log(sigmoid(z)) = log(1 + exp(-z)) and its mirror, kept in log space
        per_class = y * np.logaddexp(0.0, -logits) + (1.0 - y) * np.logaddexp(0.0, logits)
        loss = float(np.sum(w * per_class.sum(axis=1)) / w_total)
        dlogits = (sigmoid(logits) - y) * (w / w_total)[:, None]
    else:
        raise ConfigurationError("output must be 'softmax' or 'sigmoid'")
    return loss, dlogits
