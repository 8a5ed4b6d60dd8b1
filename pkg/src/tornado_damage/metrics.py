"""Scalar performance metrics on the transformed outcome scale."""

from __future__ import annotations

import numpy as np

from .errors import OneClassOnly, ShapeMismatch, ZeroVariance
from .zero_inflated import DAMAGE_THRESHOLD


def _paired(pred, truth) -> tuple[np.ndarray, np.ndarray]:
    pred = np.asarray(pred, dtype=np.float64)
    truth = np.asarray(truth, dtype=np.float64)
    if pred.shape != truth.shape or pred.ndim != 1:
        raise ShapeMismatch(f"prediction shape {pred.shape} != truth shape {truth.shape}")
    return pred, truth


def mse(pred, truth) -> float:
    pred, truth = _paired(pred, truth)
    return float(np.mean((pred - truth) ** 2))


def r2(pred, truth) -> float:
    pred, truth = _paired(pred, truth)
    sst = float(np.sum((truth - truth.mean()) ** 2))
    if sst == 0.0:
        raise ZeroVariance("truth values are constant; r2 undefined")
    sse = float(np.sum((pred - truth) ** 2))
    return 1.0 - sse / sst


def accuracy(probs, labels, threshold: float = DAMAGE_THRESHOLD) -> float:
    probs, labels = _paired(probs, labels)
    return float(np.mean((probs >= threshold) == (labels > 0.5)))


def midranks(values: np.ndarray) -> np.ndarray:
    """1-based ranks with ties assigned the mean rank of their block."""
    values = np.asarray(values)
    _, inverse, counts = np.unique(values, return_inverse=True, return_counts=True)
    ends = np.cumsum(counts)
    starts = ends - counts
    block_midrank = (starts + ends + 1) / 2.0  # mean of start+1 .. end, 1-based
    return block_midrank[inverse]


def auroc(scores, labels) -> float:
    """Mann-Whitney AUROC via rank statistics; ties count half."""
    scores, labels = _paired(scores, labels)
    positive = labels > 0.5
    n_pos = int(np.sum(positive))
    n_neg = scores.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise OneClassOnly(f"need both classes, got {n_pos} positives / {n_neg} negatives")
    ranks = midranks(scores)
    rank_sum = float(np.sum(ranks[positive]))
    return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)
