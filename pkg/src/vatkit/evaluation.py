"""External partition scores: Kuhn-Munkres partition accuracy and NMI."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import VatkitError


@dataclass(frozen=True)
class ContingencyTable:
    counts: np.ndarray  # k_pred x k_true
    n_total: int


def _check_pair(pred, truth):
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.ndim != 1 or truth.ndim != 1:
        raise VatkitError("label vectors must be 1-D")
    if pred.size != truth.size:
        raise VatkitError(f"length mismatch: {pred.size} predicted vs {truth.size} true labels")
    if pred.size == 0:
        raise VatkitError("empty label vectors")
    return pred, truth


def contingency(pred, truth) -> ContingencyTable:
    pred, truth = _check_pair(pred, truth)
    _, p = np.unique(pred, return_inverse=True)
    _, t = np.unique(truth, return_inverse=True)
    counts = np.zeros((p.max() + 1, t.max() + 1), dtype=np.int64)
    np.add.at(counts, (p, t), 1)
    return ContingencyTable(counts, int(pred.size))


def best_assignment_weight(counts: np.ndarray) -> int:
    """Maximum total count over one-to-one cluster/class matchings.

    The table is zero-padded to square, so surplus clusters or classes
    simply match nothing.
    """
    k = max(counts.shape)
    square = np.zeros((k, k), dtype=np.int64)
    square[: counts.shape[0], : counts.shape[1]] = counts
    rows, cols = linear_sum_assignment(square, maximize=True)
    return int(square[rows, cols].sum())


def partition_accuracy(pred, truth) -> float:
    """Percentage of objects correctly labelled under the best label matching."""
    table = contingency(pred, truth)
    return 100.0 * best_assignment_weight(table.counts) / table.n_total


def _entropy(counts: np.ndarray, n: int) -> float:
    p = counts[counts > 0] / n
    return float(-np.sum(p * np.log(p)))


def nmi(pred, truth) -> float:
    """2 I(U;V) / (H(U) + H(V)), natural logs.

    Both partitions trivial (one cluster each) gives 1; exactly one trivial
    gives 0.
    """
    table = contingency(pred, truth)
    c, n = table.counts, table.n_total
    h_pred = _entropy(c.sum(axis=1), n)
    h_true = _entropy(c.sum(axis=0), n)
    if h_pred == 0.0 and h_true == 0.0:
        return 1.0
    if h_pred == 0.0 or h_true == 0.0:
        return 0.0
    mi = h_pred + h_true - _entropy(c.ravel(), n)
    return float(min(max(2.0 * mi / (h_pred + h_true), 0.0), 1.0))
