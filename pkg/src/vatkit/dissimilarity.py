"""Pairwise dissimilarity matrices and the Gaussian-kernel transform."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist, pdist, squareform

from .data_io import EmbeddingSet, read_dvm
from .errors import VatkitError

METRICS = ("euclidean", "cosine")
TAGS = ("euclidean", "cosine", "precomputed", "kernel_transformed")


@dataclass(frozen=True)
class DissimilarityMatrix:
    values: np.ndarray
    metric_tag: str = "precomputed"

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] != v.shape[1] or v.shape[0] < 1:
            raise VatkitError(f"dissimilarity matrix must be square and non-empty, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise VatkitError("dissimilarity matrix has non-finite entries")
        if np.any(v < 0):
            raise VatkitError("dissimilarity matrix has negative entries")
        if np.any(np.diag(v) != 0):
            raise VatkitError("dissimilarity matrix diagonal must be zero")
        if not np.array_equal(v, v.T):
            raise VatkitError("dissimilarity matrix is not symmetric")
        if self.metric_tag not in TAGS:
            raise VatkitError(f"unknown metric tag {self.metric_tag!r}")
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.shape[0]


def _as_matrix(X) -> np.ndarray:
    return X.data if isinstance(X, EmbeddingSet) else np.asarray(X, dtype=np.float64)


def check_metric(metric: str) -> str:
    if metric not in METRICS:
        raise VatkitError(f"unknown metric {metric!r}; expected one of {METRICS}")
    return metric


def zero_norm_rows(X: np.ndarray) -> np.ndarray:
    return np.flatnonzero(~np.any(X != 0, axis=1))


def cross_distances(A: np.ndarray, B: np.ndarray, metric: str) -> np.ndarray:
    """Rectangular |A| x |B| distances under ``metric``."""
    d = cdist(A, B, metric)
    return _clamp_cosine(d) if metric == "cosine" else d


def _clamp_cosine(d: np.ndarray) -> np.ndarray:
    d[(d < 0) & (d > -1e-12)] = 0.0
    return np.clip(d, 0.0, 2.0)


def pairwise_dissimilarity(X, metric: str = "euclidean") -> DissimilarityMatrix:
    """Full N x N dissimilarity matrix.

    Euclidean entries are ``||x_i - x_j||``; cosine entries are
    ``1 - <x_i, x_j> / (||x_i|| ||x_j||)`` clamped to [0, 2]. Only the upper
    triangle is computed and then mirrored, so symmetry is exact.
    """
    X = _as_matrix(X)
    check_metric(metric)
    n = X.shape[0]
    if metric == "cosine":
        bad = zero_norm_rows(X)
        if bad.size:
            raise VatkitError(f"row {bad[0]} has zero norm; cosine dissimilarity undefined")
    if n == 1:
        return DissimilarityMatrix(np.zeros((1, 1)), metric)
    condensed = pdist(X, metric)
    if metric == "cosine":
        condensed = _clamp_cosine(condensed)
    return DissimilarityMatrix(squareform(condensed, checks=False), metric)


def rbf_kernel_transform(D: DissimilarityMatrix, gamma: float) -> DissimilarityMatrix:
    """``1 - exp(-gamma * d**2)``: Gaussian similarity turned back into a dissimilarity."""
    if not gamma > 0:
        raise VatkitError(f"kernel gamma must be positive, got {gamma}")
    values = -np.expm1(-gamma * np.square(D.values))
    np.fill_diagonal(values, 0.0)
    return DissimilarityMatrix(values, "kernel_transformed")


def load_dissimilarity(path) -> DissimilarityMatrix:
    return DissimilarityMatrix(read_dvm(path), "precomputed")
