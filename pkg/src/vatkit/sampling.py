"""Maximin-and-random sampling (MMRS).

Pick ``k'`` mutually far-apart prototypes, give every object to its nearest
prototype, then draw ``ceil(n * |G_j| / N)`` objects uniformly without
replacement from each group. Distances are computed on demand against the
prototypes only, so memory stays O(N * k').
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data_io import EmbeddingSet
from .dissimilarity import check_metric, cross_distances, zero_norm_rows
from .errors import VatkitError
from .rng import SplitMix64

_ROW_BLOCK = 1024


@dataclass(frozen=True)
class MmrsResult:
    distinguished: np.ndarray
    group_of: np.ndarray
    sample: np.ndarray
    per_group_quota: np.ndarray


def _matrix(X, metric: str) -> np.ndarray:
    X = X.data if isinstance(X, EmbeddingSet) else np.asarray(X, dtype=np.float64)
    check_metric(metric)
    if metric == "cosine":
        bad = zero_norm_rows(X)
        if bad.size:
            raise VatkitError(f"row {bad[0]} has zero norm; cosine dissimilarity undefined")
    return X


def row_sums(X: np.ndarray, metric: str) -> np.ndarray:
    """Sum of each object's distances to all objects, in row blocks."""
    n = X.shape[0]
    sums = np.empty(n)
    for start in range(0, n, _ROW_BLOCK):
        block = cross_distances(X[start:start + _ROW_BLOCK], X, metric)
        sums[start:start + _ROW_BLOCK] = block.sum(axis=1)
    return sums


def maximin_select(X, k_prime: int, metric: str = "euclidean", start: str = "rowsum",
                   seed: int = 0) -> np.ndarray:
    """Farthest-point prototypes.

    The first prototype is the object with the largest distance row sum
    (``start="rowsum"``) or a seeded uniform pick (``start="random"``).
    Each further prototype maximizes its distance to the nearest chosen one;
    ties go to the smallest index.
    """
    X = _matrix(X, metric)
    n = X.shape[0]
    if not 1 <= k_prime <= n:
        raise VatkitError(f"k' must be in [1, {n}], got {k_prime}")
    if start == "rowsum":
        first = int(np.argmax(row_sums(X, metric)))
    elif start == "random":
        first = SplitMix64(seed).randbelow(n)
    else:
        raise VatkitError(f"unknown maximin start rule {start!r}")

    chosen = [first]
    nearest = cross_distances(X[first:first + 1], X, metric)[0]
    nearest[first] = -np.inf
    for _ in range(1, k_prime):
        nxt = int(np.argmax(nearest))
        chosen.append(nxt)
        nearest = np.minimum(nearest, cross_distances(X[nxt:nxt + 1], X, metric)[0])
        nearest[chosen] = -np.inf
    return np.array(chosen, dtype=np.int64)


def npr_group(X, distinguished, metric: str = "euclidean") -> np.ndarray:
    """Nearest-prototype rule; ties to the smallest prototype position.

    A prototype always lands in its own group, even if it duplicates an
    earlier prototype.
    """
    X = _matrix(X, metric)
    distinguished = np.asarray(distinguished, dtype=np.int64)
    if distinguished.size == 0:
        raise VatkitError("need at least one distinguished object")
    group_of = np.empty(X.shape[0], dtype=np.int64)
    protos = X[distinguished]
    for start in range(0, X.shape[0], _ROW_BLOCK):
        d = cross_distances(X[start:start + _ROW_BLOCK], protos, metric)
        group_of[start:start + _ROW_BLOCK] = np.argmin(d, axis=1)
    group_of[distinguished] = np.arange(distinguished.size)
    return group_of


def group_quotas(group_sizes, n: int, n_total: int) -> np.ndarray:
    """``ceil(n * |G_j| / N)`` in exact integer arithmetic."""
    sizes = np.asarray(group_sizes, dtype=np.int64)
    return -((-n * sizes) // n_total)


def mmrs_sample(X, k_prime: int, n: int, seed: int, metric: str = "euclidean",
                start: str = "rowsum") -> MmrsResult:
    X = _matrix(X, metric)
    N = X.shape[0]
    if not 1 <= n <= N:
        raise VatkitError(f"sample size must be in [1, {N}], got {n}")
    if not 1 <= k_prime <= N:
        raise VatkitError(f"k' must be in [1, {N}], got {k_prime}")
    rng = SplitMix64(seed)
    # the random start consumes its own stream so the draws below do not shift
    distinguished = maximin_select(X, k_prime, metric, start=start, seed=rng.next_word())
    group_of = npr_group(X, distinguished, metric)
    sizes = np.bincount(group_of, minlength=k_prime)
    quotas = group_quotas(sizes, n, N)

    picked = []
    for j in range(k_prime):
        members = np.flatnonzero(group_of == j)
        m = members.size
        for i in range(quotas[j]):
            swap = i + rng.randbelow(m - i)
            members[i], members[swap] = members[swap], members[i]
        picked.append(members[: quotas[j]])
    sample = np.sort(np.concatenate(picked))
    return MmrsResult(distinguished, group_of, sample, quotas)
