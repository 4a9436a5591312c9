"""VAT reordering, the iVAT minimax transform, and MST-cut partitions.

VAT visits objects in Prim order over the complete graph weighted by the
dissimilarity matrix. The recorded connect edges form a minimum spanning
tree, so the same ordering drives three things: the reordered image, the
minimax (iVAT) matrix, and single-linkage partitions obtained by deleting
the largest tree edges.

Ties are broken toward the smallest original index everywhere, which makes
every output a deterministic function of the matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dissimilarity import DissimilarityMatrix
from .errors import VatkitError

DEFAULT_K_MAX = 15


@dataclass(frozen=True)
class VatOrdering:
    """Prim visiting order.

    ``order[t]`` is the original index placed at position ``t``;
    ``connect_magnitudes[t]`` is the weight of the edge that attached it and
    ``connect_parent[t]`` the *position* of the object it attached to.
    Position 0 is the seed: magnitude 0, parent 0.
    """

    order: np.ndarray
    connect_magnitudes: np.ndarray
    connect_parent: np.ndarray

    @property
    def n(self) -> int:
        return self.order.shape[0]

    def tree_edges(self):
        """MST edges as (original index, original index, weight)."""
        o = self.order
        return [(int(o[self.connect_parent[t]]), int(o[t]), float(self.connect_magnitudes[t]))
                for t in range(1, self.n)]


@dataclass(frozen=True)
class ReorderedMatrix:
    values: np.ndarray
    ordering: VatOrdering
    transformed: str  # "raw" (VAT) or "minimax" (iVAT)


@dataclass(frozen=True)
class ClusterEstimate:
    k_p: int
    cut_positions: np.ndarray
    labels: np.ndarray


def _values(D) -> np.ndarray:
    return D.values if isinstance(D, DissimilarityMatrix) else np.asarray(D, dtype=np.float64)


def vat_reorder(D) -> VatOrdering:
    d = _values(D)
    n = d.shape[0]
    order = np.zeros(n, dtype=np.int64)
    mags = np.zeros(n)
    parent = np.zeros(n, dtype=np.int64)
    if n == 1:
        return VatOrdering(order, mags, parent)

    # row-major argmax: smallest row, then smallest column, among maxima
    start = int(np.argmax(d)) // n
    order[0] = start
    selected = np.zeros(n, dtype=bool)
    selected[start] = True
    best = d[start].copy()
    best[start] = np.inf
    best_parent = np.zeros(n, dtype=np.int64)

    for t in range(1, n):
        j = int(np.argmin(best))
        order[t] = j
        mags[t] = best[j]
        parent[t] = best_parent[j]
        selected[j] = True
        best[j] = np.inf
        row = d[j]
        # strict '<' keeps the earliest-selected parent on ties
        closer = (row < best) & ~selected
        best[closer] = row[closer]
        best_parent[closer] = t
    return VatOrdering(order, mags, parent)


def reorder(D, ordering: VatOrdering) -> ReorderedMatrix:
    d = _values(D)
    _check_size(d, ordering)
    o = ordering.order
    return ReorderedMatrix(d[np.ix_(o, o)], ordering, "raw")


def _check_size(d: np.ndarray, ordering: VatOrdering) -> None:
    if d.shape[0] != ordering.n:
        raise VatkitError(f"ordering has {ordering.n} objects but matrix is {d.shape[0]}x{d.shape[1]}")


def ivat_transform(D, ordering: VatOrdering) -> ReorderedMatrix:
    """Minimax path distances, in VAT order.

    Object at position ``r`` hangs off position ``parent[r]`` in the Prim
    tree, so its bottleneck distance to any earlier position ``c`` is the
    larger of its own connect edge and the parent's bottleneck to ``c``.
    """
    d = _values(D)
    _check_size(d, ordering)
    n = ordering.n
    mags = ordering.connect_magnitudes
    parent = ordering.connect_parent
    out = np.zeros((n, n))
    for r in range(1, n):
        row = np.maximum(out[parent[r], :r], mags[r])
        out[r, :r] = row
        out[:r, r] = row
    return ReorderedMatrix(out, ordering, "minimax")


def ivat(D) -> ReorderedMatrix:
    return ivat_transform(D, vat_reorder(D))


def mst_cut_partition(ordering: VatOrdering, k_p: int) -> ClusterEstimate:
    """Delete the ``k_p - 1`` heaviest Prim edges and label the components.

    Equal magnitudes are cut in position order. Labels are numbered by first
    appearance in VAT order and returned indexed by original object.
    """
    n = ordering.n
    k_p = int(k_p)
    if not 1 <= k_p <= n:
        raise VatkitError(f"k_p must be in [1, {n}], got {k_p}")
    mags = ordering.connect_magnitudes
    positions = np.arange(1, n)
    # stable sort on -magnitude keeps smaller positions first among ties
    ranked = positions[np.argsort(-mags[1:], kind="stable")]
    cuts = np.sort(ranked[: k_p - 1])
    is_cut = np.zeros(n, dtype=bool)
    is_cut[cuts] = True

    comp = np.zeros(n, dtype=np.int64)
    next_label = 1
    for t in range(1, n):
        if is_cut[t]:
            comp[t] = next_label
            next_label += 1
        else:
            comp[t] = comp[ordering.connect_parent[t]]
    # renumber by first appearance along the ordering
    _, first = np.unique(comp, return_index=True)
    rank = np.empty(k_p, dtype=np.int64)
    rank[np.argsort(first)] = np.arange(k_p)
    labels = np.empty(n, dtype=np.int64)
    labels[ordering.order] = rank[comp]
    return ClusterEstimate(k_p, cuts, labels)


def estimate_k(ordering: VatOrdering, k_max: int = DEFAULT_K_MAX) -> int:
    """Cluster count from the largest drop among the heaviest MST edges.

    With edges sorted as e1 >= e2 >= ..., the gap e_i - e_{i+1} is examined
    for i < min(k_max, N - 1); cutting the ``i`` edges above the largest gap
    leaves ``i + 1`` clusters. Returns 1 when all gaps are zero.
    """
    n = ordering.n
    if n < 2:
        raise VatkitError("estimate_k needs at least 2 objects")
    if not 2 <= k_max <= n:
        raise VatkitError(f"k_max must be in [2, {n}], got {k_max}")
    edges = np.sort(ordering.connect_magnitudes[1:])[::-1]
    m = min(k_max, n - 1)
    gaps = edges[: m - 1] - edges[1:m]
    if gaps.size == 0 or gaps.max() <= 0:
        return 1
    return int(np.argmax(gaps)) + 2
