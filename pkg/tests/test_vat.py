import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import (brute_force_minimax, kruskal_mst, labels_to_partition, mst_path_max,
                     random_distinct_matrix, single_linkage)
from vatkit.dissimilarity import DissimilarityMatrix, pairwise_dissimilarity
from vatkit.errors import VatkitError
from vatkit.vat import VatOrdering, estimate_k, ivat, ivat_transform, mst_cut_partition, reorder, vat_reorder

# 1-D points o1=0, o2=10, o3=1
LINE = np.array([[0.0, 10.0, 1.0], [10.0, 0.0, 9.0], [1.0, 9.0, 0.0]])


def spanning_tree_weights(D):
    """Weight of every spanning tree of the complete graph, by edge-subset enumeration."""
    n = len(D)
    edges = [(i, j) for i in range(n) for j in range(i + 1, n)]
    out = []
    for subset in itertools.combinations(edges, n - 1):
        parent = list(range(n))

        def find(a):
            while parent[a] != a:
                a = parent[a]
            return a
        ok = True
        for i, j in subset:
            ri, rj = find(i), find(j)
            if ri == rj:
                ok = False
                break
            parent[ri] = rj
        if ok:
            out.append(sum(D[i][j] for i, j in subset))
    return out


def test_hand_trace_line():
    o = vat_reorder(LINE)
    assert o.order.tolist() == [0, 2, 1]
    assert o.connect_magnitudes.tolist() == [0, 1, 9]
    assert o.connect_parent.tolist() == [0, 0, 1]
    assert min(spanning_tree_weights(LINE)) == 10 == o.connect_magnitudes.sum()


def test_single_and_pair():
    o = vat_reorder(np.zeros((1, 1)))
    assert o.order.tolist() == [0] and o.connect_magnitudes.tolist() == [0]
    o = vat_reorder(np.array([[0.0, 3.0], [3.0, 0.0]]))
    assert o.order.tolist() == [0, 1] and o.connect_magnitudes.tolist() == [0, 3]


def test_tie_breaking_smallest_index():
    D = np.ones((4, 4)) - np.eye(4)
    o = vat_reorder(D)
    assert o.order.tolist() == [0, 1, 2, 3]
    assert o.connect_parent.tolist() == [0, 0, 0, 0]


def test_ivat_triangle():
    M = ivat(LINE)
    full = np.empty((3, 3))
    order = M.ordering.order
    full[np.ix_(order, order)] = M.values
    assert full[0, 1] == 9 and full[0, 2] == 1 and full[1, 2] == 9
    assert np.array_equal(full, brute_force_minimax(LINE))


def test_ivat_pair_is_identity():
    D = np.array([[0.0, 4.0], [4.0, 0.0]])
    assert np.array_equal(ivat(D).values, D)


def test_ivat_size_mismatch():
    with pytest.raises(VatkitError):
        ivat_transform(np.zeros((3, 3)), vat_reorder(np.zeros((2, 2))))


def test_raw_reorder_matches_order():
    D = random_distinct_matrix(6, np.random.default_rng(0))
    o = vat_reorder(D)
    R = reorder(D, o)
    for r, c in itertools.product(range(6), repeat=2):
        assert R.values[r, c] == D[o.order[r], o.order[c]]


def test_cut_partition_line():
    est = mst_cut_partition(vat_reorder(LINE), 2)
    assert est.cut_positions.tolist() == [2]
    assert labels_to_partition(est.labels) == frozenset({frozenset({0, 2}), frozenset({1})})


def test_cut_extremes():
    D = random_distinct_matrix(7, np.random.default_rng(3))
    o = vat_reorder(D)
    assert mst_cut_partition(o, 1).labels.tolist() == [0] * 7
    assert sorted(mst_cut_partition(o, 7).labels.tolist()) == list(range(7))
    for bad in (0, 8):
        with pytest.raises(VatkitError):
            mst_cut_partition(o, bad)


def _ordering(mags):
    n = len(mags)
    return VatOrdering(np.arange(n), np.array(mags, float), np.maximum(np.arange(n) - 1, 0))


def test_estimate_k_gap_rule():
    assert estimate_k(_ordering([0, 1, 1, 9, 1]), 5) == 2
    assert estimate_k(_ordering([0, 2, 2, 2, 2]), 5) == 1
    assert estimate_k(_ordering([0, 10, 1, 10, 1, 1]), 6) == 3
    with pytest.raises(VatkitError):
        estimate_k(_ordering([0]), 2)


def test_estimate_k_respects_kmax():
    # biggest gap sits below the 3rd edge, but kmax=3 only inspects e1-e2, e2-e3
    mags = [0, 10, 9, 8, 1, 1, 1]
    assert estimate_k(_ordering(mags), 7) == 4
    assert estimate_k(_ordering(mags), 3) == 2


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 10), st.integers(0, 2**32 - 1))
def test_mst_weight_equals_kruskal(n, seed):
    D = random_distinct_matrix(n, np.random.default_rng(seed))
    o = vat_reorder(D)
    assert o.connect_magnitudes.sum() == sum(w for _, _, w in kruskal_mst(D))
    assert sorted(o.connect_magnitudes[1:]) == sorted(w for _, _, w in kruskal_mst(D))
    assert sorted(o.order.tolist()) == list(range(n))


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 7), st.integers(0, 2**32 - 1))
def test_ivat_equals_brute_force(n, seed):
    D = random_distinct_matrix(n, np.random.default_rng(seed))
    M = ivat(D)
    o = M.ordering.order
    assert np.array_equal(M.values, brute_force_minimax(D)[np.ix_(o, o)])


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 40), st.integers(0, 2**32 - 1))
def test_ivat_equals_mst_path_max(n, seed):
    D = random_distinct_matrix(n, np.random.default_rng(seed))
    M = ivat(D)
    o = M.ordering.order
    assert np.array_equal(M.values, mst_path_max(D)[np.ix_(o, o)])


@settings(max_examples=20, deadline=None)
@given(st.integers(3, 30), st.integers(0, 2**32 - 1))
def test_ivat_ultrametric(n, seed):
    X = np.random.default_rng(seed).normal(size=(n, 3))
    V = ivat(pairwise_dissimilarity(X)).values
    # d'(i,k) <= max(d'(i,j), d'(j,k)) for all i, j, k
    bound = np.maximum(V[:, :, None], V[None, :, :])  # [i, j, k] -> max(V[i,j], V[j,k])
    assert np.all(V[:, None, :] <= bound)
    assert np.array_equal(V, V.T) and np.all(np.diag(V) == 0)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 10), st.integers(0, 2**32 - 1))
def test_permutation_invariance(n, seed):
    rng = np.random.default_rng(seed)
    D = random_distinct_matrix(n, rng)
    perm = rng.permutation(n)
    Dp = D[np.ix_(perm, perm)]
    a, b = vat_reorder(D), vat_reorder(Dp)
    assert sorted(a.connect_magnitudes) == sorted(b.connect_magnitudes)
    for k in range(1, n + 1):
        pa = labels_to_partition(mst_cut_partition(a, k).labels)
        lb = mst_cut_partition(b, k).labels
        # map permuted object positions back to original indices
        pb = frozenset(frozenset(int(perm[i]) for i in block) for block in labels_to_partition(lb))
        assert pa == pb


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 10), st.integers(0, 2**32 - 1))
def test_partition_matches_single_linkage(n, seed):
    D = random_distinct_matrix(n, np.random.default_rng(seed))
    o = vat_reorder(D)
    for k in range(1, n + 1):
        est = mst_cut_partition(o, k)
        assert labels_to_partition(est.labels) == single_linkage(D, k)
        along = est.labels[o.order]
        assert np.all(np.diff(along) >= 0)
        assert len(set(est.labels.tolist())) == k
