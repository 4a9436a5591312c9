import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vatkit.errors import VatkitError
from vatkit.sampling import group_quotas, maximin_select, mmrs_sample, npr_group

POINTS = np.array([[0.0], [1.0], [10.0]])


def test_maximin_hand_example():
    # row sums 11, 10, 19 -> start at 10; then 0 (min-dist 10 beats 9)
    assert maximin_select(POINTS, 2).tolist() == [2, 0]
    assert maximin_select(POINTS, 1).tolist() == [2]
    assert sorted(maximin_select(POINTS, 3).tolist()) == [0, 1, 2]


def test_maximin_range():
    with pytest.raises(VatkitError):
        maximin_select(POINTS, 4)
    with pytest.raises(VatkitError):
        maximin_select(POINTS, 0)


def test_npr_hand_example():
    assert npr_group(POINTS, [2, 0]).tolist() == [1, 1, 0]
    assert npr_group(POINTS, [1]).tolist() == [0, 0, 0]


def test_quota_example():
    assert group_quotas([7, 3], 4, 10).tolist() == [3, 2]


def test_full_sample_is_everything():
    X = np.random.default_rng(0).normal(size=(50, 3))
    res = mmrs_sample(X, 5, 50, seed=1)
    assert res.sample.tolist() == list(range(50))
    assert np.array_equal(res.per_group_quota, np.bincount(res.group_of, minlength=5))


def test_errors():
    X = np.zeros((5, 2))
    with pytest.raises(VatkitError):
        mmrs_sample(X, 2, 6, seed=0)
    with pytest.raises(VatkitError):
        mmrs_sample(X, 6, 3, seed=0)


def test_random_start_is_seeded():
    X = np.random.default_rng(0).normal(size=(40, 2))
    a = maximin_select(X, 4, start="random", seed=5)
    assert np.array_equal(a, maximin_select(X, 4, start="random", seed=5))


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 120), st.integers(1, 8), st.integers(1, 120), st.integers(0, 2**32 - 1),
       st.sampled_from(["euclidean", "cosine"]))
def test_mmrs_invariants(N, k, n, seed, metric):
    k = min(k, N)
    n = min(n, N)
    X = np.random.default_rng(seed).normal(size=(N, 3))
    res = mmrs_sample(X, k, n, seed, metric=metric)
    assert len(set(res.distinguished.tolist())) == k
    assert np.array_equal(res.group_of[res.distinguished], np.arange(k))
    sizes = np.bincount(res.group_of, minlength=k)
    expected = [-(-n * int(s) // N) for s in sizes]
    assert res.per_group_quota.tolist() == expected
    assert np.all(res.per_group_quota[sizes > 0] >= 1)
    assert n <= res.per_group_quota.sum() <= n + k - 1
    assert len(set(res.sample.tolist())) == res.sample.size == res.per_group_quota.sum()
    assert np.all(np.diff(res.sample) > 0)
    taken = np.bincount(res.group_of[res.sample], minlength=k)
    assert np.array_equal(taken, res.per_group_quota)
    again = mmrs_sample(X, k, n, seed, metric=metric)
    assert np.array_equal(again.sample, res.sample)


@settings(max_examples=30, deadline=None)
@given(st.integers(3, 80), st.integers(2, 10), st.integers(0, 2**32 - 1))
def test_maximin_property(N, k, seed):
    k = min(k, N)
    X = np.random.default_rng(seed).normal(size=(N, 2))
    chosen = maximin_select(X, k).tolist()
    D = np.linalg.norm(X[:, None] - X[None], axis=-1)
    assert chosen[0] == int(np.argmax(D.sum(axis=1)))
    for t in range(1, k):
        prev = chosen[:t]
        mind = D[:, prev].min(axis=1)
        unchosen = [i for i in range(N) if i not in chosen[:t + 1]]
        if unchosen:
            assert mind[chosen[t]] >= mind[unchosen].max()


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 60), st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_npr_is_nearest(N, k, seed):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(N, 2))
    protos = rng.choice(N, size=min(k, N), replace=False)
    g = npr_group(X, protos)
    d = np.linalg.norm(X[:, None] - X[protos][None], axis=-1)
    assert np.allclose(d[np.arange(N), g], d.min(axis=1))
