"""Slow, obviously-correct reference implementations used only by tests.

None of these share code with the package under test.
"""

import itertools
import math

import numpy as np


def random_distinct_matrix(n, rng):
    """Symmetric zero-diagonal matrix whose off-diagonal weights are a
    random permutation of 1..n(n-1)/2 (so all weights are distinct)."""
    m = n * (n - 1) // 2
    weights = rng.permutation(m) + 1.0
    D = np.zeros((n, n))
    iu = np.triu_indices(n, 1)
    D[iu] = weights
    return D + D.T


def brute_force_minimax(D):
    """Min over every simple path of the max edge on it, by full DFS enumeration."""
    n = len(D)
    best = [[math.inf] * n for _ in range(n)]
    for s in range(n):
        best[s][s] = 0.0
        stack = [(s, 1 << s, 0.0)]
        while stack:
            node, visited, worst = stack.pop()
            for nxt in range(n):
                if visited & (1 << nxt):
                    continue
                w = max(worst, D[node][nxt])
                if w < best[s][nxt]:
                    best[s][nxt] = w
                stack.append((nxt, visited | (1 << nxt), w))
    return np.array(best)


def kruskal_mst(D):
    """Edges (u, v, w) of an MST via sorted edges + union-find."""
    n = len(D)
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    edges = sorted((D[i][j], i, j) for i in range(n) for j in range(i + 1, n))
    tree = []
    for w, i, j in edges:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
            tree.append((i, j, w))
    return tree


def mst_path_max(D):
    """Max edge on the (Kruskal) MST path between every pair."""
    n = len(D)
    adj = {i: [] for i in range(n)}
    for i, j, w in kruskal_mst(D):
        adj[i].append((j, w))
        adj[j].append((i, w))
    out = np.zeros((n, n))
    for s in range(n):
        seen = {s: 0.0}
        frontier = [s]
        while frontier:
            u = frontier.pop()
            for v, w in adj[u]:
                if v not in seen:
                    seen[v] = max(seen[u], w)
                    frontier.append(v)
        for v, w in seen.items():
            out[s, v] = w
    return out


def single_linkage(D, k):
    """Naive agglomerative single linkage, merged down to k clusters."""
    clusters = [{i} for i in range(len(D))]
    while len(clusters) > k:
        best = None
        for a, b in itertools.combinations(range(len(clusters)), 2):
            d = min(D[i][j] for i in clusters[a] for j in clusters[b])
            if best is None or d < best[0]:
                best = (d, a, b)
        _, a, b = best
        clusters[a] |= clusters[b]
        del clusters[b]
    return as_partition_sets(clusters)


def as_partition_sets(groups):
    return frozenset(frozenset(g) for g in groups)


def labels_to_partition(labels):
    groups = {}
    for i, lab in enumerate(labels):
        groups.setdefault(int(lab), set()).add(i)
    return as_partition_sets(groups.values())


def exhaustive_assignment(counts):
    """Best one-to-one matching weight by enumerating every injective map."""
    kp, kt = counts.shape
    best = 0
    if kp <= kt:
        for cols in itertools.permutations(range(kt), kp):
            best = max(best, sum(counts[r, c] for r, c in enumerate(cols)))
    else:
        for rows in itertools.permutations(range(kp), kt):
            best = max(best, sum(counts[r, c] for c, r in enumerate(rows)))
    return int(best)


def naive_euclidean(X):
    X = np.asarray(X, dtype=float)
    n = len(X)
    D = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            diff = X[i] - X[j]
            D[i, j] = D[j, i] = math.sqrt(float(np.dot(diff, diff)))
    return D


def naive_cosine(X):
    X = np.asarray(X, dtype=float)
    n = len(X)
    D = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            sim = float(np.dot(X[i], X[j])) / (math.sqrt(float(np.dot(X[i], X[i]))) * math.sqrt(float(np.dot(X[j], X[j]))))
            D[i, j] = D[j, i] = 1.0 - sim
    return D
