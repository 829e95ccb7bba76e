"""Independent reference implementations used only by the test suite.

These deliberately avoid the library's vectorized code paths: plain
Python loops, explicit kernel evaluations, and explicit path enumeration,
so they can serve as oracles for the fast implementations.
"""

from __future__ import annotations

import math


def naive_median_bandwidth(x) -> float:
    """Median of squared pairwise distances, by sorting an explicit list."""
    x = [float(v) for v in x]
    n = len(x)
    dists = []
    for a in range(n):
        for b in range(a + 1, n):
            dists.append((x[a] - x[b]) ** 2)
    dists.sort()
    m = len(dists)
    med = dists[m // 2] if m % 2 == 1 else 0.5 * (dists[m // 2 - 1] + dists[m // 2])
    if med <= 0.0:
        return 1.0
    return math.sqrt(med / 2.0)


def naive_hsic(x, y) -> float:
    """Empirical HSIC via the three-expectation kernel expansion.

    term1: mean over joint sample pairs of k * l
    term2: (mean of k) * (mean of l)
    term3: 2 * mean over samples of (row mean of k) * (row mean of l)
    """
    x = [float(v) for v in x]
    y = [float(v) for v in y]
    n = len(x)
    sx = naive_median_bandwidth(x)
    sy = naive_median_bandwidth(y)

    def k(a, b):
        return math.exp(-((a - b) ** 2) / (2.0 * sx * sx))

    def l(a, b):
        return math.exp(-((a - b) ** 2) / (2.0 * sy * sy))

    kmat = [[k(x[a], x[b]) for b in range(n)] for a in range(n)]
    lmat = [[l(y[a], y[b]) for b in range(n)] for a in range(n)]

    term1 = 0.0
    for a in range(n):
        for b in range(n):
            term1 += kmat[a][b] * lmat[a][b]
    term1 /= n * n

    sum_k = sum(sum(row) for row in kmat)
    sum_l = sum(sum(row) for row in lmat)
    term2 = (sum_k / (n * n)) * (sum_l / (n * n))

    term3 = 0.0
    for a in range(n):
        term3 += (sum(kmat[a]) / n) * (sum(lmat[a]) / n)
    term3 *= 2.0 / n

    return term1 + term2 - term3


def _children(true_adj, u):
    d = len(true_adj)
    return [v for v in range(d) if true_adj[v][u] == 1]


def descendants(true_adj, i) -> set[int]:
    seen: set[int] = set()
    stack = [i]
    while stack:
        u = stack.pop()
        for v in _children(true_adj, u):
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return seen


def _all_paths(true_adj, i, j):
    """Simple undirected paths i..j with per-edge direction tags.

    Edge t of a path connects node t to node t+1; tag "fwd" means the true
    edge points node_t -> node_{t+1}, "bwd" the reverse.
    """
    d = len(true_adj)
    paths = []
    path = [i]
    tags: list[str] = []

    def extend():
        u = path[-1]
        for v in range(d):
            if v in path:
                continue
            for tag, present in (("fwd", true_adj[v][u] == 1), ("bwd", true_adj[u][v] == 1)):
                if not present:
                    continue
                path.append(v)
                tags.append(tag)
                if v == j:
                    paths.append((list(path), list(tags)))
                else:
                    extend()
                path.pop()
                tags.pop()

    extend()
    return paths


def _blocked(true_adj, nodes, tags, z: set[int]) -> bool:
    desc_cache: dict[int, set[int]] = {}
    for t in range(1, len(nodes) - 1):
        node = nodes[t]
        collider = tags[t - 1] == "fwd" and tags[t] == "bwd"
        if collider:
            if node not in desc_cache:
                desc_cache[node] = descendants(true_adj, node)
            if not ({node} | desc_cache[node]) & z:
                return True
        elif node in z:
            return True
    return False


def backdoor_valid(true_adj, i, j, z: set[int]) -> bool:
    """Pearl's backdoor criterion, checked path by path."""
    if z & descendants(true_adj, i):
        return False
    for nodes, tags in _all_paths(true_adj, i, j):
        if tags[0] == "bwd" and not _blocked(true_adj, nodes, tags, z):
            return False
    return True


def oracle_sid(true_adj, est_adj) -> int:
    """Parent-adjustment SID by exhaustive backdoor-path enumeration."""
    true_adj = [[int(v) for v in row] for row in true_adj]
    est_adj = [[int(v) for v in row] for row in est_adj]
    d = len(true_adj)
    count = 0
    for i in range(d):
        z = {p for p in range(d) if est_adj[i][p] == 1}
        desc_i = descendants(true_adj, i)
        for j in range(d):
            if j == i:
                continue
            if j in z:
                count += j in desc_i
            else:
                count += not backdoor_valid(true_adj, i, j, z)
    return count
