"""Second-order tuning of a skeleton: deletion, addition, cycle removal.

The working adjacency is a d x d matrix over {-1, 0, 1} with
entries[i][j] = 1 meaning X_j -> X_i (column index is the parent). -1
marks a tentatively deleted edge: deletion cannot make up its mind which
of two co-parents is redundant, so it marks both and lets addition rejoin
whichever pair the second-order values support. Entries still at -1 when
the graph is finalized become non-edges.

All passes are single sweeps in lexicographic (i, j, k) order over
unordered pairs {j, k}, mutating the working matrix as they go, so the
whole pipeline is deterministic for a fixed input.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hsic import HsicCache
from .kernels import GAUSSIAN
from .synthdata import is_acyclic


def bidirectional(skeleton) -> np.ndarray:
    """Ternary working matrix seeded with both orientations of each skeleton edge."""
    sk = np.asarray(skeleton)
    if sk.ndim != 2 or sk.shape[0] != sk.shape[1]:
        raise ValueError(f"skeleton must be square, got shape {sk.shape}")
    if not np.array_equal(sk, sk.T):
        raise ValueError("skeleton must be symmetric")
    adj = (sk != 0).astype(np.int8)
    np.fill_diagonal(adj, 0)
    return adj


def _pair_sweep(d: int, i: int):
    for j in range(d):
        if j == i:
            continue
        for k in range(j + 1, d):
            if k != i:
                yield j, k


def delete_step(adj: np.ndarray, cache: HsicCache) -> np.ndarray:
    """Mark co-parent pairs whose summed HSIC beats neither single value.

    For every child i and pair {j, k} with both entries nonzero: if
    min(first(i,j), first(i,k)) >= second(i,{j,k}), set both entries to -1.
    Never creates edges.
    """
    adj = adj.copy()
    d = adj.shape[0]
    for i in range(d):
        for j, k in _pair_sweep(d, i):
            if adj[i, j] != 0 and adj[i, k] != 0:
                if min(cache.first_order(i, j), cache.first_order(i, k)) >= cache.second_order(i, j, k):
                    adj[i, j] = -1
                    adj[i, k] = -1
    return adj


def add_step(adj: np.ndarray, cache: HsicCache) -> np.ndarray:
    """Add co-parent pairs whose summed HSIC beats both single values.

    For every child i and pair {j, k} with neither entry equal to 1: if
    max(first(i,j), first(i,k)) < second(i,{j,k}) (strict), set both
    entries to 1. -1 entries may be rejoined. Never removes edges.
    """
    adj = adj.copy()
    d = adj.shape[0]
    for i in range(d):
        for j, k in _pair_sweep(d, i):
            if adj[i, j] != 1 and adj[i, k] != 1:
                if max(cache.first_order(i, j), cache.first_order(i, k)) < cache.second_order(i, j, k):
                    adj[i, j] = 1
                    adj[i, k] = 1
    return adj


def find_cycle(adj: np.ndarray) -> list[tuple[int, int]] | None:
    """One directed cycle among the +1 edges, or None if there is none.

    Depth-first search starting from the smallest unvisited node, children
    visited in ascending order; the first back edge closes the reported
    cycle. Returned as (parent, child) edges in traversal order.
    """
    d = adj.shape[0]
    color = np.zeros(d, dtype=np.int8)  # 0 new, 1 on stack, 2 done
    stack: list[int] = []

    def visit(u: int) -> list[tuple[int, int]] | None:
        color[u] = 1
        stack.append(u)
        for v in range(d):
            if adj[v, u] != 1:  # edge u -> v is adj[v][u]
                continue
            if color[v] == 1:
                start = stack.index(v)
                nodes = stack[start:]
                return [(nodes[a], nodes[a + 1]) for a in range(len(nodes) - 1)] + [(nodes[-1], v)]
            if color[v] == 0:
                found = visit(v)
                if found is not None:
                    return found
        stack.pop()
        color[u] = 2
        return None

    for u in range(d):
        if color[u] == 0:
            found = visit(u)
            if found is not None:
                return found
    return None


def _edge_score(adj: np.ndarray, cache: HsicCache, parent: int, child: int) -> float:
    """min over the child's other parents k of second(child, {parent, k}).

    Falls back to the first-order value when the child has no other parent.
    """
    d = adj.shape[0]
    others = [k for k in range(d) if adj[child, k] == 1 and k != parent]
    if not others:
        return cache.first_order(child, parent)
    return min(cache.second_order(child, parent, k) for k in others)


def dag_formalize(adj: np.ndarray, cache: HsicCache) -> np.ndarray:
    """Break every cycle by removing its minimal-score edge.

    Scores are recomputed against the current adjacency each round; ties
    resolve to the lexicographically smallest (child, parent). Each round
    removes exactly one edge, so the loop terminates. Only removes edges.
    """
    adj = adj.copy()
    while True:
        cycle = find_cycle(adj)
        if cycle is None:
            return adj
        best = None
        for parent, child in cycle:
            key = (_edge_score(adj, cache, parent, child), child, parent)
            if best is None or key < best:
                best = key
        adj[best[1], best[2]] = 0


def finalize(adj: np.ndarray) -> np.ndarray:
    """Keep exactly the +1 entries; -1 and 0 become non-edges. Must be acyclic."""
    learned = (np.asarray(adj) == 1).astype(np.int8)
    if not is_acyclic(learned):
        raise RuntimeError("cycle survived DAG formalization")
    return learned


@dataclass
class TuneResult:
    """Final DAG plus binary snapshots of each tuning phase."""

    learned: np.ndarray
    phases: dict[str, np.ndarray]

    PHASE_NAMES = ("skeleton", "deletion", "addition", "dag")


def tune(
    skeleton,
    data=None,
    kernel_kind: str = GAUSSIAN,
    cache: HsicCache | None = None,
    standardize: bool = False,
) -> TuneResult:
    """Full tuning pass: bidirectional seed, delete, add, formalize, finalize.

    Either ``data`` or a prebuilt ``cache`` must be given. All first- and
    second-order values are filled before the sequential passes.
    """
    if cache is None:
        if data is None:
            raise ValueError("tune needs either data or a prebuilt HsicCache")
        cache = HsicCache(data, kernel_kind=kernel_kind, standardize=standardize)
    adj = bidirectional(skeleton)
    if adj.shape[0] != cache.d:
        raise ValueError(f"skeleton is {adj.shape[0]} nodes but the dataset has {cache.d} columns")
    cache.first_order_matrix()
    cache.prefill_second_order()
    deleted = delete_step(adj, cache)
    added = add_step(deleted, cache)
    dag = dag_formalize(added, cache)
    learned = finalize(dag)
    phases = {
        "skeleton": (adj == 1).astype(np.int8),
        "deletion": (deleted == 1).astype(np.int8),
        "addition": (added == 1).astype(np.int8),
        "dag": learned.copy(),
    }
    return TuneResult(learned=learned, phases=phases)
