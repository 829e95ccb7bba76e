"""Graph-recovery metrics: confusion counts, SHD, SID, average precision.

All functions take d x d adjacency matrices in the child-row convention
(adjacency[i][j] = 1 means X_j -> X_i). The true graph must be a DAG; the
estimate may contain cycles (parent sets stay well defined, and phase
snapshots such as a bidirectionalized skeleton are legitimately cyclic).
"""

from __future__ import annotations

from dataclasses import dataclass

import networkx as nx
import numpy as np

from .synthdata import is_acyclic


@dataclass(frozen=True)
class ConfusionCounts:
    true_positive: int
    false_positive: int
    false_negative: int


@dataclass(frozen=True)
class MetricsReport:
    sid: int
    aupr: float
    shd: int
    estimated_edges: int


def _as_adjacency(graph) -> np.ndarray:
    adj = np.asarray(getattr(graph, "adjacency", graph))
    if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
        raise ValueError(f"adjacency must be square, got shape {adj.shape}")
    return (adj == 1).astype(np.int8)


def _check_same_d(true_adj: np.ndarray, est_adj: np.ndarray) -> None:
    if true_adj.shape != est_adj.shape:
        raise ValueError(f"graph size mismatch: {true_adj.shape} vs {est_adj.shape}")


def confusion(true_graph, est_graph) -> ConfusionCounts:
    """Directed-edge confusion counts.

    A reversed edge counts once in false_positive and once in
    false_negative. true_positive + false_negative equals the number of
    true edges.
    """
    t = _as_adjacency(true_graph)
    e = _as_adjacency(est_graph)
    _check_same_d(t, e)
    off = ~np.eye(t.shape[0], dtype=bool)
    t_edges = (t == 1) & off
    e_edges = (e == 1) & off
    return ConfusionCounts(
        true_positive=int((t_edges & e_edges).sum()),
        false_positive=int((e_edges & ~t_edges).sum()),
        false_negative=int((t_edges & ~e_edges).sum()),
    )


def shd(counts: ConfusionCounts) -> int:
    """Structural Hamming distance: false negatives plus false positives."""
    return counts.false_negative + counts.false_positive


def _parent_digraph(adj: np.ndarray) -> nx.DiGraph:
    d = adj.shape[0]
    g = nx.DiGraph()
    g.add_nodes_from(range(d))
    for child in range(d):
        for parent in range(d):
            if adj[child, parent]:
                g.add_edge(parent, child)
    return g


def sid(true_graph, est_graph) -> int:
    """Structural intervention distance under parent adjustment.

    Counts ordered pairs (i, j) whose interventional distribution is
    falsely inferred when adjusting for the estimated parents Z of i:

    * j in Z: the inferred effect is null, which is false exactly when j
      is a descendant of i in the true graph.
    * otherwise: false when Z is not a valid backdoor adjustment set for
      (i, j) in the true graph, i.e. Z contains a descendant of i or Z
      fails to d-separate i from j once i's outgoing edges are removed.
    """
    t = _as_adjacency(true_graph)
    e = _as_adjacency(est_graph)
    _check_same_d(t, e)
    if not is_acyclic(t):
        raise ValueError("the true graph must be a DAG")
    d = t.shape[0]
    g = _parent_digraph(t)
    descendants = {i: nx.descendants(g, i) for i in range(d)}
    backdoor_views = {}
    for i in range(d):
        view = g.copy()
        view.remove_edges_from(list(g.out_edges(i)))
        backdoor_views[i] = view
    count = 0
    for i in range(d):
        z = {int(p) for p in np.flatnonzero(e[i])}
        z_hits_descendant = not z.isdisjoint(descendants[i])
        for j in range(d):
            if j == i:
                continue
            if j in z:
                count += j in descendants[i]
            else:
                valid = not z_hits_descendant and nx.is_d_separator(
                    backdoor_views[i], {i}, {j}, z
                )
                count += not valid
    return count


def aupr(true_graph, scores) -> float:
    """Average precision of the off-diagonal score matrix against true edges.

    Step-interpolated: AP = sum_k (R_k - R_{k-1}) * P_k over thresholds at
    the distinct score values in descending order. For a binary score
    matrix this reduces to R1*P1 + (1 - R1)*pi with pi the edge prior.
    An edgeless true graph scores 0.
    """
    t = _as_adjacency(true_graph)
    sc = np.asarray(scores, dtype=float)
    _check_same_d(t, sc)
    if np.any(np.diag(sc) != 0):
        raise ValueError("score matrix must have a zero diagonal")
    off = ~np.eye(t.shape[0], dtype=bool)
    labels = t[off].astype(bool)
    values = sc[off]
    positives = int(labels.sum())
    if positives == 0:
        return 0.0
    order = np.argsort(-values, kind="stable")
    labels = labels[order]
    values = values[order]
    ap = 0.0
    prev_recall = 0.0
    tp = 0
    i = 0
    total = labels.size
    while i < total:
        j = i
        while j < total and values[j] == values[i]:
            j += 1
        tp += int(labels[i:j].sum())
        precision = tp / j
        recall = tp / positives
        ap += (recall - prev_recall) * precision
        prev_recall = recall
        i = j
    return ap


def report(true_graph, est_graph) -> MetricsReport:
    """All metrics of a binary estimate against the true DAG."""
    t = _as_adjacency(true_graph)
    e = _as_adjacency(est_graph)
    return MetricsReport(
        sid=sid(t, e),
        aupr=aupr(t, e.astype(float)),
        shd=shd(confusion(t, e)),
        estimated_edges=int(e.sum()),
    )
