"""Random DAGs and additive-noise-model samplers for benchmark data.

A graph is drawn by fixing a uniformly random causal order and including
each order-respecting pair as an edge independently with probability
p = s / (d*(d-1)/2), so the expected edge count is s and the result is
acyclic by construction.

Generator mechanisms (non-root node i with parent columns P and noise e):

* mlp:          sigmoid(P @ W1) @ W2 + e, W1 in R^{a x b}, W2 in R^b
* tanh:         tanh(P @ alpha) + e
* sigmoid-mix:  sigmoid(P @ alpha + e) * beta   (noise inside the sigmoid)
* abs:          |P| @ alpha + e
* mlp-tanh-mix: per node, sigmoid(P @ alpha) * beta + e  or  tanh branch
* abs-tanh-mix: per node, abs branch or tanh branch
* linear:       P @ alpha + e

Root nodes are pure noise. Weights are drawn uniformly from
[-2, -0.5) u [0.5, 2), each sign with probability one half. For the mix
models each node's branch is fixed by a coin flip when the sample is
built. sigmoid(z) = 1 / (1 + exp(-z)).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MLP = "mlp"
TANH = "tanh"
SIGMOID_MIX = "sigmoid-mix"
ABS = "abs"
MLP_TANH_MIX = "mlp-tanh-mix"
ABS_TANH_MIX = "abs-tanh-mix"
LINEAR = "linear"
MECHANISMS = (MLP, TANH, SIGMOID_MIX, ABS, MLP_TANH_MIX, ABS_TANH_MIX, LINEAR)

# per-node mechanism codes recorded in GeneratedSample.mechanisms
NODE_MLP = "mlp"
NODE_TANH = "tanh"
NODE_SIGMOID_INNER = "sigmoid-inner-noise"
NODE_ABS = "abs"
NODE_SCALED_SIGMOID = "scaled-sigmoid"
NODE_LINEAR = "linear"


@dataclass(frozen=True)
class SemModel:
    """Structural-equation mechanism plus noise scale.

    ``hidden_width`` is the hidden dimension of the one-hidden-layer MLP
    mechanism (only used by ``mlp``).
    """

    kind: str = ABS_TANH_MIX
    noise_std: float = 1.0
    hidden_width: int = 100

    def __post_init__(self):
        if self.kind not in MECHANISMS:
            raise ValueError(f"unknown mechanism {self.kind!r}, expected one of {MECHANISMS}")
        if not self.noise_std > 0:
            raise ValueError(f"noise_std must be positive, got {self.noise_std}")
        if self.hidden_width < 1:
            raise ValueError(f"hidden_width must be >= 1, got {self.hidden_width}")


@dataclass
class TrueGraph:
    """Ground-truth DAG: adjacency[i][j] = 1 means X_j -> X_i (j parent of i)."""

    adjacency: np.ndarray
    topo_order: np.ndarray

    @property
    def d(self) -> int:
        return self.adjacency.shape[0]

    @property
    def num_edges(self) -> int:
        return int(self.adjacency.sum())

    def parents(self, i: int) -> list[int]:
        return [int(j) for j in np.flatnonzero(self.adjacency[i])]

    def edges(self) -> list[tuple[int, int]]:
        """Sorted (parent, child) pairs."""
        d = self.d
        return sorted(
            (int(p), int(c)) for c in range(d) for p in range(d) if self.adjacency[c, p]
        )


def is_acyclic(adjacency: np.ndarray) -> bool:
    """Kahn's algorithm over the child-row adjacency convention."""
    adj = np.asarray(adjacency)
    d = adj.shape[0]
    indeg = adj.sum(axis=1).astype(int).copy()
    queue = [i for i in range(d) if indeg[i] == 0]
    seen = 0
    while queue:
        u = queue.pop()
        seen += 1
        for c in range(d):
            if adj[c, u]:
                indeg[c] -= 1
                if indeg[c] == 0:
                    queue.append(c)
    return seen == d


def topological_order(adjacency: np.ndarray) -> np.ndarray:
    """A topological order of the DAG, parents before children."""
    adj = np.asarray(adjacency)
    d = adj.shape[0]
    indeg = adj.sum(axis=1).astype(int).copy()
    queue = sorted(i for i in range(d) if indeg[i] == 0)
    order = []
    while queue:
        u = queue.pop(0)
        order.append(u)
        for c in range(d):
            if adj[c, u]:
                indeg[c] -= 1
                if indeg[c] == 0:
                    queue.append(c)
        queue.sort()
    if len(order) != d:
        raise ValueError("adjacency matrix contains a cycle")
    return np.array(order, dtype=int)


def random_dag(d: int, s: int, seed: int) -> TrueGraph:
    """Random DAG with d nodes and s expected edges."""
    if d < 2:
        raise ValueError(f"need at least 2 nodes, got {d}")
    max_edges = d * (d - 1) // 2
    if not 0 <= s <= max_edges:
        raise ValueError(f"edge count {s} out of range [0, {max_edges}] for d={d}")
    rng = np.random.default_rng(seed)
    order = rng.permutation(d)
    p = s / max_edges
    adj = np.zeros((d, d), dtype=np.int8)
    for a in range(d):
        for b in range(a + 1, d):
            if rng.random() < p:
                adj[order[b], order[a]] = 1
    return TrueGraph(adjacency=adj, topo_order=order)


def sample_weight(rng: np.random.Generator) -> float:
    """One draw from U([-2, -0.5) u [0.5, 2)): sign flip, then magnitude."""
    sign = -1.0 if rng.random() < 0.5 else 1.0
    return sign * rng.uniform(0.5, 2.0)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.clip(z, -500.0, 500.0)))


@dataclass
class GeneratedSample:
    """A sampled dataset plus everything needed to replay it."""

    data: np.ndarray
    noise: np.ndarray
    mechanisms: list[str]
    weights: list[dict]
    model: SemModel
    seed: int

    def metadata(self) -> dict:
        """JSON-ready record of seeds, weights, and mechanism assignments."""
        return {
            "seed": self.seed,
            "model": {
                "kind": self.model.kind,
                "noise_std": self.model.noise_std,
                "hidden_width": self.model.hidden_width,
            },
            "mechanisms": list(self.mechanisms),
            "weights": self.weights,
            "samples": int(self.data.shape[0]),
        }


def _node_mechanisms(kind: str, d: int, rng: np.random.Generator) -> list[str]:
    if kind == MLP_TANH_MIX:
        return [NODE_SCALED_SIGMOID if rng.random() < 0.5 else NODE_TANH for _ in range(d)]
    if kind == ABS_TANH_MIX:
        return [NODE_ABS if rng.random() < 0.5 else NODE_TANH for _ in range(d)]
    fixed = {
        MLP: NODE_MLP,
        TANH: NODE_TANH,
        SIGMOID_MIX: NODE_SIGMOID_INNER,
        ABS: NODE_ABS,
        LINEAR: NODE_LINEAR,
    }
    return [fixed[kind]] * d


def _node_weights(mech: str, n_parents: int, width: int, rng: np.random.Generator) -> dict:
    if n_parents == 0:
        return {}
    if mech == NODE_MLP:
        w1 = [[sample_weight(rng) for _ in range(width)] for _ in range(n_parents)]
        w2 = [sample_weight(rng) for _ in range(width)]
        return {"w1": w1, "w2": w2}
    alpha = [sample_weight(rng) for _ in range(n_parents)]
    if mech in (NODE_SIGMOID_INNER, NODE_SCALED_SIGMOID):
        return {"alpha": alpha, "beta": sample_weight(rng)}
    return {"alpha": alpha}


def simulate(graph: TrueGraph, model: SemModel, n: int, seed: int) -> GeneratedSample:
    """Sample n observations from the ANM defined by (graph, model).

    Draw order within the seeded stream: per-node mechanism coins (mix
    models only), then per-node weights for nodes 0..d-1, then the full
    n x d noise matrix. Identical inputs give a bit-identical sample.
    """
    if n < 1:
        raise ValueError(f"need at least 1 sample, got {n}")
    d = graph.d
    rng = np.random.default_rng(seed)
    mechanisms = _node_mechanisms(model.kind, d, rng)
    weights = [
        _node_weights(mechanisms[i], len(graph.parents(i)), model.hidden_width, rng)
        for i in range(d)
    ]
    noise = rng.normal(0.0, model.noise_std, size=(n, d))
    data = np.zeros((n, d))
    for i in graph.topo_order:
        parents = graph.parents(i)
        e = noise[:, i]
        if not parents:
            data[:, i] = e
            continue
        p = data[:, parents]
        mech = mechanisms[i]
        w = weights[i]
        if mech == NODE_MLP:
            data[:, i] = _sigmoid(p @ np.array(w["w1"])) @ np.array(w["w2"]) + e
        elif mech == NODE_TANH:
            data[:, i] = np.tanh(p @ np.array(w["alpha"])) + e
        elif mech == NODE_SIGMOID_INNER:
            data[:, i] = _sigmoid(p @ np.array(w["alpha"]) + e) * w["beta"]
        elif mech == NODE_ABS:
            data[:, i] = np.abs(p) @ np.array(w["alpha"]) + e
        elif mech == NODE_SCALED_SIGMOID:
            data[:, i] = _sigmoid(p @ np.array(w["alpha"])) * w["beta"] + e
        else:
            data[:, i] = p @ np.array(w["alpha"]) + e
    return GeneratedSample(
        data=data, noise=noise, mechanisms=mechanisms, weights=weights, model=model, seed=seed
    )


def generate(graph: TrueGraph, model: SemModel, n: int, seed: int) -> np.ndarray:
    """The n x d dataset alone; see :func:`simulate` for the full record."""
    return simulate(graph, model, n, seed).data
