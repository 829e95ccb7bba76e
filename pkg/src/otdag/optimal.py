"""Skeleton search: Gumbel-softmax pair selection trained with Adam.

Each row of an s x s logit matrix Z defines a categorical distribution
over the s variable pairs via a row-wise softmax. Training minimizes

    L(W) = || (ones - W) @ A ||^2 + reg_weight * ||W||_F

where A is the first-order HSIC vector, so every row is pulled toward the
pairs with large HSIC while the Frobenius penalty pulls it toward uniform.
Rows are relaxed with the Gumbel-softmax trick and optimized with the
straight-through estimator: the forward loss sees hard one-hot rows, the
backward pass differentiates the soft rows.

The skeleton is the union of each row's argmax pair (deterministic
readout, no noise), read as an undirected edge set.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .hsic import index_to_pair, pair_count


@dataclass(frozen=True)
class GumbelConfig:
    """Hyperparameters for the selector training loop.

    ``batch`` is the number of Gumbel resamples averaged per step. When
    ``anneal`` is set the temperature moves linearly from ``temperature``
    to ``final_temperature`` over the iterations.
    """

    temperature: float = 1.0
    reg_weight: float = 0.01
    learning_rate: float = 0.01
    iterations: int = 2000
    batch: int = 1
    seed: int = 0
    anneal: bool = False
    final_temperature: float = 0.1
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self):
        if not self.temperature > 0:
            raise ValueError(f"temperature must be positive, got {self.temperature}")
        if self.reg_weight < 0:
            raise ValueError(f"reg_weight must be nonnegative, got {self.reg_weight}")
        if not self.learning_rate > 0:
            raise ValueError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")
        if self.batch < 1:
            raise ValueError(f"batch must be >= 1, got {self.batch}")
        if self.anneal and not self.final_temperature > 0:
            raise ValueError(f"final_temperature must be positive, got {self.final_temperature}")


def softmax(z: np.ndarray, axis: int = -1) -> np.ndarray:
    z = z - z.max(axis=axis, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=axis, keepdims=True)


def log_softmax(z: np.ndarray, axis: int = -1) -> np.ndarray:
    z = z - z.max(axis=axis, keepdims=True)
    return z - np.log(np.exp(z).sum(axis=axis, keepdims=True))


def gumbel_softmax_row(z_row, g_row, temperature: float = 1.0) -> np.ndarray:
    """softmax((g + log softmax(z)) / temperature) for a single row.

    Entries are positive and sum to 1; temperature 1 recovers the
    unannealed relaxation.
    """
    if not temperature > 0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    z_row = np.asarray(z_row, dtype=float)
    g_row = np.asarray(g_row, dtype=float)
    return softmax((g_row + log_softmax(z_row)) / temperature)


def loss(weights, hsic_vector, reg_weight: float) -> float:
    """|| (ones - W) @ A ||^2 + reg_weight * ||W||_F."""
    w = np.asarray(weights, dtype=float)
    a = np.asarray(hsic_vector, dtype=float)
    residual = a.sum() - w @ a
    return float(residual @ residual + reg_weight * np.linalg.norm(w))


def _hard_rows(w: np.ndarray) -> np.ndarray:
    hard = np.zeros_like(w)
    hard[np.arange(w.shape[0]), w.argmax(axis=1)] = 1.0
    return hard


def _loss_and_grad(
    logits: np.ndarray,
    hsic_vector: np.ndarray,
    gumbel: np.ndarray,
    temperature: float,
    reg_weight: float,
    straight_through: bool,
) -> tuple[float, np.ndarray]:
    """Loss and its gradient w.r.t. the logits.

    With ``straight_through`` the loss (and the point where dL/dW is taken)
    uses hard one-hot rows; either way the gradient flows through the soft
    Gumbel-softmax rows.
    """
    a = hsic_vector
    p = softmax(logits, axis=1)
    soft = softmax((gumbel + log_softmax(logits, axis=1)) / temperature, axis=1)
    w_eval = _hard_rows(soft) if straight_through else soft
    residual = a.sum() - w_eval @ a
    frob = float(np.linalg.norm(w_eval))
    value = float(residual @ residual) + reg_weight * frob
    d_w = (-2.0 * residual)[:, None] * a[None, :]
    if frob > 0.0:
        d_w = d_w + (reg_weight / frob) * w_eval
    # back through the row-wise softmax, then through log softmax of Z
    d_u = soft * (d_w - (d_w * soft).sum(axis=1, keepdims=True))
    d_logp = d_u / temperature
    d_z = d_logp - p * d_logp.sum(axis=1, keepdims=True)
    return value, d_z


def soft_loss_and_grad(logits, hsic_vector, gumbel, temperature: float = 1.0, reg_weight: float = 0.01):
    """Fully soft loss path and its analytic gradient (finite-difference checkable)."""
    return _loss_and_grad(
        np.asarray(logits, dtype=float),
        np.asarray(hsic_vector, dtype=float),
        np.asarray(gumbel, dtype=float),
        temperature,
        reg_weight,
        straight_through=False,
    )


class Adam:
    """Plain Adam with bias correction, updating the parameter in place."""

    def __init__(self, shape, lr: float, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = np.zeros(shape)
        self.v = np.zeros(shape)

    def step(self, param: np.ndarray, grad: np.ndarray) -> None:
        self.t += 1
        self.m = self.beta1 * self.m + (1.0 - self.beta1) * grad
        self.v = self.beta2 * self.v + (1.0 - self.beta2) * grad * grad
        m_hat = self.m / (1.0 - self.beta1 ** self.t)
        v_hat = self.v / (1.0 - self.beta2 ** self.t)
        param -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


@dataclass
class TrainResult:
    logits: np.ndarray
    losses: np.ndarray
    descended: bool
    config: GumbelConfig = field(repr=False)


def _smoothed_descent(losses: np.ndarray) -> bool:
    """Exponentially smoothed loss over the last 10% must not exceed the first 10%."""
    ema = np.empty_like(losses)
    ema[0] = losses[0]
    for t in range(1, len(losses)):
        ema[t] = 0.9 * ema[t - 1] + 0.1 * losses[t]
    k = max(1, len(losses) // 10)
    head = float(ema[:k].mean())
    tail = float(ema[-k:].mean())
    return tail <= head + 1e-9 * (1.0 + abs(head))


def train(hsic_vector, config: GumbelConfig = GumbelConfig()) -> TrainResult:
    """Run the straight-through Gumbel-softmax training loop.

    Deterministic for a fixed (hsic_vector, config). Raises on a non-finite
    loss. The smoothed-descent check is recorded on the result rather than
    enforced, so degenerate flat landscapes do not abort a run.
    """
    a = np.asarray(hsic_vector, dtype=float).ravel()
    s = a.size
    if s < 1:
        raise ValueError("empty HSIC vector")
    rng = np.random.default_rng(config.seed)
    logits = np.zeros((s, s))
    adam = Adam(logits.shape, config.learning_rate, config.beta1, config.beta2, config.eps)
    losses = np.empty(config.iterations)
    for it in range(config.iterations):
        if config.anneal and config.iterations > 1:
            frac = it / (config.iterations - 1)
            tau = config.temperature + frac * (config.final_temperature - config.temperature)
        else:
            tau = config.temperature
        value = 0.0
        grad = np.zeros_like(logits)
        for _ in range(config.batch):
            g = rng.gumbel(size=(s, s))
            v, d_z = _loss_and_grad(logits, a, g, tau, config.reg_weight, straight_through=True)
            value += v
            grad += d_z
        value /= config.batch
        grad /= config.batch
        if not np.isfinite(value):
            raise RuntimeError(f"non-finite loss {value!r} at iteration {it}")
        adam.step(logits, grad)
        losses[it] = value
    if not np.all(np.abs(logits) < 1e6):
        raise RuntimeError("selector logits overflowed during training")
    return TrainResult(logits=logits, losses=losses, descended=_smoothed_descent(losses), config=config)


def extract_skeleton(logits, d: int) -> np.ndarray:
    """Union of per-row argmax pairs as a symmetric zero-diagonal adjacency.

    The readout is deterministic: argmax of softmax(Z) per row, no Gumbel
    noise. Duplicate selections collapse.
    """
    logits = np.asarray(logits, dtype=float)
    s = pair_count(d)
    if logits.ndim != 2 or logits.shape[1] != s:
        raise ValueError(f"logits shape {logits.shape} does not match d={d} (s={s})")
    selected = softmax(logits, axis=1).argmax(axis=1)
    skeleton = np.zeros((d, d), dtype=np.int8)
    for t in selected:
        i, j = index_to_pair(int(t), d)
        skeleton[i, j] = 1
        skeleton[j, i] = 1
    return skeleton


def skeleton_from_topk(hsic_vector, k: int, d: int) -> np.ndarray:
    """Deterministic debugging backend: the k largest entries of A as a skeleton."""
    a = np.asarray(hsic_vector, dtype=float).ravel()
    if a.size != pair_count(d):
        raise ValueError(f"HSIC vector length {a.size} does not match d={d}")
    if not 1 <= k <= a.size:
        raise ValueError(f"k={k} out of range [1, {a.size}]")
    top = np.argsort(-a, kind="stable")[:k]
    skeleton = np.zeros((d, d), dtype=np.int8)
    for t in top:
        i, j = index_to_pair(int(t), d)
        skeleton[i, j] = 1
        skeleton[j, i] = 1
    return skeleton
