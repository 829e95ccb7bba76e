"""Empirical HSIC and the first-/second-order value cache.

The estimator is the biased V-statistic

    HSIC(x, y) = trace(Kc @ Lc) / n^2

where Kc and Lc are centered Gram matrices of the two samples, each with
its own median-heuristic bandwidth (Gaussian kernel). It equals the
plug-in empirical version of the three-expectation kernel expansion of
the population HSIC; the test suite checks that identity against a naive
double-sum oracle.

First-order values are HSIC between two columns of a dataset; second-order
values are HSIC between a column and the element-wise sum of two other
columns, which approximates the dependence on the pair.
"""

from __future__ import annotations

import numpy as np

from .kernels import GAUSSIAN, KERNEL_KINDS, centered_gram


def pair_count(d: int) -> int:
    return d * (d - 1) // 2


def pair_to_index(i: int, j: int, d: int) -> int:
    """Index of the unordered pair {i, j} (i < j) in lexicographic order."""
    if not 0 <= i < j < d:
        raise ValueError(f"need 0 <= i < j < d, got i={i}, j={j}, d={d}")
    return i * d - i * (i + 1) // 2 + (j - i - 1)


def index_to_pair(t: int, d: int) -> tuple[int, int]:
    """Inverse of ``pair_to_index``."""
    if not 0 <= t < pair_count(d):
        raise ValueError(f"pair index {t} out of range for d={d}")
    i = 0
    while t >= d - 1 - i:
        t -= d - 1 - i
        i += 1
    return i, i + 1 + t


def _check_kernel(kernel_kind: str) -> str:
    if kernel_kind not in KERNEL_KINDS:
        raise ValueError(f"unknown kernel kind {kernel_kind!r}, expected one of {KERNEL_KINDS}")
    return kernel_kind


def hsic(x, y, kernel_kind: str = GAUSSIAN) -> float:
    """Biased empirical HSIC between two equal-length sample vectors.

    Nonnegative (up to rounding) for the Gaussian kernel since both
    centered Grams are positive semidefinite; the sigmoid kernel is
    indefinite and the value may be slightly negative.
    """
    _check_kernel(kernel_kind)
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.size != y.size:
        raise ValueError(f"sample length mismatch: {x.size} vs {y.size}")
    if x.size < 2:
        raise ValueError(f"hsic needs at least 2 samples, got {x.size}")
    kc = centered_gram(x, kernel_kind)
    lc = centered_gram(y, kernel_kind)
    n = x.size
    return float(np.vdot(kc, lc)) / (n * n)


def zscore_columns(data: np.ndarray) -> np.ndarray:
    """Column-wise z-scoring; constant columns are left at zero."""
    data = np.asarray(data, dtype=float)
    mean = data.mean(axis=0)
    std = data.std(axis=0)
    std = np.where(std == 0.0, 1.0, std)
    return (data - mean) / std


class HsicCache:
    """Memoized first- and second-order HSIC values over dataset columns.

    Centered Gram matrices of single columns are computed once and reused.
    Second-order values HSIC(col_i, col_j + col_k) are memoized under the
    unordered key {j, k}; ``prefill_second_order`` fills them grouped by
    summed pair so each sum Gram is built exactly once. Lazy fills are
    idempotent, so concurrent duplicate computation is harmless.
    """

    def __init__(self, data, kernel_kind: str = GAUSSIAN, standardize: bool = False):
        data = np.asarray(data, dtype=float)
        if data.ndim != 2:
            raise ValueError(f"dataset must be a 2-d array, got ndim={data.ndim}")
        n, d = data.shape
        if d < 2:
            raise ValueError(f"dataset needs at least 2 columns, got {d}")
        if n < 2:
            raise ValueError(f"dataset needs at least 2 rows, got {n}")
        self.kernel_kind = _check_kernel(kernel_kind)
        self.standardize = bool(standardize)
        self.data = zscore_columns(data) if standardize else data
        self.n = n
        self.d = d
        self._col_grams: dict[int, np.ndarray] = {}
        self._first: np.ndarray | None = None
        self._second: dict[tuple[int, frozenset[int]], float] = {}

    def _col_gram(self, i: int) -> np.ndarray:
        g = self._col_grams.get(i)
        if g is None:
            g = centered_gram(self.data[:, i], self.kernel_kind)
            self._col_grams[i] = g
        return g

    def _sum_gram(self, j: int, k: int) -> np.ndarray:
        return centered_gram(self.data[:, j] + self.data[:, k], self.kernel_kind)

    def first_order_matrix(self) -> np.ndarray:
        """Symmetric d x d matrix of pairwise HSIC values, zero diagonal."""
        if self._first is None:
            m = np.zeros((self.d, self.d))
            scale = self.n * self.n
            for i in range(self.d):
                gi = self._col_gram(i)
                for j in range(i + 1, self.d):
                    v = float(np.vdot(gi, self._col_gram(j))) / scale
                    m[i, j] = v
                    m[j, i] = v
            self._first = m
        return self._first

    def first_order_vector(self) -> np.ndarray:
        """Length-s vector of pairwise values, pairs in lexicographic order."""
        m = self.first_order_matrix()
        return m[np.triu_indices(self.d, k=1)].copy()

    def first_order(self, i: int, j: int) -> float:
        if i == j:
            raise ValueError("first-order HSIC needs two distinct columns")
        return float(self.first_order_matrix()[i, j])

    def second_order(self, i: int, j: int, k: int) -> float:
        """HSIC(col_i, col_j + col_k), memoized under the unordered pair {j, k}."""
        if len({i, j, k}) != 3:
            raise ValueError(f"second-order HSIC needs distinct indices, got ({i}, {j}, {k})")
        for idx in (i, j, k):
            if not 0 <= idx < self.d:
                raise ValueError(f"column index {idx} out of range for d={self.d}")
        key = (i, frozenset((j, k)))
        val = self._second.get(key)
        if val is None:
            lc = self._sum_gram(j, k)
            val = float(np.vdot(self._col_gram(i), lc)) / (self.n * self.n)
            self._second[key] = val
        return val

    def prefill_second_order(self) -> None:
        """Compute every second-order value, one sum Gram per unordered pair."""
        scale = self.n * self.n
        for j in range(self.d):
            for k in range(j + 1, self.d):
                lc = None
                for i in range(self.d):
                    if i == j or i == k:
                        continue
                    key = (i, frozenset((j, k)))
                    if key in self._second:
                        continue
                    if lc is None:
                        lc = self._sum_gram(j, k)
                    self._second[key] = float(np.vdot(self._col_gram(i), lc)) / scale


def first_order_matrix(data, kernel_kind: str = GAUSSIAN, standardize: bool = False) -> HsicCache:
    """Build an :class:`HsicCache` with the first-order part computed."""
    cache = HsicCache(data, kernel_kind=kernel_kind, standardize=standardize)
    cache.first_order_matrix()
    return cache
