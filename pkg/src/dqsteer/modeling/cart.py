"""Binary CART trees for classification (Gini) and regression (MSE).

Split search is deterministic: features are scanned in index order,
thresholds in ascending order at midpoints of consecutive distinct values,
and a candidate replaces the incumbent only when strictly better, so ties
resolve to the lowest feature index and then the lowest threshold.
Classification split quality is compared in exact integer arithmetic
(maximizing sum-of-squared-class-counts over side sizes), which keeps the
choice stable under any float summation order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidInput

MAX_DEPTH = 8
MIN_SPLIT = 2


@dataclass(frozen=True)
class CartNode:
    feature: int | None
    threshold: float | None
    left: "CartNode | None"
    right: "CartNode | None"
    prediction: float | int | None

    @property
    def is_leaf(self) -> bool:
        return self.feature is None


@dataclass(frozen=True)
class CartTree:
    root: CartNode
    criterion: str
    n_features: int

    def predict(self, X: np.ndarray) -> np.ndarray:
        out = []
        for row in np.atleast_2d(X):
            node = self.root
            while not node.is_leaf:
                node = node.left if row[node.feature] <= node.threshold \
                    else node.right
            out.append(node.prediction)
        return np.array(out)

    def depth(self) -> int:
        def walk(node, d):
            if node.is_leaf:
                return d
            return max(walk(node.left, d + 1), walk(node.right, d + 1))
        return walk(self.root, 0)


def _majority(y: np.ndarray) -> int:
    ids, counts = np.unique(y, return_counts=True)
    best = counts.max()
    return int(ids[counts == best].min())


def _gini_best_split(X, y, rows, n_classes):
    """Best (feature, threshold) maximizing S_L/n_L + S_R/n_R, exactly.

    S is the sum of squared class counts; comparisons cross-multiply the
    integer rationals so no float rounding can flip a tie.
    """
    n = len(rows)
    counts_all = np.bincount(y[rows], minlength=n_classes)
    s_node = int(np.sum(counts_all.astype(object) ** 2))
    # candidate better than no-split: S_L/n_L + S_R/n_R > S_node/n
    best = None   # (num_l, n_l, num_r, n_r, feature, threshold)
    for f in range(X.shape[1]):
        order = rows[np.argsort(X[rows, f], kind="stable")]
        values = X[order, f]
        left = np.zeros(n_classes, dtype=object)
        right = counts_all.astype(object).copy()
        s_l, s_r = 0, s_node
        for pos in range(n - 1):
            c = int(y[order[pos]])
            s_l += 2 * int(left[c]) + 1
            left[c] += 1
            s_r -= 2 * int(right[c]) - 1
            right[c] -= 1
            v1, v2 = values[pos], values[pos + 1]
            if v1 == v2:
                continue
            thr = (v1 + v2) / 2.0
            if not (v1 < thr < v2):
                continue   # midpoint rounded onto a sample value
            n_l, n_r = pos + 1, n - pos - 1
            # strictly better than the unsplit node?
            if (s_l * n_r + s_r * n_l) * n <= s_node * n_l * n_r:
                continue
            if best is None:
                best = (s_l, n_l, s_r, n_r, f, thr)
                continue
            b_sl, b_nl, b_sr, b_nr, _, _ = best
            lhs = (s_l * n_r + s_r * n_l) * (b_nl * b_nr)
            rhs = (b_sl * b_nr + b_sr * b_nl) * (n_l * n_r)
            if lhs > rhs:
                best = (s_l, n_l, s_r, n_r, f, thr)
    if best is None:
        return None
    return best[4], best[5]


def _mse_best_split(X, y, rows):
    """Best (feature, threshold) minimizing SSE_L + SSE_R, strictly."""
    n = len(rows)
    y_node = y[rows]
    sse_node = float(np.sum((y_node - y_node.mean()) ** 2))
    best = None   # (sse, feature, threshold)
    for f in range(X.shape[1]):
        order = rows[np.argsort(X[rows, f], kind="stable")]
        values = X[order, f]
        targets = y[order]
        sum_l = 0.0
        sq_l = 0.0
        sum_r = float(targets.sum())
        sq_r = float(np.sum(targets ** 2))
        for pos in range(n - 1):
            t = float(targets[pos])
            sum_l += t
            sq_l += t * t
            sum_r -= t
            sq_r -= t * t
            v1, v2 = values[pos], values[pos + 1]
            if v1 == v2:
                continue
            thr = (v1 + v2) / 2.0
            if not (v1 < thr < v2):
                continue
            n_l, n_r = pos + 1, n - pos - 1
            sse = (sq_l - sum_l * sum_l / n_l) + (sq_r - sum_r * sum_r / n_r)
            if sse >= sse_node:
                continue
            if best is None or sse < best[0]:
                best = (sse, f, thr)
    if best is None:
        return None
    return best[1], best[2]


def _grow(X, y, rows, depth, max_depth, min_split, criterion, n_classes):
    def leaf():
        if criterion == "gini":
            return CartNode(None, None, None, None, _majority(y[rows]))
        return CartNode(None, None, None, None, float(np.mean(y[rows])))

    if depth >= max_depth or len(rows) < min_split:
        return leaf()
    if criterion == "gini":
        if len(np.unique(y[rows])) == 1:
            return leaf()
        split = _gini_best_split(X, y, rows, n_classes)
    else:
        split = _mse_best_split(X, y, rows)
    if split is None:
        return leaf()
    f, thr = split
    mask = X[rows, f] <= thr
    left_rows, right_rows = rows[mask], rows[~mask]
    if len(left_rows) == 0 or len(right_rows) == 0:
        return leaf()
    left = _grow(X, y, left_rows, depth + 1, max_depth, min_split,
                 criterion, n_classes)
    right = _grow(X, y, right_rows, depth + 1, max_depth, min_split,
                  criterion, n_classes)
    return CartNode(f, thr, left, right, None)


def train_cart(X: np.ndarray, y: np.ndarray,
               params: dict | None = None) -> CartTree:
    params = params or {}
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.size == 0 or len(X) == 0:
        raise InvalidInput("empty feature matrix")
    if not np.all(np.isfinite(X)):
        raise InvalidInput("feature matrix contains non-finite values")
    criterion = params.get("criterion", "gini")
    if criterion not in ("gini", "mse"):
        raise InvalidInput(f"unknown criterion {criterion!r}")
    max_depth = int(params.get("max_depth", MAX_DEPTH))
    min_split = int(params.get("min_split", MIN_SPLIT))
    if criterion == "gini":
        y = np.asarray(y, dtype=int)
        n_classes = int(y.max()) + 1 if len(y) else 0
    else:
        y = np.asarray(y, dtype=float)
        if not np.all(np.isfinite(y)):
            raise InvalidInput("targets contain non-finite values")
        n_classes = 0
    rows = np.arange(len(X))
    root = _grow(X, y, rows, 0, max_depth, min_split, criterion, n_classes)
    return CartTree(root=root, criterion=criterion, n_features=X.shape[1])
