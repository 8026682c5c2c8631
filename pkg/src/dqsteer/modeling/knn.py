"""k-nearest-neighbor prediction over encoded feature rows.

Neighbors are chosen by (euclidean distance, training-row index), so ties
at the distance boundary resolve to the earliest row and predictions are
fully deterministic.
"""

from __future__ import annotations

import numpy as np

from ..errors import InvalidInput

K_DEFAULT = 5


def _neighbor_rows(train_X: np.ndarray, query: np.ndarray, k: int) -> list[int]:
    d = np.sqrt(np.sum((train_X - query) ** 2, axis=1))
    order = sorted(range(len(d)), key=lambda i: (d[i], i))
    return order[:k]


def predict_knn(train_X: np.ndarray, train_y: np.ndarray, query: np.ndarray,
                k: int = K_DEFAULT, task: str = "classification"):
    """Majority vote (ties: smallest class id) or mean of the k neighbors."""
    train_X = np.atleast_2d(np.asarray(train_X, dtype=float))
    query = np.asarray(query, dtype=float)
    if k < 1:
        raise InvalidInput("k must be at least 1")
    if k > len(train_X):
        raise InvalidInput(f"k={k} exceeds the {len(train_X)} training rows")
    single = query.ndim == 1
    queries = np.atleast_2d(query)
    out = []
    for q in queries:
        rows = _neighbor_rows(train_X, q, k)
        labels = np.asarray(train_y)[rows]
        if task == "classification":
            ids, counts = np.unique(labels.astype(int), return_counts=True)
            out.append(int(ids[counts == counts.max()].min()))
        else:
            out.append(float(np.mean(labels.astype(float))))
    result = np.array(out)
    return result[0] if single else result
