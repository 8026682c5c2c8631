"""L2-regularized logistic regression via full-batch gradient descent.

Weights start at zero, so training is deterministic with no randomness at
all.  Multiclass problems train one-vs-rest; binary problems train a
single model on the higher class id.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateInput, InvalidInput

LEARNING_RATE = 0.1
EPOCHS = 500
L2 = 1e-4


def _check_matrix(X: np.ndarray):
    if X.size == 0:
        raise InvalidInput("empty feature matrix")
    if not np.all(np.isfinite(X)):
        raise InvalidInput("feature matrix contains non-finite values")


def loss_and_grad(w: np.ndarray, b: float, X: np.ndarray, y: np.ndarray,
                  l2: float) -> tuple[float, np.ndarray, float]:
    """Mean cross-entropy plus (l2/2)*||w||^2; the bias is not penalized."""
    z = X @ w + b
    # log(1+e^z) - y*z, computed without overflow
    ce = np.logaddexp(0.0, z) - y * z
    loss = float(np.mean(ce)) + 0.5 * l2 * float(w @ w)
    p = 1.0 / (1.0 + np.exp(-z))
    err = p - y
    grad_w = X.T @ err / len(y) + l2 * w
    grad_b = float(np.mean(err))
    return loss, grad_w, grad_b


def train_binary(X: np.ndarray, y: np.ndarray, learning_rate: float,
                 epochs: int, l2: float) -> tuple[np.ndarray, float]:
    w = np.zeros(X.shape[1], dtype=float)
    b = 0.0
    for _ in range(epochs):
        _, grad_w, grad_b = loss_and_grad(w, b, X, y, l2)
        w = w - learning_rate * grad_w
        b = b - learning_rate * grad_b
    return w, b


@dataclass(frozen=True)
class LogisticModel:
    classes: tuple            # class ids in ascending id order
    weights: tuple            # one (w, b) per entry in `classes` scored
    binary: bool

    def scores(self, X: np.ndarray) -> np.ndarray:
        cols = [1.0 / (1.0 + np.exp(-(X @ w + b))) for w, b in self.weights]
        return np.column_stack(cols)

    def predict(self, X: np.ndarray) -> np.ndarray:
        s = self.scores(X)
        if self.binary:
            return np.where(s[:, 0] > 0.5, self.classes[1], self.classes[0])
        # argmax takes the first maximum, i.e. the smallest class id on ties
        return np.asarray(self.classes)[np.argmax(s, axis=1)]


def train_logreg(X: np.ndarray, y: np.ndarray,
                 params: dict | None = None) -> LogisticModel:
    """y holds integer class ids 0..C-1; at least two must be present."""
    params = params or {}
    _check_matrix(X)
    lr = float(params.get("learning_rate", LEARNING_RATE))
    epochs = int(params.get("epochs", EPOCHS))
    l2 = float(params.get("l2", L2))
    present = sorted(set(int(v) for v in y))
    if len(present) < 2:
        raise DegenerateInput("logistic regression needs at least two classes")
    if len(present) == 2:
        y01 = (y == present[1]).astype(float)
        w, b = train_binary(X, y01, lr, epochs, l2)
        return LogisticModel(classes=tuple(present), weights=((w, b),),
                             binary=True)
    weights = []
    for c in present:
        y01 = (y == c).astype(float)
        weights.append(train_binary(X, y01, lr, epochs, l2))
    return LogisticModel(classes=tuple(present), weights=tuple(weights),
                         binary=False)
