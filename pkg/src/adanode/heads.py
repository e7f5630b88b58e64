"""Output maps, cross-entropy losses, terminal gradients, and accuracy.

Both heads share the structure logits = x(T) @ W_out^T followed by a
sigmoid (binary labels in {0,1}) or a softmax (one-hot labels).  Losses are
the averaged negative log-likelihoods, evaluated in log-space so saturated
logits never overflow, and in both cases the gradient wrt the terminal
state collapses to the same expression

    dl/dx_i(T) = (1/m) W_out^T (yhat_i - y_i).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.special import expit, logsumexp

BINARY = "binary-sigmoid"
MULTICLASS = "multiclass-softmax"


@dataclass(frozen=True)
class TaskHead:
    """Fixed readout matrix plus the labels it is scored against.

    For the binary head ``labels`` is an (m,) array of 0/1; for the
    multiclass head an (m, d_out) one-hot array.
    """

    kind: Literal["binary-sigmoid", "multiclass-softmax"]
    w_out: np.ndarray  # (d_out, d)
    labels: np.ndarray

    def __post_init__(self):
        if self.kind not in (BINARY, MULTICLASS):
            raise ValueError(f"unknown head kind {self.kind!r}")
        if self.kind == BINARY:
            if self.w_out.shape[0] != 1:
                raise ValueError("binary head needs a single output row")
            if not np.all(np.isin(self.labels, (0.0, 1.0))):
                raise ValueError("binary labels must be 0 or 1")
        else:
            if self.labels.ndim != 2 or self.labels.shape[1] != self.w_out.shape[0]:
                raise ValueError("one-hot labels must be (m, d_out)")
            if not np.allclose(self.labels.sum(axis=1), 1.0):
                raise ValueError("one-hot rows must sum to 1")

    def with_labels(self, labels: np.ndarray) -> "TaskHead":
        """Same readout scored against a different label set (validation)."""
        return TaskHead(self.kind, self.w_out, labels)

    def logits(self, x_terminal: np.ndarray) -> np.ndarray:
        return x_terminal @ self.w_out.T

    def probabilities(self, x_terminal: np.ndarray) -> np.ndarray:
        z = self.logits(x_terminal)
        if self.kind == BINARY:
            return expit(z[:, 0])
        return np.exp(z - logsumexp(z, axis=1, keepdims=True))


def loss(head: TaskHead, x_terminal: np.ndarray) -> float:
    """Mean cross-entropy of the head's predictions against its labels."""
    z = head.logits(x_terminal)
    if head.kind == BINARY:
        z = z[:, 0]
        # -y log(sigmoid(z)) - (1-y) log(1-sigmoid(z)) == softplus(z) - y z
        value = np.mean(np.logaddexp(0.0, z) - head.labels * z)
    else:
        log_prob = z - logsumexp(z, axis=1, keepdims=True)
        value = -np.mean(np.sum(head.labels * log_prob, axis=1))
    if not np.isfinite(value):
        raise ValueError("loss is not finite; check inputs")
    return float(value)


def terminal_gradient(head: TaskHead, x_terminal: np.ndarray) -> np.ndarray:
    """Gradient of :func:`loss` wrt the terminal batch state, shape (m, d)."""
    m = x_terminal.shape[0]
    if head.kind == BINARY:
        residual = (head.probabilities(x_terminal) - head.labels)[:, None]
    else:
        residual = head.probabilities(x_terminal) - head.labels
    return (residual @ head.w_out) / m


def accuracy(head: TaskHead, x_terminal: np.ndarray, labels: np.ndarray) -> float:
    """Fraction of samples classified correctly against ``labels``.

    Binary threshold is 0.5 (strict); multiclass uses the argmax with ties
    broken toward the lowest class index.
    """
    z = head.logits(x_terminal)
    if head.kind == BINARY:
        predicted = (z[:, 0] > 0.0).astype(float)  # sigmoid(z) > 0.5  <=>  z > 0
        return float(np.mean(predicted == labels))
    predicted = np.argmax(z, axis=1)
    return float(np.mean(predicted == np.argmax(labels, axis=1)))
