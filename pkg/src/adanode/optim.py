"""Adam on the nodal control block, with moment lifecycle across insertions.

The moment arrays always mirror the (K+1, n) shape of the nodal controls.
Inserting a layer changes that shape and invalidates the accumulated
exponential averages, so insertion zeroes all statistics and restarts the
bias-correction clock.  A plain gradient-descent mode is available so that
numerical verification runs can avoid optimizer state entirely.
"""

from __future__ import annotations

import numpy as np


class Adam:
    """Standard Adam with bias correction on arrays of shape (K+1, n)."""

    def __init__(
        self,
        shape: tuple[int, int],
        lr: float,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
    ):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.m = np.zeros(shape)
        self.v = np.zeros(shape)
        self.t = 0

    @property
    def shape(self) -> tuple[int, int]:
        return self.m.shape

    def step(self, values: np.ndarray, grad: np.ndarray) -> np.ndarray:
        """One update; returns the new values, advances the moment state."""
        if values.shape != self.m.shape or grad.shape != self.m.shape:
            raise ValueError(
                f"shape mismatch: state {self.m.shape}, values {values.shape}, "
                f"grad {grad.shape}"
            )
        self.t += 1
        self.m = self.beta1 * self.m + (1.0 - self.beta1) * grad
        self.v = self.beta2 * self.v + (1.0 - self.beta2) * grad * grad
        m_hat = self.m / (1.0 - self.beta1**self.t)
        v_hat = self.v / (1.0 - self.beta2**self.t)
        return values - self.lr * m_hat / (np.sqrt(v_hat) + self.eps)

    def on_insert(self, k_star: int) -> None:
        """Zero all moments, reset the step counter, grow by one node row."""
        if not 1 <= k_star <= self.m.shape[0] - 1:
            raise IndexError(f"interval index {k_star} outside 1..{self.m.shape[0] - 1}")
        new_shape = (self.m.shape[0] + 1, self.m.shape[1])
        self.m = np.zeros(new_shape)
        self.v = np.zeros(new_shape)
        self.t = 0


class GradientDescent:
    """Stateless theta <- theta - lr * g fallback for verification runs."""

    def __init__(self, shape: tuple[int, int], lr: float):
        self.lr = lr
        self._shape = shape

    @property
    def shape(self) -> tuple[int, int]:
        return self._shape

    def step(self, values: np.ndarray, grad: np.ndarray) -> np.ndarray:
        if values.shape != self._shape or grad.shape != self._shape:
            raise ValueError(f"shape mismatch against {self._shape}")
        return values - self.lr * grad

    def on_insert(self, k_star: int) -> None:
        self._shape = (self._shape[0] + 1, self._shape[1])
