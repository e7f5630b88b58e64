"""Nonuniform time grids: the discrete depth axis of the network.

Intervals are indexed 1..K as in the time-marching schemes, so ``tau[k-1]``
is the length of interval k.  Grids are immutable; refinement returns a new
grid with one midpoint node inserted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class TimeGrid:
    """Strictly increasing nodes t_0 = 0 < t_1 < ... < t_K = T."""

    nodes: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        if nodes.ndim != 1 or nodes.shape[0] < 2:
            raise ValueError("grid needs at least two nodes")
        if nodes[0] != 0.0:
            raise ValueError(f"first node must be 0, got {nodes[0]}")
        if not np.all(np.diff(nodes) > 0):
            raise ValueError("nodes must be strictly increasing")

    @property
    def num_intervals(self) -> int:
        return self.nodes.shape[0] - 1

    @property
    def horizon(self) -> float:
        return float(self.nodes[-1])

    @property
    def tau(self) -> np.ndarray:
        """Interval lengths, tau[k-1] = t_k - t_{k-1}."""
        return np.diff(self.nodes)

    @property
    def midpoints(self) -> np.ndarray:
        return 0.5 * (self.nodes[:-1] + self.nodes[1:])

    def to_json(self) -> list[float]:
        return [float(t) for t in self.nodes]


def uniform(num_intervals: int, horizon: float) -> TimeGrid:
    """Uniform grid with ``num_intervals`` equal steps on [0, horizon]."""
    if num_intervals < 1:
        raise ValueError(f"need at least one interval, got {num_intervals}")
    if horizon <= 0:
        raise ValueError(f"horizon must be positive, got {horizon}")
    return TimeGrid(np.linspace(0.0, horizon, num_intervals + 1))


def insert_midpoint(grid: TimeGrid, k_star: int) -> TimeGrid:
    """New grid with the exact midpoint of interval ``k_star`` (1-based) added."""
    if not 1 <= k_star <= grid.num_intervals:
        raise IndexError(f"interval index {k_star} outside 1..{grid.num_intervals}")
    t_new = 0.5 * (grid.nodes[k_star - 1] + grid.nodes[k_star])
    return TimeGrid(np.insert(grid.nodes, k_star, t_new))
