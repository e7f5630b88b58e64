"""Forward state marching and backward adjoint marching on a nonuniform grid.

The state is piecewise constant from the left (x(t) = x^{k-1} on
[t_{k-1}, t_k)), the adjoint piecewise constant from the right
(p(t) = p^k on (t_{k-1}, t_k]), and the controls piecewise linear in time.
One forward step reads

    x^k = x^{k-1} + tau_k * F(x^{k-1}, theta(m_k)),

the explicit residual-network update with the control evaluated at the
interval midpoint, and the adjoint recursion transposes its linearisation
at exactly the same evaluation point:

    p^{k-1} = p^k + tau_k * D1F(x^{k-1}, theta(m_k))^T p^k,   k = K..1,

seeded with p^K = l'(x^K).  Running the recursion down to k = 1 defines
p^0, which the optional trainable-input-matrix gradient consumes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import field
from .errors import GridMismatchError, NonFiniteError
from .grid import TimeGrid


@dataclass(frozen=True)
class ControlPath:
    """Nodal parameter vectors theta^0..theta^K, interpreted piecewise linear."""

    grid: TimeGrid
    values: np.ndarray  # (K+1, n)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if values.ndim != 2:
            raise ValueError("control values must be a (K+1, n) array")
        if values.shape[0] != self.grid.num_intervals + 1:
            raise GridMismatchError(
                f"{values.shape[0]} nodal values on a grid with "
                f"{self.grid.num_intervals + 1} nodes"
            )

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    def midpoint_values(self) -> np.ndarray:
        """theta(m_k) = (theta^{k-1} + theta^k)/2 for k = 1..K, shape (K, n)."""
        return 0.5 * self.values[:-1] + 0.5 * self.values[1:]

    def at(self, t: float) -> np.ndarray:
        """Piecewise-linear evaluation; exact at the nodes."""
        nodes = self.grid.nodes
        if not nodes[0] <= t <= nodes[-1]:
            raise ValueError(f"t={t} outside [0, {nodes[-1]}]")
        k = int(np.searchsorted(nodes, t, side="right"))
        if k >= nodes.shape[0]:
            return self.values[-1]
        k = max(k, 1)
        s = (t - nodes[k - 1]) / (nodes[k] - nodes[k - 1])
        return (1.0 - s) * self.values[k - 1] + s * self.values[k]


@dataclass(frozen=True)
class StateTrajectory:
    """States x^0..x^K, each an (m, d) batch; left-constant in time."""

    grid: TimeGrid
    values: np.ndarray  # (K+1, m, d)


@dataclass(frozen=True)
class AdjointTrajectory:
    """Adjoints p^0..p^K, each an (m, d) batch; right-constant in time."""

    grid: TimeGrid
    values: np.ndarray  # (K+1, m, d)


def solve_state(theta: ControlPath, x_in: np.ndarray) -> StateTrajectory:
    """March the explicit scheme forward from the projected input batch."""
    x_in = np.asarray(x_in, dtype=float)
    tau = theta.grid.tau
    mids = theta.midpoint_values()
    xs = np.empty((tau.shape[0] + 1,) + x_in.shape)
    xs[0] = x_in
    for k in range(1, tau.shape[0] + 1):
        xs[k] = xs[k - 1] + tau[k - 1] * field.field_eval(xs[k - 1], mids[k - 1])
        if not np.all(np.isfinite(xs[k])):
            raise NonFiniteError(f"state blew up at step {k} (t={theta.grid.nodes[k]})")
    return StateTrajectory(theta.grid, xs)


def solve_adjoint(
    theta: ControlPath, x: StateTrajectory, terminal_grad: np.ndarray
) -> AdjointTrajectory:
    """March the transposed linearisation backward from the terminal gradient."""
    if x.grid is not theta.grid and not np.array_equal(x.grid.nodes, theta.grid.nodes):
        raise GridMismatchError("state and control live on different grids")
    terminal_grad = np.asarray(terminal_grad, dtype=float)
    tau = theta.grid.tau
    mids = theta.midpoint_values()
    ps = np.empty_like(x.values)
    ps[-1] = terminal_grad
    for k in range(tau.shape[0], 0, -1):
        ps[k - 1] = ps[k] + tau[k - 1] * field.vjp_state(x.values[k - 1], mids[k - 1], ps[k])
        if not np.all(np.isfinite(ps[k - 1])):
            raise NonFiniteError(f"adjoint blew up at step {k}")
    return AdjointTrajectory(theta.grid, ps)


def nodal_data_gradient(
    theta: ControlPath, x: StateTrajectory, p: AdjointTrajectory
) -> np.ndarray:
    """Exact chain-rule gradient of the terminal loss wrt each nodal control.

    The forward step k only sees theta through the midpoint value
    (theta^{k-1} + theta^k)/2, so node j collects half of the parameter
    adjoint products of its two adjacent intervals:

        dJ/dtheta^j = 1/2 [ tau_j   g_j   + tau_{j+1} g_{j+1} ],
        g_k = vjp_params(x^{k-1}, theta(m_k), p^k),

    with the single-sided convention at j = 0 and j = K.  This is the raw
    (pre-Riesz) gradient used by finite-difference verification.
    """
    tau = theta.grid.tau
    mids = theta.midpoint_values()
    out = np.zeros_like(theta.values)
    for k in range(1, tau.shape[0] + 1):
        g_k = tau[k - 1] * field.vjp_params(x.values[k - 1], mids[k - 1], p.values[k])
        out[k - 1] += 0.5 * g_k
        out[k] += 0.5 * g_k
    return out


def trajectory_rows(traj: StateTrajectory | AdjointTrajectory) -> list[list[float]]:
    """Rows (node time, then the m*d batch values) for CSV debugging dumps."""
    rows = []
    for t, value in zip(traj.grid.nodes, traj.values):
        rows.append([float(t)] + [float(v) for v in value.ravel()])
    return rows
