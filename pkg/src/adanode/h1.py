"""Sobolev (H1) Riesz gradient of the training objective.

The regulariser (lambda/2) * int(|theta|^2 + |theta_dot|^2) puts the
controls in H1, so the steepest-descent direction is the Riesz representer
g solving, per parameter component,

    B g = lambda * B theta + M z,        B = A + M,

where A and M are the stiffness and mass matrices of the piecewise-linear
hat basis on the current grid (both boundary nodes included, matching the
natural boundary conditions of the underlying two-point boundary value
problem), and z collects the parameter adjoint products evaluated with a
midpoint-based continuous reconstruction of the piecewise-constant adjoint.
The Kronecker structure over the n parameter components is exploited as n
independent tridiagonal solves; the (K+1)n x (K+1)n system is never formed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import field
from .dynamics import AdjointTrajectory, ControlPath, StateTrajectory
from .errors import GridMismatchError
from .grid import TimeGrid
from .linalg import Tridiagonal, solve_tridiagonal


@dataclass(frozen=True)
class FemMatrices:
    """Stiffness A, mass M, and their sum B for the hat basis on a grid."""

    grid: TimeGrid
    stiffness: Tridiagonal
    mass: Tridiagonal
    combined: Tridiagonal


def assemble_fem(grid: TimeGrid) -> FemMatrices:
    """Assemble A (hat-derivative products) and M (hat products) on ``grid``.

    Interior row k of A is [-1/tau_k, 1/tau_k + 1/tau_{k+1}, -1/tau_{k+1}];
    interior row k of M is [tau_k/6, (tau_k + tau_{k+1})/3, tau_{k+1}/6];
    boundary rows keep only their one-sided terms.
    """
    tau = grid.tau
    n = tau.shape[0] + 1

    a_main = np.zeros(n)
    a_main[:-1] += 1.0 / tau
    a_main[1:] += 1.0 / tau
    a_off = -1.0 / tau

    m_main = np.zeros(n)
    m_main[:-1] += tau / 3.0
    m_main[1:] += tau / 3.0
    m_off = tau / 6.0

    stiffness = Tridiagonal(a_off, a_main, a_off)
    mass = Tridiagonal(m_off, m_main, m_off)
    combined = Tridiagonal(a_off + m_off, a_main + m_main, a_off + m_off)
    return FemMatrices(grid, stiffness, mass, combined)


def reconstruct_adjoint_at_nodes(p: AdjointTrajectory) -> np.ndarray:
    """Nodal values of the continuous midpoint reconstruction of the adjoint.

    The piecewise-constant adjoint equals p^k at the midpoint of interval k;
    connecting those midpoints linearly and reading the result at node k
    gives the convex combination

        phat^k = tau_{k+1}/(tau_k + tau_{k+1}) p^k
               + tau_k    /(tau_k + tau_{k+1}) p^{k+1}

    for interior nodes.  The reconstruction is only defined between the
    first and last midpoints, so the endpoints clamp to the nearest
    midpoint value: phat^0 = p^1 and phat^K = p^K.
    """
    tau = p.grid.tau
    out = np.empty_like(p.values)
    out[0] = p.values[1]
    out[-1] = p.values[-1]
    if tau.shape[0] > 1:
        left = tau[:-1]
        right = tau[1:]
        weight = (right / (left + right))[:, None, None]
        out[1:-1] = weight * p.values[1:-1] + (1.0 - weight) * p.values[2:]
    return out


def assemble_z(
    x: StateTrajectory, theta: ControlPath, p_hat: np.ndarray
) -> np.ndarray:
    """Nodal data terms z^k = vjp_params(x^{k-1}, theta^k, phat^k), shape (K+1, n).

    x^{-1} does not exist, so the left boundary uses the only available
    state there: z^0 = vjp_params(x^0, theta^0, phat^0).
    """
    if x.values.shape[0] != theta.values.shape[0]:
        raise GridMismatchError("state and control node counts differ")
    if p_hat.shape != x.values.shape:
        raise GridMismatchError("reconstructed adjoint shape does not match the state")
    num_nodes = theta.values.shape[0]
    z = np.empty_like(theta.values)
    z[0] = field.vjp_params(x.values[0], theta.values[0], p_hat[0])
    for k in range(1, num_nodes):
        z[k] = field.vjp_params(x.values[k - 1], theta.values[k], p_hat[k])
    return z


def solve_gradient(
    fem: FemMatrices, theta: ControlPath, z: np.ndarray, lam: float
) -> np.ndarray:
    """Solve B g = lambda B theta + M z componentwise; returns (K+1, n).

    Equivalently g = lambda * theta + B^{-1} M z: the regulariser part
    passes through exactly, and the data part is smoothed by B^{-1} M.
    """
    if lam < 0:
        raise ValueError(f"lambda must be nonnegative, got {lam}")
    if z.shape != theta.values.shape:
        raise GridMismatchError("z and control node counts differ")
    smoothed = solve_tridiagonal(fem.combined, fem.mass.matvec(z))
    return lam * theta.values + smoothed


def h1_pairing(fem: FemMatrices, u: np.ndarray, v: np.ndarray) -> float:
    """Discrete H1 pairing u^T (B (x) I) v of two nodal coefficient blocks."""
    return float(np.sum(u * fem.combined.matvec(v)))


def regularizer_value(fem: FemMatrices, theta: ControlPath, lam: float) -> float:
    """(lambda/2) * int(|theta|^2 + |theta_dot|^2) dt, exact for the hat basis."""
    return 0.5 * lam * h1_pairing(fem, theta.values, theta.values)
