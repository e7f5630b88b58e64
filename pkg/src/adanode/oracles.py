"""Independent brute-force oracles used by the tests and the gradcheck command.

These deliberately share no code with the implementations they verify:
finite differences against hand-written adjoints, LAPACK dense solves
against the Thomas recursion, composite midpoint quadrature against
closed-form integrals, and fine-grid time stepping against coarse solves.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from . import field
from .dynamics import ControlPath
from .errors import NonFiniteError
from .grid import TimeGrid

FD_STEP = 1e-5  # central differences on float64 objectives: ~1e-6 relative accuracy


def fd_directional(
    f: Callable[[np.ndarray], float],
    point: np.ndarray,
    direction: np.ndarray,
    step: float = FD_STEP,
) -> float:
    """Central difference (f(v + e*d) - f(v - e*d)) / (2e)."""
    if step <= 0:
        raise ValueError(f"step must be positive, got {step}")
    return (f(point + step * direction) - f(point - step * direction)) / (2.0 * step)


def fd_gradient(
    f: Callable[[np.ndarray], float], point: np.ndarray, step: float = FD_STEP
) -> np.ndarray:
    """Componentwise central-difference gradient of a scalar function."""
    flat = point.ravel()
    out = np.empty_like(flat)
    basis = np.zeros_like(flat)
    for i in range(flat.shape[0]):
        basis[i] = 1.0
        out[i] = fd_directional(lambda v: f(v.reshape(point.shape)), flat, basis, step)
        basis[i] = 0.0
    return out.reshape(point.shape)


def dense_solve(a: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Dense solve via LAPACK's partially pivoted Gaussian elimination."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must be square, got shape {a.shape}")
    try:
        return np.linalg.solve(a, np.asarray(rhs, dtype=float))
    except np.linalg.LinAlgError as err:
        raise np.linalg.LinAlgError(f"singular matrix: {err}") from err


def composite_quadrature(
    g: Callable[[float], float], a: float, b: float, panels: int
) -> float:
    """Composite midpoint rule with ``panels`` panels on [a, b]."""
    if panels < 1:
        raise ValueError(f"need at least one panel, got {panels}")
    h = (b - a) / panels
    midpoints = a + h * (np.arange(panels) + 0.5)
    return h * float(sum(g(t) for t in midpoints))


def fine_reference_solve(
    theta: ControlPath, x_in: np.ndarray, factor: int
) -> np.ndarray:
    """Terminal state from forward Euler with every interval split ``factor`` ways.

    The control is evaluated piecewise-linearly at the sub-interval
    midpoints, so factor=1 reproduces the coarse solve exactly.
    """
    if factor < 1:
        raise ValueError(f"refinement factor must be >= 1, got {factor}")
    nodes = theta.grid.nodes
    x = np.array(x_in, dtype=float)
    for k in range(1, nodes.shape[0]):
        sub = np.linspace(nodes[k - 1], nodes[k], factor + 1)
        left = theta.values[k - 1]
        right = theta.values[k]
        for j in range(factor):
            h = sub[j + 1] - sub[j]
            s = (j + 0.5) / factor  # sub-midpoint in interval coordinates
            theta_mid = (1.0 - s) * left + s * right
            x = x + h * field.field_eval(x, theta_mid)
            if not np.all(np.isfinite(x)):
                raise NonFiniteError(f"reference solve blew up in interval {k}")
    return x
