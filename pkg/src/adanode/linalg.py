"""Dense/tridiagonal primitives and seeded random number generation.

Everything here is deliberately small: a symmetric-friendly tridiagonal
container with a Thomas solve, and Gaussian initialisation helpers.  All
randomness in the package flows through generators created by
:func:`make_rng`; no module touches numpy's global RNG.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularPivotError

PIVOT_TOL = 1e-14


def make_rng(seed: int) -> np.random.Generator:
    """Deterministic generator (PCG64) for the given seed.

    Identical seeds produce identical streams across runs and platforms,
    which the experiment protocol relies on.
    """
    return np.random.Generator(np.random.PCG64(int(seed)))


def gaussian_matrix(rng: np.random.Generator, rows: int, cols: int, scale: float) -> np.ndarray:
    """I.i.d. normal (rows, cols) matrix with standard deviation ``scale``."""
    if scale <= 0:
        raise ValueError(f"scale must be positive, got {scale}")
    return scale * rng.standard_normal((rows, cols))


@dataclass(frozen=True)
class Tridiagonal:
    """Tridiagonal matrix stored as its three diagonals.

    ``lower[i]`` is entry (i+1, i), ``main[i]`` is (i, i), ``upper[i]`` is
    (i, i+1).  Matrices assembled from the 1D finite-element bases used here
    are symmetric (lower == upper) and positive definite.
    """

    lower: np.ndarray
    main: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        n = self.main.shape[0]
        if self.lower.shape != (n - 1,) or self.upper.shape != (n - 1,):
            raise ValueError("off-diagonals must have length size-1")

    @property
    def size(self) -> int:
        return self.main.shape[0]

    def matvec(self, x: np.ndarray) -> np.ndarray:
        """Product A @ x; x may be a vector or a (size, ncol) block of columns."""
        x = np.asarray(x, dtype=float)
        if x.shape[0] != self.size:
            raise ValueError(f"operand has leading dimension {x.shape[0]}, expected {self.size}")
        if x.ndim == 1:
            out = self.main * x
            out[:-1] += self.upper * x[1:]
            out[1:] += self.lower * x[:-1]
        else:
            out = self.main[:, None] * x
            out[:-1] += self.upper[:, None] * x[1:]
            out[1:] += self.lower[:, None] * x[:-1]
        return out

    def to_dense(self) -> np.ndarray:
        n = self.size
        dense = np.zeros((n, n))
        dense[np.arange(n), np.arange(n)] = self.main
        dense[np.arange(n - 1), np.arange(1, n)] = self.upper
        dense[np.arange(1, n), np.arange(n - 1)] = self.lower
        return dense


def solve_tridiagonal(a: Tridiagonal, rhs: np.ndarray) -> np.ndarray:
    """Thomas-algorithm solve of A x = rhs without pivoting.

    The systems solved here come from stiffness+mass assemblies and are
    symmetric positive definite, so elimination without row exchanges is
    stable; a pivot-magnitude guard catches misuse on singular input.
    ``rhs`` may be a vector or a (size, ncol) matrix of stacked right-hand
    sides, solved column-wise in one sweep.
    """
    rhs = np.asarray(rhs, dtype=float)
    n = a.size
    if rhs.shape[0] != n:
        raise ValueError(f"rhs has leading dimension {rhs.shape[0]}, expected {n}")

    squeeze = rhs.ndim == 1
    d = rhs.reshape(n, -1).copy()
    c_prime = np.empty(n - 1) if n > 1 else np.empty(0)

    pivot = a.main[0]
    if abs(pivot) < PIVOT_TOL:
        raise SingularPivotError(f"pivot {pivot!r} at row 0 below {PIVOT_TOL}")
    d[0] /= pivot
    if n > 1:
        c_prime[0] = a.upper[0] / pivot
    for i in range(1, n):
        pivot = a.main[i] - a.lower[i - 1] * c_prime[i - 1]
        if abs(pivot) < PIVOT_TOL:
            raise SingularPivotError(f"pivot {pivot!r} at row {i} below {PIVOT_TOL}")
        d[i] = (d[i] - a.lower[i - 1] * d[i - 1]) / pivot
        if i < n - 1:
            c_prime[i] = a.upper[i] / pivot

    for i in range(n - 2, -1, -1):
        d[i] -= c_prime[i] * d[i + 1]

    return d[:, 0] if squeeze else d
