"""The neural vector field, its batched form, and analytic derivative products.

A hidden state of width d evolves under f(v, theta) = tanh(W v + b).  The
parameter vector theta stacks W column-wise followed by b, so
len(theta) = d*d + d.  Batches of m samples are held as (m, d) arrays; the
squared batch norm is the sum of the per-sample squared norms, i.e. the
Frobenius norm of the array.

The three derivative products needed by the adjoint machinery are computed
analytically rather than via autodiff: with u = W v + b and s = tanh'(u),

    Jacobian (wrt state)       J v' = diag(s) W v'
    adjoint product (state)    J^T p = W^T (s * p)
    adjoint product (params)   W-part: (s * p) v^T,  b-part: s * p

summed over the batch for the parameter product.
"""

from __future__ import annotations

import numpy as np


def tanh(u: np.ndarray) -> np.ndarray:
    return np.tanh(u)


def tanh_prime(u: np.ndarray) -> np.ndarray:
    t = np.tanh(u)
    return 1.0 - t * t


def tanh_second(u: np.ndarray) -> np.ndarray:
    t = np.tanh(u)
    return -2.0 * t * (1.0 - t * t)


def width_from_theta(n: int) -> int:
    """Hidden width d with n = d*d + d; raises if n is not of that form."""
    d = int(round((np.sqrt(4 * n + 1) - 1) / 2))
    if d * d + d != n:
        raise ValueError(f"parameter length {n} is not d*d+d for integer d")
    return d


def pack_theta(w: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Stack (W, b) into a flat parameter vector, W in column-major order."""
    d = b.shape[0]
    if w.shape != (d, d):
        raise ValueError(f"W has shape {w.shape}, expected ({d}, {d})")
    return np.concatenate([w.ravel(order="F"), b])


def unpack_theta(theta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of :func:`pack_theta`; returns views where possible."""
    theta = np.asarray(theta, dtype=float)
    d = width_from_theta(theta.shape[0])
    w = theta[: d * d].reshape(d, d, order="F")
    b = theta[d * d :]
    return w, b


def _check_batch(x: np.ndarray, d: int, name: str) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[1] != d:
        raise ValueError(f"{name} has shape {x.shape}, expected (m, {d})")
    return x


def field_eval(x: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """Batched field F(x, theta): row i is tanh(W x_i + b)."""
    w, b = unpack_theta(theta)
    x = _check_batch(x, b.shape[0], "x")
    return np.tanh(x @ w.T + b)


def vjp_state(x: np.ndarray, theta: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Adjoint state product: row i is W^T (tanh'(W x_i + b) * p_i)."""
    w, b = unpack_theta(theta)
    x = _check_batch(x, b.shape[0], "x")
    p = _check_batch(p, b.shape[0], "p")
    if p.shape[0] != x.shape[0]:
        raise ValueError(f"batch sizes differ: x has {x.shape[0]}, p has {p.shape[0]}")
    s = tanh_prime(x @ w.T + b)
    return (s * p) @ w


def vjp_params(x: np.ndarray, theta: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Adjoint parameter product, packed like theta.

    W-part is vec( sum_i (tanh'(W x_i + b) * p_i) x_i^T ) column-stacked,
    b-part is sum_i tanh'(W x_i + b) * p_i.  Additive over the batch.
    """
    w, b = unpack_theta(theta)
    x = _check_batch(x, b.shape[0], "x")
    p = _check_batch(p, b.shape[0], "p")
    if p.shape[0] != x.shape[0]:
        raise ValueError(f"batch sizes differ: x has {x.shape[0]}, p has {p.shape[0]}")
    s = tanh_prime(x @ w.T + b) * p
    grad_w = s.T @ x
    return pack_theta(grad_w, s.sum(axis=0))
