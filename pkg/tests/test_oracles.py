import numpy as np
import pytest

from adanode.dynamics import ControlPath, solve_state
from adanode.grid import uniform
from adanode.linalg import make_rng
from adanode.oracles import (
    composite_quadrature,
    dense_solve,
    fd_directional,
    fine_reference_solve,
)


def test_fd_exact_on_quadratics():
    def f(v):
        return float(v @ v + 2.0 * v[0])

    point = np.array([1.0, -2.0, 3.0])
    direction = np.array([0.5, 1.0, -1.0])
    exact = float((2 * point + np.array([2.0, 0.0, 0.0])) @ direction)
    assert fd_directional(f, point, direction, 1e-2) == pytest.approx(exact, abs=1e-12)


def test_fd_exact_on_linears_any_step():
    f = lambda v: float(3.0 * v[0] - v[1])
    for eps in (1e-1, 1e-5):
        assert fd_directional(f, np.zeros(2), np.array([1.0, 2.0]), eps) == pytest.approx(1.0)


def test_dense_solve_identity():
    rhs = np.array([4.0, 5.0])
    np.testing.assert_allclose(dense_solve(np.eye(2), rhs), rhs)


def test_dense_solve_hand_case():
    a = np.array([[2.0, 1.0], [1.0, 2.0]])
    np.testing.assert_allclose(dense_solve(a, np.array([3.0, 3.0])), [1.0, 1.0])


def test_dense_solve_singular_raises():
    with pytest.raises(np.linalg.LinAlgError):
        dense_solve(np.ones((2, 2)), np.array([1.0, 2.0]))


def test_quadrature_constant():
    assert composite_quadrature(lambda t: 1.0, 0.0, 2.0, 7) == pytest.approx(2.0, abs=1e-15)


def test_quadrature_linear_exact():
    assert composite_quadrature(lambda t: t, 0.0, 1.0, 1) == pytest.approx(0.5, abs=1e-15)


def test_quadrature_quadratic_converges():
    value = composite_quadrature(lambda t: t * t, 0.0, 1.0, 1000)
    assert value == pytest.approx(1.0 / 3.0, abs=1e-7)


def smooth_path(num_intervals, horizon, d=2):
    n = d * d + d
    grid = uniform(num_intervals, horizon)
    values = np.stack(
        [0.4 * np.sin(2 * np.pi * t / horizon + np.arange(n)) for t in grid.nodes]
    )
    return ControlPath(grid, values)


def test_reference_zero_field_returns_input():
    grid = uniform(3, 1.0)
    theta = ControlPath(grid, np.zeros((4, 6)))
    x_in = make_rng(0).standard_normal((2, 2))
    np.testing.assert_array_equal(fine_reference_solve(theta, x_in, 8), x_in)


def test_reference_factor_one_reproduces_coarse_solve():
    theta = smooth_path(5, 2.0)
    x_in = make_rng(1).standard_normal((3, 2))
    coarse = solve_state(theta, x_in).values[-1]
    np.testing.assert_array_equal(fine_reference_solve(theta, x_in, 1), coarse)


def test_reference_richardson_halving():
    theta = smooth_path(4, 2.0)
    x_in = make_rng(2).standard_normal((3, 2))
    x256 = fine_reference_solve(theta, x_in, 256)
    x512 = fine_reference_solve(theta, x_in, 512)
    x1024 = fine_reference_solve(theta, x_in, 1024)
    d1 = np.linalg.norm(x256 - x512)
    d2 = np.linalg.norm(x512 - x1024)
    assert d1 < 2.0 * 2.0 * d2  # order-1: successive gaps halve (allow slack)
