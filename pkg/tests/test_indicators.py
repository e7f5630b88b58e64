import numpy as np
import pytest

from adanode.dynamics import AdjointTrajectory, ControlPath, StateTrajectory, solve_adjoint, solve_state
from adanode.grid import TimeGrid, uniform
from adanode.heads import BINARY, TaskHead, terminal_gradient
from adanode.indicators import (
    adjoint_residuals,
    control_residual,
    indicate,
    interval_integrals,
    quadratic_reconstruction,
    state_residuals,
    weights,
)
from adanode.linalg import make_rng
from adanode.oracles import composite_quadrature


def random_triple(seed, d=2, m=3, num_intervals=5, horizon=1.0, scale=0.8):
    rng = make_rng(seed)
    n = d * d + d
    interior = np.sort(rng.uniform(0.15, 0.85, num_intervals - 1)) * horizon
    grid = TimeGrid(np.concatenate([[0.0], interior, [horizon]]))
    theta = ControlPath(grid, scale * rng.standard_normal((num_intervals + 1, n)))
    x_in = rng.standard_normal((m, d))
    head = TaskHead(
        BINARY, rng.standard_normal((1, d)), (rng.uniform(size=m) < 0.5).astype(float)
    )
    x = solve_state(theta, x_in)
    p = solve_adjoint(theta, x, terminal_gradient(head, x.values[-1]))
    return grid, theta, x, p


def constant_instance(num_intervals=3, value=0.0):
    grid = uniform(num_intervals, 1.0)
    theta = ControlPath(grid, np.full((num_intervals + 1, 6), value))
    x = StateTrajectory(grid, np.zeros((num_intervals + 1, 2, 2)))
    p = AdjointTrajectory(grid, np.zeros((num_intervals + 1, 2, 2)))
    return grid, theta, x, p


def test_state_residuals_zero_for_zero_field_constant_state():
    _, theta, x, _ = constant_instance()
    assert np.array_equal(state_residuals(x, theta), np.zeros(3))


def test_state_residuals_k1_sup_plus_full_jump():
    # single interval: no neighbour terms; own jump enters with weight 1
    grid = uniform(1, 2.0)
    theta = ControlPath(grid, np.zeros((2, 2)))  # d=1, W=0, b=0 -> F = 0
    x = StateTrajectory(grid, np.array([[[1.0]], [[4.0]]]))
    r = state_residuals(x, theta)
    assert r.shape == (1,)
    assert r[0] == pytest.approx(3.0)  # zero sup term + 1.0 * |x^1 - x^0|


def test_state_residual_neighbour_weights_uniform_grid():
    grid = uniform(3, 3.0)
    theta = ControlPath(grid, np.zeros((4, 2)))
    states = np.array([[[0.0]], [[2.0]], [[2.0]], [[2.0]]])
    x = StateTrajectory(grid, states)
    r = state_residuals(x, theta)
    # jumps: |x1-x0|=2 at node 1, others 0; F = 0 everywhere
    assert r[0] == pytest.approx(0.5 * 2.0)  # own jump, weight tau/(tau+tau)
    assert r[1] == pytest.approx(0.5 * 2.0)  # left neighbour jump (2<=k<=K-1)
    assert r[2] == pytest.approx(0.0)  # k=K gets no left-neighbour term


def test_adjoint_residuals_zero_case():
    _, theta, x, p = constant_instance()
    assert np.array_equal(adjoint_residuals(x, theta, p), np.zeros(3))


def test_adjoint_residual_jump_weights_k2_uniform():
    grid = uniform(2, 2.0)
    theta = ControlPath(grid, np.zeros((3, 2)))
    x = StateTrajectory(grid, np.zeros((3, 1, 1)))
    p = AdjointTrajectory(grid, np.array([[[0.0]], [[3.0]], [[3.0]]]))
    r = adjoint_residuals(x, theta, p)
    # jump |p^1 - p^0| = 3 at node boundary: interval 1 own weight tau1/(tau0+tau1)=1
    assert r[0] == pytest.approx(1.0 * 3.0)
    # interval 2 sees it as the "previous" jump? no: own term uses |p^2-p^1| = 0,
    # and the forward-jump indicator excludes k = K
    assert r[1] == pytest.approx(0.0)


def test_adjoint_residual_forward_jump_weight_half():
    grid = uniform(2, 2.0)
    theta = ControlPath(grid, np.zeros((3, 2)))
    x = StateTrajectory(grid, np.zeros((3, 1, 1)))
    p = AdjointTrajectory(grid, np.array([[[0.0]], [[0.0]], [[5.0]]]))
    r = adjoint_residuals(x, theta, p)
    # jump |p^2-p^1| = 5: interval 1 forward-jump weight tau1/(tau1+tau2) = 1/2,
    # interval 2 own weight tau2/(tau1+tau2) = 1/2
    assert r[0] == pytest.approx(2.5)
    assert r[1] == pytest.approx(2.5)


def test_sup_sampling_density_insensitive():
    _, theta, x, p = random_triple(0)
    r5 = state_residuals(x, theta, num_samples=5)
    r101 = state_residuals(x, theta, num_samples=101)
    assert np.all(np.abs(r101 - r5) <= 0.05 * np.maximum(r101, 1e-12))
    a5 = adjoint_residuals(x, theta, p, num_samples=5)
    a101 = adjoint_residuals(x, theta, p, num_samples=101)
    assert np.all(np.abs(a101 - a5) <= 0.05 * np.maximum(a101, 1e-12))


def test_weights_nodal_differences():
    grid = uniform(2, 1.0)
    theta = ControlPath(grid, np.zeros((3, 2)))
    x = StateTrajectory(grid, np.array([[[0.0]], [[3.0]], [[3.0]]]))
    p = AdjointTrajectory(grid, np.zeros((3, 1, 1)))
    omega_x, omega_p = weights(x, p)
    np.testing.assert_allclose(omega_x, [3.0, 0.0])
    np.testing.assert_allclose(omega_p, [0.0, 0.0])


def test_weights_shift_invariant():
    _, _, x, p = random_triple(1)
    shift = np.ones_like(x.values[0])
    shifted = StateTrajectory(x.grid, x.values + shift)
    w1, _ = weights(x, p)
    w2, _ = weights(shifted, p)
    np.testing.assert_allclose(w1, w2, rtol=1e-12)


def test_quadratic_reconstruction_interpolates_nodes():
    _, theta, _, _ = random_triple(2)
    coeff_a, coeff_b, coeff_c = quadratic_reconstruction(theta)
    np.testing.assert_allclose(coeff_c, theta.values[:-1], atol=1e-15)
    np.testing.assert_allclose(
        coeff_a + coeff_b + coeff_c, theta.values[1:], atol=1e-12
    )


def test_quadratic_reconstruction_left_slope_continuity():
    _, theta, _, _ = random_triple(3)
    coeff_a, coeff_b, _ = quadratic_reconstruction(theta)
    tau = theta.grid.tau
    slopes = np.diff(theta.values, axis=0) / tau[:, None]
    np.testing.assert_allclose(coeff_b[0], np.zeros_like(coeff_b[0]), atol=1e-15)
    for k in range(1, tau.shape[0]):
        np.testing.assert_allclose(coeff_b[k] / tau[k], slopes[k - 1], rtol=1e-12)


def test_reconstruction_exact_on_flat_first_interval():
    grid = uniform(3, 3.0)
    base = np.array([1.0, -2.0])
    slope = np.array([0.5, 0.25])
    values = np.stack([base, base, base + slope, base + 2 * slope])
    theta = ControlPath(grid, values)
    coeff_a, coeff_b, coeff_c = quadratic_reconstruction(theta)
    # theta is constant on interval 1, so the quadratic must equal it exactly
    np.testing.assert_allclose(coeff_a[0], 0.0, atol=1e-15)
    np.testing.assert_allclose(coeff_b[0], 0.0, atol=1e-15)
    np.testing.assert_allclose(coeff_c[0], base)


def test_control_residual_zero_for_constant_controls_zero_adjoint():
    grid = uniform(4, 1.0)
    theta = ControlPath(grid, np.tile(np.arange(6.0), (5, 1)))
    x = StateTrajectory(grid, np.zeros((5, 2, 2)))
    p = AdjointTrajectory(grid, np.zeros((5, 2, 2)))
    np.testing.assert_allclose(control_residual(x, theta, p, 0.7), np.zeros(4), atol=1e-15)


def test_derivative_bracket_cancels():
    _, theta, _, _ = random_triple(4)
    parts = interval_integrals(theta)
    np.testing.assert_allclose(
        parts["dot_vartheta"], parts["dot_theta"], rtol=0, atol=1e-12
    )


def test_interval_integrals_match_quadrature():
    _, theta, _, _ = random_triple(5)
    parts = interval_integrals(theta)
    coeff_a, coeff_b, coeff_c = quadratic_reconstruction(theta)
    nodes = theta.grid.nodes
    tau = theta.grid.tau
    rng = make_rng(99)
    for k in range(tau.shape[0]):
        t0, t1 = nodes[k], nodes[k + 1]
        th0, th1 = theta.values[k], theta.values[k + 1]

        def vartheta(t):
            s = (t - t0) / tau[k]
            return coeff_a[k] * s * s + coeff_b[k] * s + coeff_c[k]

        def theta_lin(t):
            s = (t - t0) / tau[k]
            return (1 - s) * th0 + s * th1

        q = composite_quadrature(lambda t: float(theta_lin(t) @ vartheta(t)), t0, t1, 4000)
        assert abs(parts["theta_vartheta"][k] - q) / abs(q) < 1e-6
        q = composite_quadrature(lambda t: float(theta_lin(t) @ theta_lin(t)), t0, t1, 4000)
        assert abs(parts["theta_theta"][k] - q) / abs(q) < 1e-6
        probe = rng.standard_normal(theta.dim)
        q = composite_quadrature(
            lambda t: float(probe @ (vartheta(t) - theta_lin(t))), t0, t1, 4000
        )
        assert abs(float(probe @ parts["vartheta_minus_theta"][k]) - q) <= 1e-6 * max(abs(q), 1e-3)


def test_control_residual_matches_quadrature():
    from adanode.field import vjp_params

    grid, theta, x, p = random_triple(6)
    lam = 0.37
    rho = control_residual(x, theta, p, lam)
    coeff_a, coeff_b, coeff_c = quadratic_reconstruction(theta)
    nodes, tau = grid.nodes, grid.tau
    for k in range(tau.shape[0]):
        t0 = nodes[k]
        th0, th1 = theta.values[k], theta.values[k + 1]
        dtheta = (th1 - th0) / tau[k]
        w_mid = vjp_params(x.values[k], 0.5 * (th0 + th1), p.values[k + 1])

        def integrand(t):
            s = (t - t0) / tau[k]
            vartheta = coeff_a[k] * s * s + coeff_b[k] * s + coeff_c[k]
            dvartheta = (2 * coeff_a[k] * s + coeff_b[k]) / tau[k]
            theta_lin = (1 - s) * th0 + s * th1
            return float(
                lam * (theta_lin @ (vartheta - theta_lin) + dtheta @ (dvartheta - dtheta))
                + w_mid @ (vartheta - theta_lin)
            )

        q = composite_quadrature(integrand, t0, nodes[k + 1], 4000)
        assert abs(rho[k] - q) <= 1e-6 * max(abs(q), 1e-3)


def test_indicate_zero_everything():
    _, theta, x, p = constant_instance()
    report = indicate(x, theta, p, 0.5)
    np.testing.assert_array_equal(report.eta, np.zeros(3))
    assert report.delta_estimate == 0.0
    assert report.k_star == 1  # ties break toward the lowest interval


def test_indicate_selects_single_active_interval():
    grid = uniform(3, 3.0)
    theta = ControlPath(grid, np.zeros((4, 2)))
    x = StateTrajectory(grid, np.array([[[0.0]], [[0.0]], [[1.0]], [[1.0]]]))
    p = AdjointTrajectory(grid, np.array([[[1.0]], [[1.0]], [[3.0]], [[3.0]]]))
    report = indicate(x, theta, p, 0.0)
    # only interval 2 carries both state and adjoint activity
    assert report.k_star == 2
    assert report.eta[1] > 0
    assert report.eta[0] == 0 and report.eta[2] == 0


def test_indicate_assembly_and_delta():
    grid, theta, x, p = random_triple(7)
    report = indicate(x, theta, p, 0.1)
    np.testing.assert_allclose(
        report.eta,
        report.r_p * report.omega_x + np.abs(report.rho) + report.r_x * report.omega_p,
    )
    assert report.delta_estimate == pytest.approx(0.5 * report.eta.sum())
    assert np.all(report.eta >= 0)


def test_adjoint_scaling_homogeneity():
    grid, theta, x, p = random_triple(8)
    lam = 0.25
    c = 3.7
    scaled = AdjointTrajectory(grid, c * p.values)
    np.testing.assert_allclose(
        adjoint_residuals(x, theta, scaled), c * adjoint_residuals(x, theta, p), rtol=1e-12
    )
    _, omega_p = weights(x, p)
    _, omega_p_scaled = weights(x, scaled)
    np.testing.assert_allclose(omega_p_scaled, c * omega_p, rtol=1e-12)
    # the adjoint-dependent part of rho is linear in p
    rho0 = control_residual(x, theta, p, 0.0)
    rho0_scaled = control_residual(x, theta, scaled, 0.0)
    np.testing.assert_allclose(rho0_scaled, c * rho0, rtol=1e-12)


def test_csv_rows_schema():
    grid, theta, x, p = random_triple(9)
    report = indicate(x, theta, p, 0.1)
    rows = report.csv_rows()
    assert len(rows) == grid.num_intervals
    assert rows[0][0] == 1
    assert rows[-1][2] == pytest.approx(grid.horizon)
    assert len(rows[0]) == len(report.CSV_HEADER)
