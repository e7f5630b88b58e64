"""Per-interval error indicators driving layer insertion.

Each interval k of the grid receives

    eta_k = R_p^k * omega_x^k + |rho_k| + R_x^k * omega_p^k,

pairing equation residuals with sensitivity weights:

* R_x^k, R_p^k measure how badly the piecewise-constant state/adjoint
  satisfy their equations on the interval (a sup-norm term sampled at
  ``num_samples`` uniformly spaced points, plus weighted jump terms);
* omega_x^k, omega_p^k are the nodal increments, i.e. the distance of the
  piecewise-constant trajectories from their continuous reconstructions;
* rho_k is the stationarity defect of the control, evaluated against a
  globally continuous piecewise-quadratic control reconstruction with all
  interval integrals in closed form.

Half the sum of the eta_k estimates the objective error of the current
depth; the interval with the largest eta_k is where a layer is inserted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import field
from .dynamics import AdjointTrajectory, ControlPath, StateTrajectory
from .errors import GridMismatchError
from .grid import TimeGrid

DEFAULT_SUP_SAMPLES = 5


def _batch_norm(v: np.ndarray) -> float:
    return float(np.linalg.norm(v))


def _sample_fractions(num_samples: int) -> np.ndarray:
    if num_samples < 2:
        raise ValueError("need at least the two endpoint samples")
    return np.linspace(0.0, 1.0, num_samples)


def state_residuals(
    x: StateTrajectory, theta: ControlPath, num_samples: int = DEFAULT_SUP_SAMPLES
) -> np.ndarray:
    """R_x^k for k = 1..K.

    tau_k * sup ||F(x^{k-1}, theta(t))|| over the interval, plus the own
    jump ||x^k - x^{k-1}|| weighted by tau_k/(tau_k + tau_{k+1}) (weight 1
    at k = K, where no interval follows), plus for 2 <= k <= K-1 the left
    neighbour jump weighted by tau_k/(tau_k + tau_{k-1}).
    """
    if x.values.shape[0] != theta.values.shape[0]:
        raise GridMismatchError("state and control node counts differ")
    tau = theta.grid.tau
    num_k = tau.shape[0]
    fractions = _sample_fractions(num_samples)
    jumps = np.array([_batch_norm(x.values[k + 1] - x.values[k]) for k in range(num_k)])

    out = np.empty(num_k)
    for i in range(num_k):
        start = theta.values[i]
        delta = theta.values[i + 1] - theta.values[i]
        sup = max(
            _batch_norm(field.field_eval(x.values[i], start + s * delta))
            for s in fractions
        )
        value = tau[i] * sup
        own_weight = tau[i] / (tau[i] + tau[i + 1]) if i + 1 < num_k else 1.0
        value += own_weight * jumps[i]
        if 1 <= i <= num_k - 2:
            value += tau[i] / (tau[i] + tau[i - 1]) * jumps[i - 1]
        out[i] = value
    return out


def adjoint_residuals(
    x: StateTrajectory,
    theta: ControlPath,
    p: AdjointTrajectory,
    num_samples: int = DEFAULT_SUP_SAMPLES,
) -> np.ndarray:
    """R_p^k for k = 1..K, mirroring :func:`state_residuals` for the adjoint.

    The sup term integrates the transposed linearisation along the
    interval; the own jump ||p^k - p^{k-1}|| carries weight
    tau_k/(tau_{k-1} + tau_k) with tau_0 = 0 (weight 1 at k = 1), and for
    k <= K-1 the forward jump ||p^{k+1} - p^k|| carries
    tau_k/(tau_k + tau_{k+1}).
    """
    if x.values.shape[0] != theta.values.shape[0] or p.values.shape != x.values.shape:
        raise GridMismatchError("state/control/adjoint node counts differ")
    tau = theta.grid.tau
    num_k = tau.shape[0]
    fractions = _sample_fractions(num_samples)
    jumps = np.array([_batch_norm(p.values[k + 1] - p.values[k]) for k in range(num_k)])

    out = np.empty(num_k)
    for i in range(num_k):
        start = theta.values[i]
        delta = theta.values[i + 1] - theta.values[i]
        sup = max(
            _batch_norm(field.vjp_state(x.values[i], start + s * delta, p.values[i + 1]))
            for s in fractions
        )
        value = tau[i] * sup
        own_weight = tau[i] / (tau[i - 1] + tau[i]) if i >= 1 else 1.0
        value += own_weight * jumps[i]
        if i <= num_k - 2:
            value += tau[i] / (tau[i] + tau[i + 1]) * jumps[i + 1]
        out[i] = value
    return out


def weights(x: StateTrajectory, p: AdjointTrajectory) -> tuple[np.ndarray, np.ndarray]:
    """(omega_x, omega_p): nodal increment norms per interval."""
    if x.values.shape != p.values.shape:
        raise GridMismatchError("state and adjoint node counts differ")
    omega_x = np.linalg.norm(np.diff(x.values, axis=0).reshape(x.values.shape[0] - 1, -1), axis=1)
    omega_p = np.linalg.norm(np.diff(p.values, axis=0).reshape(p.values.shape[0] - 1, -1), axis=1)
    return omega_x, omega_p


def quadratic_reconstruction(theta: ControlPath) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Coefficients (A, B, C) of the continuous piecewise-quadratic control fit.

    On interval k in the local coordinate s = (t - t_{k-1})/tau_k the
    reconstruction is A_k s^2 + B_k s + C_k, pinned by the two nodal values
    and by matching the left-neighbour slope at the interval's left end
    (slope 0 at t = 0):

        C_k = theta^{k-1},  B_k = S_{k-1} tau_k,  A_k = dtheta_k - B_k,

    with S_0 = 0 and S_k = dtheta_k / tau_k.
    """
    tau = theta.grid.tau
    delta = np.diff(theta.values, axis=0)  # (K, n)
    slopes = delta / tau[:, None]
    coeff_b = np.zeros_like(delta)
    if delta.shape[0] > 1:
        coeff_b[1:] = slopes[:-1] * tau[1:, None]
    coeff_a = delta - coeff_b
    coeff_c = theta.values[:-1].copy()
    return coeff_a, coeff_b, coeff_c


def interval_integrals(theta: ControlPath) -> dict[str, np.ndarray]:
    """Closed-form interval integrals of the control against its reconstruction.

    Per interval (arrays over k = 1..K):

    * ``theta_vartheta``: int(theta, vartheta)
        = tau_k [(theta^{k-1}, alpha) + (theta^k, beta)],
        alpha = A/12 + B/6 + C/2,  beta = A/4 + B/3 + C/2;
    * ``theta_theta``: int(theta, theta) via the local mass matrix
        [[tau/3, tau/6], [tau/6, tau/3]];
    * ``dot_vartheta``: int(theta_dot, vartheta_dot) = (dtheta, A + B)/tau_k;
    * ``dot_theta``: int(theta_dot, theta_dot) = |dtheta|^2 / tau_k;
    * ``vartheta_minus_theta``: the vector int(vartheta - theta) dt
        = tau_k [A/3 + B/2 + C - (theta^{k-1} + theta^k)/2].

    ``dot_vartheta`` equals ``dot_theta`` identically since A_k + B_k is the
    nodal increment; both are returned so the cancellation stays observable.
    """
    tau = theta.grid.tau
    coeff_a, coeff_b, coeff_c = quadratic_reconstruction(theta)
    left = theta.values[:-1]
    right = theta.values[1:]
    delta = right - left

    alpha = coeff_a / 12.0 + coeff_b / 6.0 + coeff_c / 2.0
    beta = coeff_a / 4.0 + coeff_b / 3.0 + coeff_c / 2.0
    return {
        "theta_vartheta": tau
        * (np.sum(left * alpha, axis=1) + np.sum(right * beta, axis=1)),
        "theta_theta": tau
        * (
            (np.sum(left * left, axis=1) + np.sum(right * right, axis=1)) / 3.0
            + np.sum(left * right, axis=1) / 3.0
        ),
        "dot_vartheta": np.sum(delta * (coeff_a + coeff_b), axis=1) / tau,
        "dot_theta": np.sum(delta * delta, axis=1) / tau,
        "vartheta_minus_theta": tau[:, None]
        * (coeff_a / 3.0 + coeff_b / 2.0 + coeff_c - 0.5 * (left + right)),
    }


def control_residual(
    x: StateTrajectory, theta: ControlPath, p: AdjointTrajectory, lam: float
) -> np.ndarray:
    """Signed stationarity defects rho_k, all integrals in closed form.

    With the quadratic reconstruction vartheta and the piecewise-linear
    control theta:

        rho_k = lambda [ int(theta, vartheta - theta)
                       + int(theta_dot, vartheta_dot - theta_dot) ]
              + ( vjp_params(x^{k-1}, theta(m_k), p^k), int(vartheta - theta) ),

    with the parameter adjoint product treated as constant on the interval,
    evaluated from the same data the marching schemes use.
    """
    tau = theta.grid.tau
    mids = theta.midpoint_values()
    parts = interval_integrals(theta)

    rho = np.empty(tau.shape[0])
    for i in range(tau.shape[0]):
        w_mid = field.vjp_params(x.values[i], mids[i], p.values[i + 1])
        rho[i] = lam * (
            (parts["theta_vartheta"][i] - parts["theta_theta"][i])
            + (parts["dot_vartheta"][i] - parts["dot_theta"][i])
        ) + float(w_mid @ parts["vartheta_minus_theta"][i])
    return rho


@dataclass(frozen=True)
class IndicatorReport:
    """Per-interval residuals, weights, defects, and the assembled eta_k."""

    grid: TimeGrid
    r_x: np.ndarray
    r_p: np.ndarray
    omega_x: np.ndarray
    omega_p: np.ndarray
    rho: np.ndarray
    eta: np.ndarray
    delta_estimate: float
    k_star: int  # 1-based interval index attaining max eta (lowest on ties)

    CSV_HEADER = ("k", "t_left", "t_right", "R_x", "R_p", "omega_x", "omega_p", "rho", "eta")

    def csv_rows(self) -> list[list]:
        rows = []
        for i in range(self.eta.shape[0]):
            rows.append(
                [
                    i + 1,
                    float(self.grid.nodes[i]),
                    float(self.grid.nodes[i + 1]),
                    float(self.r_x[i]),
                    float(self.r_p[i]),
                    float(self.omega_x[i]),
                    float(self.omega_p[i]),
                    float(self.rho[i]),
                    float(self.eta[i]),
                ]
            )
        return rows


def indicate(
    x: StateTrajectory,
    theta: ControlPath,
    p: AdjointTrajectory,
    lam: float,
    num_samples: int = DEFAULT_SUP_SAMPLES,
) -> IndicatorReport:
    """Assemble eta_k = R_p omega_x + |rho| + R_x omega_p and pick the argmax."""
    r_x = state_residuals(x, theta, num_samples)
    r_p = adjoint_residuals(x, theta, p, num_samples)
    omega_x, omega_p = weights(x, p)
    rho = control_residual(x, theta, p, lam)
    eta = r_p * omega_x + np.abs(rho) + r_x * omega_p
    return IndicatorReport(
        grid=theta.grid,
        r_x=r_x,
        r_p=r_p,
        omega_x=omega_x,
        omega_p=omega_p,
        rho=rho,
        eta=eta,
        delta_estimate=float(0.5 * eta.sum()),
        k_star=int(np.argmax(eta)) + 1,
    )
