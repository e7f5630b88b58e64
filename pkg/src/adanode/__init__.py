"""Depth-adaptive training of residual networks viewed as neural ODEs.

The network's hidden state follows x_dot = F(x, theta(t)) over an
artificial time horizon; time steps play the role of layers.  Training
solves the discrete first-order system (explicit forward state march,
backward adjoint march, Sobolev Riesz gradient), and per-interval
dual-weighted residual indicators decide where new layers are inserted.

Typical entry points:

    from adanode import preset_config, train
    record = train(preset_config("swiss_roll", seed=1))

or the ``adanode`` command line (train | compare | gradcheck | indicators).
"""

from .datasets import LabeledSet, export_csv, peaks, peaks_function, swiss_roll
from .dynamics import (
    AdjointTrajectory,
    ControlPath,
    StateTrajectory,
    nodal_data_gradient,
    solve_adjoint,
    solve_state,
)
from .field import field_eval, pack_theta, unpack_theta, vjp_params, vjp_state
from .grid import TimeGrid, insert_midpoint, uniform
from .h1 import (
    FemMatrices,
    assemble_fem,
    assemble_z,
    h1_pairing,
    reconstruct_adjoint_at_nodes,
    regularizer_value,
    solve_gradient,
)
from .heads import TaskHead, accuracy, loss, terminal_gradient
from .indicators import IndicatorReport, indicate
from .linalg import Tridiagonal, gaussian_matrix, make_rng, solve_tridiagonal
from .optim import Adam, GradientDescent
from .training import TrainConfig, TrainRecord, initialize, preset_config, train

__all__ = [
    "Adam",
    "AdjointTrajectory",
    "ControlPath",
    "FemMatrices",
    "GradientDescent",
    "IndicatorReport",
    "LabeledSet",
    "StateTrajectory",
    "TaskHead",
    "TimeGrid",
    "TrainConfig",
    "TrainRecord",
    "Tridiagonal",
    "accuracy",
    "assemble_fem",
    "assemble_z",
    "export_csv",
    "field_eval",
    "gaussian_matrix",
    "h1_pairing",
    "indicate",
    "initialize",
    "insert_midpoint",
    "loss",
    "make_rng",
    "nodal_data_gradient",
    "pack_theta",
    "peaks",
    "peaks_function",
    "preset_config",
    "reconstruct_adjoint_at_nodes",
    "regularizer_value",
    "solve_adjoint",
    "solve_gradient",
    "solve_state",
    "solve_tridiagonal",
    "swiss_roll",
    "terminal_gradient",
    "train",
    "unpack_theta",
    "uniform",
    "vjp_params",
    "vjp_state",
]
