"""Where should the next layer go?  Per-interval error indicators.

Each interval k of the depth axis is scored with

    eta_k = R_p^k * omega_x^k + |rho_k| + R_x^k * omega_p^k,

pairing state/adjoint equation residuals with the complementary
sensitivity weights plus the control stationarity defect.  Half their sum
estimates how much the objective would change under exact depth; the
argmax interval receives the next layer.  The demo trains the spiral task
briefly, prints the indicator table, and shows the chosen interval.
"""

import numpy as np

from adanode import (
    ControlPath,
    TaskHead,
    indicate,
    make_rng,
    solve_adjoint,
    solve_state,
    terminal_gradient,
    train,
)
from adanode.training import load_dataset, preset_config

config = preset_config("swiss_roll", it_max=300)
data = load_dataset(config)
record = train(config, data)
print(f"after {record.iterations} iterations the grid has {record.depth} intervals")
print("insertions so far at t =", np.round(record.insertion_positions, 2))

theta = ControlPath(record.final_grid, record.final_theta)
head = TaskHead("binary-sigmoid", record.w_out, data[0].labels)
x = solve_state(theta, data[0].inputs @ record.w_in.T)
p = solve_adjoint(theta, x, terminal_gradient(head, x.values[-1]))
report = indicate(x, theta, p, config.lam, config.sup_samples)

print(f"\n{'k':>3} {'interval':>16} {'R_x':>8} {'R_p':>8} "
      f"{'om_x':>8} {'om_p':>8} {'rho':>9} {'eta':>8}")
for row in report.csv_rows():
    k, t0, t1, r_x, r_p, om_x, om_p, rho, eta = row
    marker = "  <- insert here" if k == report.k_star else ""
    print(f"{k:>3} [{t0:>6.2f}, {t1:>6.2f}] {r_x:>8.3f} {r_p:>8.3f} "
          f"{om_x:>8.3f} {om_p:>8.3f} {rho:>9.5f} {eta:>8.3f}{marker}")
print(f"\nestimated objective error (half the indicator sum): {report.delta_estimate:.4f}")
