"""Five-way classification of the peaks surface with adaptive depth.

The classic two-dimensional peaks surface on [-3, 3]^2 is thresholded
into five level-set classes; 1000 grid points per class are sampled and
split 80/20.  A width-20 network with a softmax readout is grown by the
same indicator-driven insertion as the binary demo.  Run with `--full`
for the benchmark budget (it_max=2500, several minutes).
"""

import sys

import numpy as np

from adanode.datasets import peaks
from adanode.linalg import make_rng
from adanode.training import preset_config, train

full = "--full" in sys.argv
train_set, val_set, thresholds = peaks(make_rng(0))
print(f"class thresholds: {thresholds}")
print(f"train {train_set.size} points, validation {val_set.size} points")
counts = train_set.labels.sum(axis=0).astype(int)
print("training class counts:", dict(enumerate(counts)))

config = preset_config("peaks", seed=3, it_max=2500 if full else 400)
print(f"\ntraining (d={config.d}, it_max={config.it_max}, tol={config.tol}) ...")
record = train(config, (train_set, val_set))

print(f"\nstopped after {record.iterations} iterations ({record.termination})")
print(f"final depth K = {record.depth}, validation accuracy {record.final_accuracy:.3f}")
print("\nloss trace (every 50th iteration):")
for row in record.loss_trace[::50]:
    it, train_loss, _, val_acc, depth = row
    print(f"  it {it:>5} K={depth:>3} loss {train_loss:7.4f} acc {val_acc:.3f}")

positions = np.asarray(record.insertion_positions)
if positions.size:
    print(f"\ninsertions at t = {np.round(positions, 2)}")
