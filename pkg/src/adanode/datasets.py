"""Deterministic generators for the two classification benchmarks.

Swiss roll: two concentric spirals in the plane with binary labels, with
every other point along the concatenated curves held out for validation.
Peaks: the classic two-dimensional peaks surface on [-3, 3]^2, thresholded
into five classes, sampled 1000 points per class with an 80/20 split.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import ClassPopulationError

SWISS_ROLL_POINTS_PER_SPIRAL = 513
PEAKS_GRID_N = 256
PEAKS_THRESHOLDS = (-2.2, 0.55, 1.75, 3.2)
PEAKS_PER_CLASS = 1000
PEAKS_TRAIN_FRACTION = 0.8


@dataclass(frozen=True)
class LabeledSet:
    """Inputs with labels: binary (m,) 0/1 floats, or one-hot (m, classes)."""

    inputs: np.ndarray
    labels: np.ndarray
    split: Literal["train", "validation"]

    def __post_init__(self):
        if self.inputs.shape[0] != self.labels.shape[0]:
            raise ValueError("input and label counts differ")

    @property
    def size(self) -> int:
        return self.inputs.shape[0]

    def csv_rows(self) -> list[list[float]]:
        """Rows (x1, x2, label) with one-hot labels collapsed to class index."""
        if self.labels.ndim == 1:
            classes = self.labels
        else:
            classes = np.argmax(self.labels, axis=1)
        return [
            [float(p[0]), float(p[1]), int(c)] for p, c in zip(self.inputs, classes)
        ]


def export_csv(dataset: LabeledSet, path: str) -> None:
    """Write a LabeledSet as x1,x2,label rows for inspection or plotting."""
    from . import runio

    runio.write_csv(path, ("x1", "x2", "label"), dataset.csv_rows())


def swiss_roll() -> tuple[LabeledSet, LabeledSet]:
    """Two interleaved spirals, 513 points each, split alternately.

    The spirals share one parameter s in [0, 1]: radius s (label 0) or
    s + 0.2 (label 1), angle 4*pi*s.  The two curves are concatenated and
    even positions go to training, odd to validation, so each split holds
    exactly 513 points.
    """
    s = np.linspace(0.0, 1.0, SWISS_ROLL_POINTS_PER_SPIRAL)
    angle = 4.0 * np.pi * s
    direction = np.column_stack([np.cos(angle), np.sin(angle)])
    inner = s[:, None] * direction
    outer = (s + 0.2)[:, None] * direction

    inputs = np.concatenate([inner, outer])
    labels = np.concatenate(
        [np.zeros(SWISS_ROLL_POINTS_PER_SPIRAL), np.ones(SWISS_ROLL_POINTS_PER_SPIRAL)]
    )
    train = LabeledSet(inputs[0::2], labels[0::2], "train")
    validation = LabeledSet(inputs[1::2], labels[1::2], "validation")
    return train, validation


def peaks_function(x1: np.ndarray, x2: np.ndarray) -> np.ndarray:
    """The standard two-dimensional peaks surface."""
    return (
        3.0 * (1.0 - x1) ** 2 * np.exp(-(x1**2) - (x2 + 1.0) ** 2)
        - 10.0 * (x1 / 5.0 - x1**3 - x2**5) * np.exp(-(x1**2) - x2**2)
        - (1.0 / 3.0) * np.exp(-((x1 + 1.0) ** 2) - x2**2)
    )


def peaks_class_index(values: np.ndarray) -> np.ndarray:
    """Class 0..4 for each surface value, by the fixed thresholds.

    Class i < 4 collects values in [c_{i-1}, c_i) with c_{-1} the surface
    minimum; class 4 collects everything at or above the last threshold.
    """
    return np.searchsorted(np.asarray(PEAKS_THRESHOLDS), values, side="right")


def peaks(
    rng: np.random.Generator, grid_n: int = PEAKS_GRID_N
) -> tuple[LabeledSet, LabeledSet, tuple[float, ...]]:
    """Five-class peaks benchmark: 800 train + 200 validation per class.

    The surface is evaluated on a regular grid_n x grid_n grid over
    [-3, 3]^2, thresholded into five classes, and 1000 grid points per
    class are sampled without replacement.  Labels are one-hot rows.
    Raises :class:`ClassPopulationError` if the grid is too coarse for a
    class to have 1000 members.
    """
    axis = np.linspace(-3.0, 3.0, grid_n)
    g1, g2 = np.meshgrid(axis, axis, indexing="ij")
    points = np.column_stack([g1.ravel(), g2.ravel()])
    classes = peaks_class_index(peaks_function(points[:, 0], points[:, 1]))

    train_per_class = int(PEAKS_PER_CLASS * PEAKS_TRAIN_FRACTION)
    train_idx: list[np.ndarray] = []
    val_idx: list[np.ndarray] = []
    for c in range(5):
        members = np.flatnonzero(classes == c)
        if members.shape[0] < PEAKS_PER_CLASS:
            raise ClassPopulationError(
                f"class {c} has {members.shape[0]} grid points, need {PEAKS_PER_CLASS}"
            )
        chosen = rng.choice(members, size=PEAKS_PER_CLASS, replace=False)
        train_idx.append(chosen[:train_per_class])
        val_idx.append(chosen[train_per_class:])

    def build(idx_blocks: list[np.ndarray], split: str) -> LabeledSet:
        idx = np.concatenate(idx_blocks)
        one_hot = np.zeros((idx.shape[0], 5))
        one_hot[np.arange(idx.shape[0]), classes[idx]] = 1.0
        return LabeledSet(points[idx], one_hot, split)

    return build(train_idx, "train"), build(val_idx, "validation"), PEAKS_THRESHOLDS
