"""Run artifacts: JSON summaries, CSV traces, and hex-exact checkpoints.

All files are written atomically (temp file in the target directory, then
rename) and contain nothing time- or path-dependent, so a run's outputs
are reproducible byte for byte from its configuration and seed.  Arrays in
checkpoints use base-16 float encoding (`float.hex`) to round-trip exactly.
"""

from __future__ import annotations

import csv
import json
import os
import tempfile
from typing import Iterable

import numpy as np

SCHEMA_VERSION = 1


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path: str, payload: dict) -> None:
    _atomic_write(path, json.dumps(payload, indent=2) + "\n")


def write_csv(path: str, header: Iterable, rows: Iterable[Iterable]) -> None:
    import io

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(list(header))
    for row in rows:
        writer.writerow(list(row))
    _atomic_write(path, buffer.getvalue())


def encode_array(array: np.ndarray) -> dict:
    """Exact hex encoding of a float array, preserving shape."""
    flat = np.asarray(array, dtype=float).ravel()
    return {"shape": list(array.shape), "hex": [v.hex() for v in flat]}


def decode_array(payload: dict) -> np.ndarray:
    values = np.array([float.fromhex(h) for h in payload["hex"]], dtype=float)
    return values.reshape(payload["shape"])


def checkpoint_payload(
    grid_nodes: np.ndarray,
    theta: np.ndarray,
    w_in: np.ndarray,
    w_out: np.ndarray,
    optimizer_state: dict,
    rng_state: dict,
    grid_history: list,
    config: dict,
) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "grid_nodes": encode_array(grid_nodes),
        "theta": encode_array(theta),
        "w_in": encode_array(w_in),
        "w_out": encode_array(w_out),
        "optimizer": optimizer_state,
        "rng_state": rng_state,
        "grid_history": grid_history,
        "config": config,
    }


def load_checkpoint(path: str) -> dict:
    with open(path) as handle:
        payload = json.load(handle)
    for key in ("grid_nodes", "theta", "w_in", "w_out"):
        payload[key] = decode_array(payload[key])
    return payload
