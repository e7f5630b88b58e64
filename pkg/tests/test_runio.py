import json

import numpy as np

from adanode import runio
from adanode.linalg import make_rng


def test_hex_array_roundtrip_exact(tmp_path):
    rng = make_rng(0)
    array = rng.standard_normal((4, 7)) * 10.0 ** rng.integers(-300, 300, (4, 7))
    payload = runio.encode_array(array)
    decoded = runio.decode_array(json.loads(json.dumps(payload)))
    assert np.array_equal(decoded, array)
    assert decoded.shape == array.shape


def test_checkpoint_roundtrip(tmp_path):
    rng = make_rng(1)
    payload = runio.checkpoint_payload(
        grid_nodes=np.array([0.0, 0.5, 1.0]),
        theta=rng.standard_normal((3, 6)),
        w_in=rng.standard_normal((2, 2)),
        w_out=rng.standard_normal((1, 2)),
        optimizer_state={"name": "gd", "lr": 0.01},
        rng_state=rng.bit_generator.state,
        grid_history=[[0.0, 1.0], [0.0, 0.5, 1.0]],
        config={"mode": "adaptive"},
    )
    path = tmp_path / "checkpoint.json"
    runio.write_json(str(path), payload)
    loaded = runio.load_checkpoint(str(path))
    assert np.array_equal(loaded["grid_nodes"], payload_decoded(payload, "grid_nodes"))
    assert loaded["config"]["mode"] == "adaptive"
    assert loaded["rng_state"]["bit_generator"] == "PCG64"


def payload_decoded(payload, key):
    return runio.decode_array(payload[key])


def test_write_json_deterministic_bytes(tmp_path):
    payload = {"b": 1.5, "a": [1, 2, 3], "nested": {"x": 1e-300}}
    p1, p2 = tmp_path / "one.json", tmp_path / "two.json"
    runio.write_json(str(p1), payload)
    runio.write_json(str(p2), payload)
    assert p1.read_bytes() == p2.read_bytes()


def test_write_csv_format(tmp_path):
    path = tmp_path / "trace.csv"
    runio.write_csv(str(path), ("a", "b"), [[1, 2.5], [3, 0.1]])
    lines = path.read_text().splitlines()
    assert lines == ["a,b", "1,2.5", "3,0.1"]


def test_atomic_write_leaves_no_temp_files(tmp_path):
    path = tmp_path / "out.json"
    runio.write_json(str(path), {"k": 1})
    leftovers = [p for p in tmp_path.iterdir() if p.name.startswith(".tmp-")]
    assert leftovers == []
