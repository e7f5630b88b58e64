"""Command-line front end: train, compare, gradcheck, indicators.

Configurations are JSON documents; traces are CSV; everything written is a
pure function of (config, seed).  Exit codes: 0 success, 2 unreadable or
invalid configuration/checkpoint, 3 numerical abort during training,
4 gradient-check tolerance violation.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import dynamics, field, h1, heads, indicators, oracles, runio
from .errors import NonFiniteError
from .grid import TimeGrid
from .linalg import make_rng
from .training import (
    DATASET_HEADS,
    TrainConfig,
    TrainRecord,
    load_dataset,
    preset_config,
    train,
)

LOSS_HEADER = ("iteration", "train_loss", "val_loss", "val_accuracy", "K")

_CONFIG_KEYS = {
    "mode": "mode",
    "dataset": "dataset",
    "head": "head",
    "d": "d",
    "T": "horizon",
    "lambda": "lam",
    "lr": "lr",
    "tol": "tol",
    "it_max": "it_max",
    "it_up": "it_up",
    "k0": "k0",
    "k_fixed": "k_fixed",
    "seed": "seed",
    "data_seed": "data_seed",
    "n_s": "sup_samples",
    "train_io": "train_io",
    "optimizer": "optimizer",
}
_FIELD_TO_KEY = {v: k for k, v in _CONFIG_KEYS.items()}


class ConfigError(Exception):
    pass


def config_from_dict(raw: dict) -> TrainConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config document must be a JSON object")
    unknown = set(raw) - set(_CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    kwargs = {_CONFIG_KEYS[k]: v for k, v in raw.items()}
    try:
        return TrainConfig(**kwargs)
    except (TypeError, ValueError) as err:
        raise ConfigError(str(err)) from err


def config_to_dict(config: TrainConfig) -> dict:
    out = {}
    for key, attr in _CONFIG_KEYS.items():
        out[key] = getattr(config, attr)
    return out


def load_config(path: str) -> TrainConfig:
    try:
        with open(path) as handle:
            raw = json.load(handle)
    except (OSError, json.JSONDecodeError) as err:
        raise ConfigError(f"cannot read config {path}: {err}") from err
    return config_from_dict(raw)


def _resolve_config(args) -> TrainConfig:
    if args.config:
        config = load_config(args.config)
    elif getattr(args, "preset", None):
        config = preset_config(args.preset)
    else:
        raise ConfigError("either --config or --preset is required")
    overrides = {}
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if getattr(args, "mode", None) is not None:
        overrides["mode"] = args.mode
    if overrides:
        raw = config_to_dict(config)
        raw.update(overrides)
        config = config_from_dict(raw)
    return config


def _optimizer_state(opt) -> dict:
    if opt is None:
        return {}
    if hasattr(opt, "m"):
        return {
            "name": "adam",
            "lr": opt.lr,
            "beta1": opt.beta1,
            "beta2": opt.beta2,
            "eps": opt.eps,
            "t": opt.t,
            "m": runio.encode_array(opt.m),
            "v": runio.encode_array(opt.v),
        }
    return {"name": "gd", "lr": opt.lr}


def write_run_artifacts(record: TrainRecord, out_dir: str, dump_trajectories: bool = False) -> None:
    os.makedirs(out_dir, exist_ok=True)
    config = record.config
    runio.write_json(os.path.join(out_dir, "config.json"), config_to_dict(config))
    runio.write_csv(os.path.join(out_dir, "loss.csv"), LOSS_HEADER, record.loss_trace)
    runio.write_json(
        os.path.join(out_dir, "grids.json"),
        {
            "grids": record.grid_history,
            "insertion_iterations": record.insertion_iterations,
            "insertion_positions": record.insertion_positions,
        },
    )
    runio.write_json(
        os.path.join(out_dir, "summary.json"),
        {
            "schema_version": runio.SCHEMA_VERSION,
            "mode": config.mode,
            "dataset": config.dataset,
            "d": config.d,
            "T": config.horizon,
            "lambda": config.lam,
            "lr": config.lr,
            "tol": config.tol,
            "it_max": config.it_max,
            "it_up": config.it_up,
            "seed": config.seed,
            "iterations": record.iterations,
            "depth": record.depth,
            "final_accuracy": record.final_accuracy,
            "final_train_loss": record.final_train_loss,
            "final_val_loss": record.final_val_loss,
            "termination": record.termination,
        },
    )
    runio.write_json(
        os.path.join(out_dir, "checkpoint.json"),
        runio.checkpoint_payload(
            record.final_grid.nodes,
            record.final_theta,
            record.w_in,
            record.w_out,
            _optimizer_state(record.optimizer),
            record.rng.bit_generator.state if record.rng is not None else {},
            record.grid_history,
            config_to_dict(config),
        ),
    )
    if dump_trajectories:
        data = load_dataset(config)
        theta = dynamics.ControlPath(record.final_grid, record.final_theta)
        x_in = data[0].inputs @ record.w_in.T
        x = dynamics.solve_state(theta, x_in)
        head = heads.TaskHead(config.head_kind, record.w_out, data[0].labels)
        p = dynamics.solve_adjoint(theta, x, heads.terminal_gradient(head, x.values[-1]))
        width = x.values.shape[1] * x.values.shape[2]
        header = ["t"] + [f"v{i}" for i in range(width)]
        runio.write_csv(os.path.join(out_dir, "state.csv"), header, dynamics.trajectory_rows(x))
        runio.write_csv(os.path.join(out_dir, "adjoint.csv"), header, dynamics.trajectory_rows(p))


def cmd_train(args) -> int:
    try:
        config = _resolve_config(args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    record = train(config)
    write_run_artifacts(record, args.out, dump_trajectories=args.dump_trajectories)
    if record.termination == "non_finite_loss":
        print("training aborted on non-finite loss", file=sys.stderr)
        return 3
    print(
        f"{config.mode} run finished: {record.iterations} iterations, depth {record.depth}, "
        f"validation accuracy {record.final_accuracy:.4f} ({record.termination})"
    )
    return 0


def _run_for_compare(config: TrainConfig) -> dict:
    try:
        record = train(config)
        return {
            "seed": config.seed,
            "mode": config.mode,
            "accuracy": record.final_accuracy,
            "iterations": record.iterations,
            "depth": record.depth,
            "termination": record.termination,
            "failed": False,
        }
    except Exception as err:  # per-run failures become failed table cells
        return {
            "seed": config.seed,
            "mode": config.mode,
            "error": str(err),
            "failed": True,
        }


def _run_batch(configs: list[TrainConfig], threads: int) -> list[dict]:
    if threads > 1 and len(configs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(_run_for_compare, configs))
    return [_run_for_compare(c) for c in configs]


def run_comparison(base: TrainConfig, seeds: list[int], threads: int = 1) -> dict:
    """Adaptive, then random and fixed (at the adaptive depth) per seed."""

    def variant(seed: int, mode: str, **extra) -> TrainConfig:
        raw = config_to_dict(base)
        raw.update({"seed": seed, "mode": mode, **extra})
        return config_from_dict(raw)

    adaptive = _run_batch([variant(s, "adaptive") for s in seeds], threads)
    followups = []
    for result in adaptive:
        seed = result["seed"]
        followups.append(variant(seed, "random"))
        depth = result.get("depth") if not result["failed"] else None
        followups.append(variant(seed, "fixed", k_fixed=depth or base.k0))
    others = _run_batch(followups, threads)
    by_mode = {"adaptive": adaptive, "random": [], "fixed": []}
    for result in others:
        by_mode[result["mode"]].append(result)
    return {"dataset": base.dataset, "seeds": seeds, "methods": by_mode}


def comparison_csv_rows(table: dict) -> tuple[list, list]:
    header = ["method"] + [f"seed_{s}" for s in table["seeds"]]
    rows = []
    for mode in ("adaptive", "random", "fixed"):
        row = [mode]
        for result in table["methods"][mode]:
            if result["failed"]:
                row.append("failed")
            else:
                row.append(f"{result['accuracy']:.4f}||{result['iterations']}")
        rows.append(row)
    return header, rows


def cmd_compare(args) -> int:
    try:
        if args.config:
            base = load_config(args.config)
        else:
            base = preset_config(args.dataset)
    except (ConfigError, ValueError) as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    seeds = [int(s) for s in args.seeds.split(",") if s != ""]
    if not seeds:
        print("need at least one seed", file=sys.stderr)
        return 2
    table = run_comparison(base, seeds, threads=args.threads)
    os.makedirs(args.out, exist_ok=True)
    runio.write_json(os.path.join(args.out, "compare.json"), table)
    header, rows = comparison_csv_rows(table)
    runio.write_csv(os.path.join(args.out, "compare.csv"), header, rows)
    for row in rows:
        print(",".join(str(c) for c in row))
    any_ok = any(
        not r["failed"] for mode in table["methods"].values() for r in mode
    )
    return 0 if any_ok else 1


def _gradcheck_instance(config: TrainConfig, m: int = 4, depth: int = 6):
    """Small nonuniform problem with random data, deterministic per seed."""
    rng = make_rng(config.seed)
    d = config.d
    interior = np.sort(rng.uniform(0.15, 0.85, depth - 1)) * config.horizon
    grid = TimeGrid(np.concatenate([[0.0], interior, [config.horizon]]))
    n = d * d + d
    theta = dynamics.ControlPath(grid, 0.5 * rng.standard_normal((depth + 1, n)))
    x_in = rng.standard_normal((m, d))
    w_out = rng.standard_normal((1, d)) / np.sqrt(d)
    labels = (rng.uniform(size=m) < 0.5).astype(float)
    head = heads.TaskHead(heads.BINARY, w_out, labels)
    return grid, theta, x_in, head, rng


def gradient_checks(config: TrainConfig, corrupt: bool = False) -> list[tuple[str, float, float]]:
    """(name, max relative error, tolerance) for each verification check.

    The four finite-difference checks are exact-derivative checks with a
    fixed 1e-5 tolerance; the Sobolev-gradient pairing is first-order
    consistent only, so its tolerance scales with the largest step.
    """
    grid, theta, x_in, head, rng = _gradcheck_instance(config)
    d = config.d
    m = x_in.shape[0]
    lam = config.lam

    original_vjp_state = field.vjp_state
    if corrupt:
        def corrupted(x, th, p):
            out = original_vjp_state(x, th, p)
            out = out.copy()
            out[0, 0] *= 1.05
            return out

        field.vjp_state = corrupted
    try:
        results = []
        theta0 = theta.values[0]
        p_probe = rng.standard_normal((m, d))

        fd = oracles.fd_gradient(lambda v: float(np.sum(p_probe * field.field_eval(v, theta0))), x_in)
        got = field.vjp_state(x_in, theta0, p_probe)
        results.append(("vjp_state", _max_rel_err(got, fd), 1e-5))

        fd = oracles.fd_gradient(
            lambda th: float(np.sum(p_probe * field.field_eval(x_in, th))), theta0
        )
        got = field.vjp_params(x_in, theta0, p_probe)
        results.append(("vjp_params", _max_rel_err(got, fd), 1e-5))

        x = dynamics.solve_state(theta, x_in)
        fd = oracles.fd_gradient(lambda xt: heads.loss(head, xt), x.values[-1])
        got = heads.terminal_gradient(head, x.values[-1])
        results.append(("terminal_gradient", _max_rel_err(got, fd), 1e-5))

        def data_loss(values: np.ndarray) -> float:
            path = dynamics.ControlPath(grid, values)
            return heads.loss(head, dynamics.solve_state(path, x_in).values[-1])

        p = dynamics.solve_adjoint(theta, x, heads.terminal_gradient(head, x.values[-1]))
        got = dynamics.nodal_data_gradient(theta, x, p)
        fd = oracles.fd_gradient(data_loss, theta.values)
        results.append(("nodal_gradient", _max_rel_err(got, fd), 1e-5))

        fem = h1.assemble_fem(grid)

        def objective(values: np.ndarray) -> float:
            path = dynamics.ControlPath(grid, values)
            return data_loss(values) + h1.regularizer_value(fem, path, lam)

        p_hat = h1.reconstruct_adjoint_at_nodes(p)
        z = h1.assemble_z(x, theta, p_hat)
        g = h1.solve_gradient(fem, theta, z, lam)
        errors = []
        for _ in range(5):
            direction = rng.standard_normal(theta.values.shape)
            predicted = h1.h1_pairing(fem, direction, g)
            reference = oracles.fd_directional(
                lambda v: objective(v.reshape(theta.values.shape)),
                theta.values.ravel(),
                direction.ravel(),
            )
            errors.append(abs(predicted - reference) / max(abs(reference), 1e-12))
        tau_max = float(np.max(grid.tau))
        results.append(("h1_consistency", float(np.mean(errors)), tau_max))
        return results
    finally:
        field.vjp_state = original_vjp_state


def _max_rel_err(got: np.ndarray, want: np.ndarray) -> float:
    scale = max(float(np.max(np.abs(want))), 1e-12)
    return float(np.max(np.abs(got - want)) / scale)


def cmd_gradcheck(args) -> int:
    try:
        if args.config:
            config = load_config(args.config)
        else:
            config = TrainConfig(
                mode="adaptive", dataset="swiss_roll", d=3, horizon=1.0, lam=1e-2,
                lr=1e-3, tol=0.025, it_max=0, it_up=50,
            )
        if args.seed is not None:
            raw = config_to_dict(config)
            raw["seed"] = args.seed
            config = config_from_dict(raw)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    failed = False
    for name, err, tol in gradient_checks(config, corrupt=args.corrupt):
        ok = err < tol
        failed = failed or not ok
        print(f"{name:20s} rel_err={err:.3e}  tol={tol:.3e}  {'PASS' if ok else 'FAIL'}")
    return 4 if failed else 0


def cmd_indicators(args) -> int:
    try:
        config = load_config(args.config)
        checkpoint = runio.load_checkpoint(args.checkpoint)
    except (ConfigError, OSError, KeyError, ValueError, json.JSONDecodeError) as err:
        print(f"cannot read inputs: {err}", file=sys.stderr)
        return 2
    grid = TimeGrid(checkpoint["grid_nodes"])
    theta = dynamics.ControlPath(grid, checkpoint["theta"])
    train_set, _ = load_dataset(config)
    head = heads.TaskHead(config.head_kind, checkpoint["w_out"], train_set.labels)
    x_in = train_set.inputs @ checkpoint["w_in"].T
    try:
        x = dynamics.solve_state(theta, x_in)
        p = dynamics.solve_adjoint(theta, x, heads.terminal_gradient(head, x.values[-1]))
    except NonFiniteError as err:
        print(f"cannot evaluate checkpoint: {err}", file=sys.stderr)
        return 3
    report = indicators.indicate(x, theta, p, config.lam, config.sup_samples)
    os.makedirs(args.out, exist_ok=True)
    runio.write_csv(
        os.path.join(args.out, "indicators.csv"),
        indicators.IndicatorReport.CSV_HEADER,
        report.csv_rows(),
    )
    runio.write_json(
        os.path.join(args.out, "grid_history.json"),
        {"grids": checkpoint.get("grid_history", [grid.to_json()])},
    )
    print(f"wrote indicators for {report.eta.shape[0]} intervals; k*={report.k_star}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="adanode", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="run a single training")
    p_train.add_argument("--config", help="JSON config path")
    p_train.add_argument("--preset", choices=("swiss_roll", "peaks"))
    p_train.add_argument("--seed", type=int, default=None, help="override config seed")
    p_train.add_argument("--mode", choices=("adaptive", "random", "fixed"), default=None)
    p_train.add_argument("--out", required=True, help="run directory")
    p_train.add_argument("--dump-trajectories", action="store_true")
    p_train.set_defaults(func=cmd_train)

    p_cmp = sub.add_parser("compare", help="adaptive vs random vs fixed over seeds")
    p_cmp.add_argument("--dataset", choices=("swiss_roll", "peaks"), default="swiss_roll")
    p_cmp.add_argument("--config", help="base JSON config (overrides --dataset preset)")
    p_cmp.add_argument("--seeds", default="0,1,2,3,4", help="comma-separated seeds")
    p_cmp.add_argument("--out", required=True)
    p_cmp.add_argument("--threads", type=int, default=1)
    p_cmp.set_defaults(func=cmd_compare)

    p_gc = sub.add_parser("gradcheck", help="finite-difference derivative checks")
    p_gc.add_argument("--config", help="JSON config path (optional)")
    p_gc.add_argument("--seed", type=int, default=None)
    p_gc.add_argument("--corrupt", action="store_true", help=argparse.SUPPRESS)
    p_gc.set_defaults(func=cmd_gradcheck)

    p_ind = sub.add_parser("indicators", help="per-interval indicator dump")
    p_ind.add_argument("--config", required=True)
    p_ind.add_argument("--checkpoint", required=True)
    p_ind.add_argument("--out", required=True)
    p_ind.set_defaults(func=cmd_indicators)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
