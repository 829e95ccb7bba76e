"""Command-line driver.

Subcommands: gen, learn, tune-only, eval, bench, hsic. Options come from
a flat "key = value" config file plus command-line flags; flags win.
Every run that writes files also writes a manifest.json with the fully
resolved settings, so outputs are byte-reproducible from (config, seed).
Wall-clock measurements go to a separate timings.json.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .hsic import HsicCache
from .io import (
    Dataset,
    ParseError,
    edges_of,
    load_dataset,
    load_graph,
    load_skeleton,
    save_dataset,
    save_graph,
    save_skeleton,
    write_json,
)
from .kernels import GAUSSIAN, KERNEL_KINDS
from .metrics import aupr, confusion, report, shd, sid
from .optimal import GumbelConfig
from .pipeline import expand_grid, learn_dag, run_benchmark
from .synthdata import MECHANISMS, SemModel, random_dag, simulate
from .tuning import tune

CONFIG_KEYS = {
    "seed": int,
    "kernel": str,
    "model": str,
    "d": str,
    "edges": str,
    "n": str,
    "reps": int,
    "lambda": float,
    "temp": float,
    "lr": float,
    "iters": int,
    "batch": int,
    "anneal": bool,
    "standardize": bool,
    "noise-std": float,
    "hidden-width": int,
    "out": str,
}

DEFAULTS = {
    "seed": 0,
    "kernel": GAUSSIAN,
    "model": "abs-tanh-mix",
    "d": "10",
    "edges": "40",
    "n": "100",
    "reps": 1,
    "lambda": 0.01,
    "temp": 1.0,
    "lr": 0.01,
    "iters": 2000,
    "batch": 1,
    "anneal": False,
    "standardize": False,
    "noise-std": 1.0,
    "hidden-width": 100,
    "out": None,
}


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def load_config_file(path) -> dict:
    """Flat 'key = value' lines; '#' comments; keys match the CLI flags."""
    settings = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"{path}: line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("_", "-")
        if key not in CONFIG_KEYS:
            raise ParseError(f"{path}: line {lineno}: unknown key {key!r}")
        caster = CONFIG_KEYS[key]
        try:
            settings[key] = _parse_bool(value) if caster is bool else caster(value)
        except ValueError:
            raise ParseError(f"{path}: line {lineno}: bad value for {key!r}") from None
    return settings


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat key = value settings file (flags win)")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--kernel", choices=KERNEL_KINDS, default=None)
    parser.add_argument("--out", default=None, help="output directory")


def _add_hyper(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--lambda", dest="lambda_", type=float, default=None,
                        help="selector regularization weight")
    parser.add_argument("--temp", type=float, default=None, help="Gumbel-softmax temperature")
    parser.add_argument("--lr", type=float, default=None, help="Adam learning rate")
    parser.add_argument("--iters", type=int, default=None, help="training iterations")
    parser.add_argument("--batch", type=int, default=None, help="Gumbel resamples per step")
    parser.add_argument("--anneal", action="store_true", default=None,
                        help="anneal the temperature linearly to 0.1")
    parser.add_argument("--standardize", action="store_true", default=None,
                        help="z-score columns before HSIC")


def _add_gen_params(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--d", default=None, help="node count (bench: comma list)")
    parser.add_argument("--edges", default=None, help="expected edge count (bench: comma list)")
    parser.add_argument("--n", default=None, help="sample count (bench: comma list)")
    parser.add_argument("--noise-std", dest="noise_std", type=float, default=None)
    parser.add_argument("--hidden-width", dest="hidden_width", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="otdag",
        description="Two-phase DAG learning from observational data via first- and second-order HSIC.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a random DAG and an ANM dataset")
    _add_common(p)
    _add_gen_params(p)
    p.add_argument("--model", default=None, choices=MECHANISMS)

    p = sub.add_parser("learn", help="learn a DAG from a dataset CSV")
    p.add_argument("dataset", help="dataset CSV path")
    _add_common(p)
    _add_hyper(p)

    p = sub.add_parser("tune-only", help="run only the tuning phase from a given skeleton")
    p.add_argument("dataset", help="dataset CSV path")
    p.add_argument("--skeleton", required=True, help="edge-list file, read as undirected pairs")
    _add_common(p)
    p.add_argument("--standardize", action="store_true", default=None)

    p = sub.add_parser("eval", help="score an estimated graph against a true graph")
    p.add_argument("true_graph", help="true-graph edge list")
    p.add_argument("est_graph", help="estimated-graph edge list (cycles allowed)")

    p = sub.add_parser("bench", help="run a benchmark grid of synthetic cells")
    _add_common(p)
    _add_hyper(p)
    _add_gen_params(p)
    p.add_argument("--reps", type=int, default=None, help="repetitions per cell")
    p.add_argument("--model", dest="model", default=None,
                   help="mechanism, or comma list of mechanisms")

    p = sub.add_parser("hsic", help="dump first/second-order HSIC values as JSON")
    p.add_argument("dataset", help="dataset CSV path")
    p.add_argument("--order", type=int, choices=(1, 2), default=1)
    _add_common(p)
    p.add_argument("--standardize", action="store_true", default=None)
    return parser


def resolve_settings(args: argparse.Namespace) -> dict:
    """defaults < config file < explicit flags."""
    settings = dict(DEFAULTS)
    if getattr(args, "config", None):
        settings.update(load_config_file(args.config))
    flag_names = {
        "seed": "seed", "kernel": "kernel", "out": "out", "model": "model",
        "d": "d", "edges": "edges", "n": "n", "reps": "reps",
        "lambda_": "lambda", "temp": "temp", "lr": "lr", "iters": "iters",
        "batch": "batch", "anneal": "anneal", "standardize": "standardize",
        "noise_std": "noise-std", "hidden_width": "hidden-width",
    }
    for attr, key in flag_names.items():
        value = getattr(args, attr, None)
        if value is not None:
            settings[key] = value
    return settings


def gumbel_config(settings: dict) -> GumbelConfig:
    return GumbelConfig(
        temperature=settings["temp"],
        reg_weight=settings["lambda"],
        learning_rate=settings["lr"],
        iterations=settings["iters"],
        batch=settings["batch"],
        seed=settings["seed"],
        anneal=settings["anneal"],
    )


def _manifest(settings: dict, command: str, extra: dict | None = None) -> dict:
    resolved = {
        key: value
        for key, value in sorted(settings.items())
        if value is not None and key != "out"
    }
    payload = {"command": command, "settings": resolved}
    if extra:
        payload.update(extra)
    return payload


def _require_out(settings: dict) -> Path:
    if not settings["out"]:
        raise SystemExit("an output directory is required: pass --out")
    out = Path(settings["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _int_list(text: str, flag: str) -> list[int]:
    try:
        return [int(part) for part in str(text).split(",") if part.strip() != ""]
    except ValueError:
        raise SystemExit(f"--{flag} expects an integer or comma list, got {text!r}") from None


def cmd_gen(args) -> int:
    settings = resolve_settings(args)
    out = _require_out(settings)
    d = _int_list(settings["d"], "d")[0]
    edges = _int_list(settings["edges"], "edges")[0]
    n = _int_list(settings["n"], "n")[0]
    seed = settings["seed"]
    graph = random_dag(d, edges, derive_seed_for(seed, "graph"))
    model = SemModel(kind=settings["model"], noise_std=settings["noise-std"],
                     hidden_width=settings["hidden-width"])
    sample = simulate(graph, model, n, derive_seed_for(seed, "data"))
    save_dataset(out / "data.csv", sample.data)
    save_graph(out / "graph.txt", graph.adjacency)
    meta = sample.metadata()
    meta["graph"] = {
        "d": d, "edges": graph.num_edges, "edge_list": [list(e) for e in graph.edges()],
        "topo_order": [int(v) for v in graph.topo_order],
        "seed": derive_seed_for(seed, "graph"),
    }
    write_json(out / "meta.json", meta)
    write_json(out / "manifest.json", _manifest(settings, "gen"))
    print(f"wrote {out / 'data.csv'} ({n} rows, {d} columns) and {out / 'graph.txt'} "
          f"({graph.num_edges} edges)")
    return 0


def derive_seed_for(seed: int, label: str) -> int:
    from .pipeline import derive_seed

    offsets = {"graph": 0, "data": 1, "train": 2}
    return derive_seed(seed, offsets[label])


def cmd_learn(args) -> int:
    settings = resolve_settings(args)
    out = _require_out(settings)
    dataset = load_dataset(args.dataset)
    config = gumbel_config(settings)
    result = learn_dag(
        dataset.values,
        kernel_kind=settings["kernel"],
        config=config,
        standardize=settings["standardize"],
    )
    save_skeleton(out / "skeleton.txt", result.skeleton)
    save_graph(out / "learned.txt", result.learned)
    write_json(out / "report.json", {
        "dataset": {"rows": dataset.n, "columns": dataset.columns},
        "skeleton_pairs": int(result.skeleton.sum()) // 2,
        "learned_edges": [list(e) for e in edges_of(result.learned)],
        "final_loss": float(result.losses[-1]),
        "loss_descended": bool(result.descended),
    })
    write_json(out / "timings.json", result.timings)
    write_json(out / "manifest.json", _manifest(settings, "learn", {"dataset": str(args.dataset)}))
    print(f"learned {int(result.learned.sum())} edges -> {out / 'learned.txt'}")
    return 0


def cmd_tune_only(args) -> int:
    settings = resolve_settings(args)
    out = _require_out(settings)
    dataset = load_dataset(args.dataset)
    skeleton = load_skeleton(args.skeleton)
    if skeleton.shape[0] != dataset.d:
        raise SystemExit(
            f"skeleton has {skeleton.shape[0]} nodes but the dataset has {dataset.d} columns"
        )
    import time

    t0 = time.perf_counter()
    tuned = tune(skeleton, data=dataset.values, kernel_kind=settings["kernel"],
                 standardize=settings["standardize"])
    elapsed = time.perf_counter() - t0
    save_graph(out / "learned.txt", tuned.learned)
    write_json(out / "timings.json", {"tune": elapsed})
    write_json(out / "manifest.json", _manifest(settings, "tune-only", {
        "dataset": str(args.dataset), "skeleton": str(args.skeleton)}))
    print(f"tuned {int(tuned.learned.sum())} edges -> {out / 'learned.txt'}")
    return 0


def cmd_eval(args) -> int:
    true_adj = load_graph(args.true_graph, require_dag=True)
    est_adj = load_graph(args.est_graph, require_dag=False)
    d = max(true_adj.shape[0], est_adj.shape[0])
    true_adj = _pad(true_adj, d)
    est_adj = _pad(est_adj, d)
    counts = confusion(true_adj, est_adj)
    payload = {
        "sid": sid(true_adj, est_adj),
        "aupr": aupr(true_adj, est_adj.astype(float)),
        "shd": shd(counts),
        "true_edges": int(true_adj.sum()),
        "estimated_edges": int(est_adj.sum()),
        "true_positive": counts.true_positive,
        "false_positive": counts.false_positive,
        "false_negative": counts.false_negative,
    }
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def _pad(adj: np.ndarray, d: int) -> np.ndarray:
    if adj.shape[0] == d:
        return adj
    out = np.zeros((d, d), dtype=adj.dtype)
    out[: adj.shape[0], : adj.shape[1]] = adj
    return out


def cmd_bench(args) -> int:
    settings = resolve_settings(args)
    out = _require_out(settings)
    models = [m.strip() for m in str(settings["model"]).split(",") if m.strip()]
    for m in models:
        if m not in MECHANISMS:
            raise SystemExit(f"unknown mechanism {m!r}, expected one of {MECHANISMS}")
    cells = expand_grid(
        _int_list(settings["d"], "d"),
        _int_list(settings["edges"], "edges"),
        _int_list(settings["n"], "n"),
        models,
    )
    write_json(out / "manifest.json", _manifest(settings, "bench", {
        "cells": [{"d": c.d, "edges": c.edges, "n": c.n, "model": c.model} for c in cells]}))
    report_payload = run_benchmark(
        cells,
        repetitions=settings["reps"],
        master_seed=settings["seed"],
        out_dir=out,
        kernel_kind=settings["kernel"],
        config=gumbel_config(settings),
        noise_std=settings["noise-std"],
        hidden_width=settings["hidden-width"],
        standardize=settings["standardize"],
    )
    done = len(report_payload["cells"])
    print(f"completed {done}/{len(cells)} cells -> {out / 'benchmark.csv'}")
    return 0 if report_payload["completed"] else 1


def cmd_hsic(args) -> int:
    settings = resolve_settings(args)
    dataset = load_dataset(args.dataset)
    cache = HsicCache(dataset.values, kernel_kind=settings["kernel"],
                      standardize=settings["standardize"])
    payload: dict = {
        "kernel": settings["kernel"],
        "columns": dataset.columns,
        "first_order": [
            {"i": i, "j": j, "hsic": cache.first_order(i, j)}
            for i in range(dataset.d)
            for j in range(i + 1, dataset.d)
        ],
    }
    if args.order == 2:
        payload["second_order"] = [
            {"child": i, "pair": [j, k], "hsic": cache.second_order(i, j, k)}
            for i in range(dataset.d)
            for j in range(dataset.d)
            for k in range(j + 1, dataset.d)
            if i != j and i != k
        ]
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


COMMANDS = {
    "gen": cmd_gen,
    "learn": cmd_learn,
    "tune-only": cmd_tune_only,
    "eval": cmd_eval,
    "bench": cmd_bench,
    "hsic": cmd_hsic,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ParseError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
