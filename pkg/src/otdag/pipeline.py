"""Experiment orchestration: the learn pipeline, benchmarks, evaluation.

Seeding is hierarchical and documented: a single master seed is split
into per-cell and per-repetition streams with a splitmix64-style mix, so
repetitions are reproducible independently of execution order.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import metrics
from .hsic import HsicCache
from .io import edges_of, write_json
from .kernels import GAUSSIAN
from .optimal import GumbelConfig, extract_skeleton, train
from .synthdata import SemModel, TrueGraph, random_dag, simulate
from .tuning import TuneResult, tune

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def derive_seed(master: int, index: int) -> int:
    """splitmix64 finalizer of (master + (index+1) * golden ratio constant).

    Gives independent, reproducible streams for sub-tasks of a run; the
    +1 keeps index 0 from echoing the master state.
    """
    x = (master + (index + 1) * _GOLDEN) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (x ^ (x >> 31)) & _MASK64


@dataclass
class LearnResult:
    skeleton: np.ndarray
    learned: np.ndarray
    phases: dict[str, np.ndarray]
    logits: np.ndarray
    losses: np.ndarray
    descended: bool
    timings: dict[str, float] = field(default_factory=dict)


def learn_dag(
    data,
    kernel_kind: str = GAUSSIAN,
    config: GumbelConfig = GumbelConfig(),
    standardize: bool = False,
) -> LearnResult:
    """Full pipeline: first-order HSIC, selector training, skeleton, tuning."""
    data = np.asarray(data, dtype=float)
    timings: dict[str, float] = {}
    t0 = time.perf_counter()
    cache = HsicCache(data, kernel_kind=kernel_kind, standardize=standardize)
    hsic_vector = cache.first_order_vector()
    timings["first_order"] = time.perf_counter() - t0

    if np.all(hsic_vector == 0.0):
        # no dependence signal at all (e.g. constant columns): nothing to select
        empty = np.zeros((cache.d, cache.d), dtype=np.int8)
        timings["train"] = 0.0
        timings["tune"] = 0.0
        timings["total"] = sum(timings.values())
        return LearnResult(
            skeleton=empty,
            learned=empty.copy(),
            phases={name: empty.copy() for name in TuneResult.PHASE_NAMES},
            logits=np.zeros((hsic_vector.size, hsic_vector.size)),
            losses=np.zeros(1),
            descended=True,
            timings=timings,
        )

    t0 = time.perf_counter()
    trained = train(hsic_vector, config)
    timings["train"] = time.perf_counter() - t0

    skeleton = extract_skeleton(trained.logits, cache.d)

    t0 = time.perf_counter()
    tuned: TuneResult = tune(skeleton, cache=cache)
    timings["tune"] = time.perf_counter() - t0
    timings["total"] = sum(timings.values())

    return LearnResult(
        skeleton=skeleton,
        learned=tuned.learned,
        phases=tuned.phases,
        logits=trained.logits,
        losses=trained.losses,
        descended=trained.descended,
        timings=timings,
    )


def _metrics_dict(true_adj, est_adj) -> dict:
    rep = metrics.report(true_adj, est_adj)
    return {
        "sid": rep.sid,
        "aupr": rep.aupr,
        "shd": rep.shd,
        "estimated_edges": rep.estimated_edges,
    }


def _aggregate(values: list[float]) -> dict:
    arr = np.asarray(values, dtype=float)
    return {
        "mean": float(arr.mean()),
        "median": float(np.median(arr)),
        "stddev": float(arr.std()),
    }


@dataclass(frozen=True)
class BenchCell:
    d: int
    edges: int
    n: int
    model: str


def expand_grid(ds: list[int], edges: list[int], ns: list[int], models: list[str]) -> list[BenchCell]:
    """Zip d/edges/n into graph settings (length-1 lists broadcast), crossed with models."""
    width = max(len(ds), len(edges), len(ns))

    def widen(xs, name):
        if len(xs) == width:
            return xs
        if len(xs) == 1:
            return xs * width
        raise ValueError(f"--{name} has {len(xs)} values, expected 1 or {width}")

    ds, edges, ns = widen(ds, "d"), widen(edges, "edges"), widen(ns, "n")
    return [
        BenchCell(d=d, edges=s, n=n, model=m)
        for d, s, n in zip(ds, edges, ns)
        for m in models
    ]


METRIC_COLUMNS = ("sid", "aupr", "shd", "estimated_edges")
CSV_HEADER = "d,edges,n,model,kernel,phase,stat,sid,aupr,shd,estimated_edges"
PHASES = ("skeleton", "deletion", "addition", "dag")
STATS = ("mean", "median", "stddev")


def run_benchmark(
    cells: list[BenchCell],
    repetitions: int,
    master_seed: int,
    out_dir,
    kernel_kind: str = GAUSSIAN,
    config: GumbelConfig = GumbelConfig(),
    noise_std: float = 1.0,
    hidden_width: int = 100,
    standardize: bool = False,
) -> dict:
    """Run every cell x repetition, score each phase, write CSV + JSON reports.

    benchmark.csv gains one row per cell x phase x statistic as soon as a
    cell finishes, so partial results survive a failure. Wall-clock goes
    to timings.json; the primary outputs are byte-deterministic in
    (cells, repetitions, master_seed, hyperparameters).
    """
    if repetitions < 1:
        raise ValueError(f"repetitions must be >= 1, got {repetitions}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "benchmark.csv"
    report: dict = {"master_seed": master_seed, "repetitions": repetitions, "cells": [], "completed": False}
    timings: list[dict] = []
    with csv_path.open("w", encoding="utf-8", newline="") as csv_file:
        csv_file.write(CSV_HEADER + "\n")
        csv_file.flush()
        try:
            for cell_index, cell in enumerate(cells):
                t_cell = time.perf_counter()
                cell_seed = derive_seed(master_seed, cell_index)
                model = SemModel(kind=cell.model, noise_std=noise_std, hidden_width=hidden_width)
                reps = []
                for rep in range(repetitions):
                    rep_seed = derive_seed(cell_seed, rep)
                    graph_seed = derive_seed(rep_seed, 0)
                    data_seed = derive_seed(rep_seed, 1)
                    train_seed = derive_seed(rep_seed, 2)
                    graph = random_dag(cell.d, cell.edges, graph_seed)
                    sample = simulate(graph, model, cell.n, data_seed)
                    result = learn_dag(
                        sample.data,
                        kernel_kind=kernel_kind,
                        config=GumbelConfig(
                            temperature=config.temperature,
                            reg_weight=config.reg_weight,
                            learning_rate=config.learning_rate,
                            iterations=config.iterations,
                            batch=config.batch,
                            seed=train_seed,
                            anneal=config.anneal,
                            final_temperature=config.final_temperature,
                        ),
                        standardize=standardize,
                    )
                    reps.append(
                        {
                            "rep": rep,
                            "seeds": {"graph": graph_seed, "data": data_seed, "train": train_seed},
                            "true_edges": graph.num_edges,
                            "phases": {
                                name: _metrics_dict(graph.adjacency, adj)
                                for name, adj in result.phases.items()
                            },
                            "learned_edges": [list(e) for e in edges_of(result.learned)],
                        }
                    )
                aggregates = {
                    phase: {
                        metric: _aggregate([r["phases"][phase][metric] for r in reps])
                        for metric in METRIC_COLUMNS
                    }
                    for phase in PHASES
                }
                for phase in PHASES:
                    for stat in STATS:
                        row = [
                            str(cell.d), str(cell.edges), str(cell.n), cell.model,
                            kernel_kind, phase, stat,
                        ] + [format(aggregates[phase][m][stat], ".10g") for m in METRIC_COLUMNS]
                        csv_file.write(",".join(row) + "\n")
                csv_file.flush()
                report["cells"].append(
                    {
                        "d": cell.d, "edges": cell.edges, "n": cell.n, "model": cell.model,
                        "kernel": kernel_kind,
                        "repetitions": reps,
                        "aggregates": aggregates,
                    }
                )
                timings.append(
                    {"d": cell.d, "edges": cell.edges, "n": cell.n, "model": cell.model,
                     "seconds": time.perf_counter() - t_cell}
                )
            report["completed"] = True
        finally:
            write_json(out_dir / "report.json", report)
            write_json(out_dir / "timings.json", {"cells": timings})
    return report
