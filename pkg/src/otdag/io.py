"""File formats: CSV datasets, edge-list graphs, deterministic JSON.

Dataset CSV: a header row of column names, then one comma-separated row
of decimal numbers per observation ('.' decimal point, UTF-8, '\\n' line
endings). Values are written with 17 significant digits so a save/load
round trip is bit exact.

Graph files: one "parent child" pair of zero-based integers per line.
'#' starts a comment; a leading "# nodes: d" comment records the node
count so isolated nodes survive a round trip.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .synthdata import is_acyclic


class ParseError(ValueError):
    """A malformed input file; the message names the offending line."""


@dataclass
class Dataset:
    values: np.ndarray
    columns: list[str]

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]


def load_dataset(path) -> Dataset:
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ParseError(f"{path}: empty file")
    columns = [c.strip() for c in lines[0].split(",")]
    if len(columns) < 2:
        raise ParseError(f"{path}: line 1: need at least 2 columns, got {len(columns)}")
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        cells = line.split(",")
        if len(cells) != len(columns):
            raise ParseError(
                f"{path}: line {lineno}: expected {len(columns)} cells, got {len(cells)}"
            )
        try:
            rows.append([float(c) for c in cells])
        except ValueError:
            raise ParseError(f"{path}: line {lineno}: non-numeric cell") from None
    if len(rows) < 2:
        raise ParseError(f"{path}: need at least 2 data rows, got {len(rows)}")
    return Dataset(values=np.array(rows, dtype=float), columns=columns)


def save_dataset(path, dataset: Dataset | np.ndarray, columns: list[str] | None = None) -> None:
    if isinstance(dataset, Dataset):
        values, columns = dataset.values, dataset.columns
    else:
        values = np.asarray(dataset, dtype=float)
        if columns is None:
            columns = [f"x{i}" for i in range(values.shape[1])]
    lines = [",".join(columns)]
    for row in values:
        lines.append(",".join(format(v, ".17g") for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_graph(path, num_nodes: int | None = None, require_dag: bool = True) -> np.ndarray:
    """Edge-list file to adjacency (adjacency[child][parent] = 1).

    ``require_dag`` rejects cyclic graphs, as needed for ground-truth
    ingestion; pass False for estimates produced by other tools.
    """
    path = Path(path)
    edges: list[tuple[int, int]] = []
    declared = None
    with path.open("r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            comment = raw.split("#", 1)[1].strip() if "#" in raw else ""
            if comment.startswith("nodes:"):
                try:
                    declared = int(comment.split(":", 1)[1])
                except ValueError:
                    raise ParseError(f"{path}: line {lineno}: bad nodes declaration") from None
            if not line:
                continue
            tokens = line.split()
            if len(tokens) != 2:
                raise ParseError(f"{path}: line {lineno}: expected 'parent child', got {raw.strip()!r}")
            try:
                parent, child = int(tokens[0]), int(tokens[1])
            except ValueError:
                raise ParseError(f"{path}: line {lineno}: non-integer node index") from None
            if parent < 0 or child < 0:
                raise ParseError(f"{path}: line {lineno}: negative node index")
            if parent == child:
                raise ParseError(f"{path}: line {lineno}: self-loop on node {parent}")
            edges.append((parent, child))
    d = num_nodes if num_nodes is not None else declared
    if d is None:
        d = max((max(p, c) for p, c in edges), default=-1) + 1
    if d < 1:
        raise ParseError(f"{path}: no edges and no node count declared")
    adj = np.zeros((d, d), dtype=np.int8)
    for parent, child in edges:
        if parent >= d or child >= d:
            raise ParseError(f"{path}: edge {parent} {child} out of range for {d} nodes")
        adj[child, parent] = 1
    if require_dag and not is_acyclic(adj):
        raise ParseError(f"{path}: graph contains a cycle")
    return adj


def save_graph(path, adjacency: np.ndarray) -> None:
    adj = np.asarray(adjacency)
    d = adj.shape[0]
    lines = [f"# nodes: {d}"]
    for parent, child in sorted(
        (int(p), int(c)) for c in range(d) for p in range(d) if adj[c, p] == 1
    ):
        lines.append(f"{parent} {child}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def save_skeleton(path, skeleton: np.ndarray) -> None:
    """Undirected edge list, one 'i j' line per unordered pair with i < j."""
    sk = np.asarray(skeleton)
    d = sk.shape[0]
    lines = [f"# nodes: {d}", "# undirected skeleton: one line per unordered pair"]
    for i in range(d):
        for j in range(i + 1, d):
            if sk[i, j] == 1:
                lines.append(f"{i} {j}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_skeleton(path) -> np.ndarray:
    """Read an edge list as an undirected skeleton (symmetrized)."""
    adj = load_graph(path, require_dag=False)
    sk = ((adj + adj.T) > 0).astype(np.int8)
    np.fill_diagonal(sk, 0)
    return sk


def write_json(path, payload: dict) -> None:
    """Deterministic JSON: sorted keys, fixed separators, trailing newline."""
    text = json.dumps(payload, indent=2, sort_keys=True)
    Path(path).write_text(text + "\n", encoding="utf-8")


def edges_of(adjacency: np.ndarray) -> list[tuple[int, int]]:
    adj = np.asarray(adjacency)
    d = adj.shape[0]
    return sorted((int(p), int(c)) for c in range(d) for p in range(d) if adj[c, p] == 1)
