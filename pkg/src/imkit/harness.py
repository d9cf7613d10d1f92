"""Experiment runner, accuracy table and report writers."""

from __future__ import annotations

import csv
import io
import json
import os
import time
from dataclasses import asdict, dataclass, fields
from typing import Iterable

import numpy as np

from imkit import fixtures
from imkit.aapc import activation_probabilities, aapc_select, steady_state_probabilities
from imkit.baselines import degree_select, greedy_mc_select
from imkit.eaapc import DEFAULT_EPS, eaapc_select
from imkit.errors import ValidationError
from imkit.graph import Graph, LoadOptions, load_edge_list
from imkit.oracle import estimate_influence_mc, exact_influence_enumeration
from imkit.selection import SeedSelectionResult

ALGORITHMS = ("aapc", "eaapc", "greedy-mc", "steady-state", "degree")
SELECTORS = ("aapc", "eaapc", "greedy-mc", "degree")
FIXTURES = ("figure1", "figure2")


@dataclass
class ExperimentConfig:
    dataset: str
    algorithm: str = "eaapc"
    k: int = 50
    p: float | None = None
    undirected: bool = False
    T: int = 4
    eps: float | None = None
    max_level: int | None = None
    reps_select: int = 5000
    reps_eval: int = 5000
    master_seed: int = 0
    lazy: bool = False

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValidationError(f"unknown algorithm {self.algorithm!r}; expected one of {ALGORITHMS}")
        if self.p is not None and not 0.0 < self.p <= 1.0:
            raise ValidationError(f"p must be in (0, 1], got {self.p}")
        if self.k < 1:
            raise ValidationError("k must be >= 1")
        if self.eps is not None and self.max_level is not None:
            raise ValidationError("set at most one of eps / max_level")
        if self.algorithm == "eaapc" and self.eps is None and self.max_level is None:
            self.eps = DEFAULT_EPS
        if self.reps_select < 1 or self.reps_eval < 1:
            raise ValidationError("replication counts must be >= 1")


@dataclass
class ReportRow:
    algorithm: str
    k_prefix: int
    spread_mean: float
    spread_stderr: float
    select_time: float
    eval_time: float


def load_dataset(name: str, p: float | None = None, undirected: bool = False) -> Graph:
    """Resolve a fixture name, a ``pa:N:ATTACH:SEED`` synthetic dataset, or an edge-list path."""
    if name == "figure1":
        return fixtures.figure1_graph(0.1 if p is None else p)
    if name == "figure2":
        return fixtures.figure2_graph(fixtures.FIGURE2_P if p is None else p)
    if name.startswith("pa:"):
        try:
            n, attach, seed = (int(x) for x in name[3:].split(":"))
        except ValueError:
            raise ValidationError(f"synthetic dataset must be pa:N:ATTACH:SEED, got {name!r}") from None
        return fixtures.preferential_attachment_graph(n, attach, 0.01 if p is None else p, seed)
    if not os.path.exists(name):
        raise FileNotFoundError(f"dataset not found: {name}")
    return load_edge_list(name, LoadOptions(undirected=undirected, uniform_prob=p))


def select_seeds(g: Graph, cfg: ExperimentConfig) -> SeedSelectionResult:
    if cfg.algorithm == "aapc":
        return aapc_select(g, cfg.k, cfg.T, lazy=cfg.lazy)
    if cfg.algorithm == "eaapc":
        return eaapc_select(g, cfg.k, max_level=cfg.max_level, eps=cfg.eps or DEFAULT_EPS)
    if cfg.algorithm == "greedy-mc":
        return greedy_mc_select(g, cfg.k, cfg.reps_select, cfg.master_seed)
    if cfg.algorithm == "degree":
        return degree_select(g, cfg.k)
    raise ValidationError(f"{cfg.algorithm!r} computes probabilities, it does not select seeds")


def evaluate_prefixes(
    g: Graph, result: SeedSelectionResult, reps: int, master_seed: int
) -> list[ReportRow]:
    """MC spread of every seed prefix, all prefixes sharing one master seed."""
    rows = []
    for i in range(1, len(result.seeds) + 1):
        t0 = time.perf_counter()
        est = estimate_influence_mc(g, result.seeds[:i], reps, master_seed)
        rows.append(ReportRow(result.algorithm, i, est.mean, est.std_error, result.wall_time,
                              time.perf_counter() - t0))
    return rows


def run_experiment(cfg: ExperimentConfig, graph: Graph | None = None) -> list[ReportRow]:
    g = graph if graph is not None else load_dataset(cfg.dataset, cfg.p, cfg.undirected)
    result = select_seeds(g, cfg)
    return evaluate_prefixes(g, result, cfg.reps_eval, cfg.master_seed)


ROW_FIELDS = [f.name for f in fields(ReportRow)]
TIMING_FIELDS = ("select_time", "eval_time")


def _row_dict(row: ReportRow, timing: bool) -> dict:
    d = asdict(row)
    if not timing:
        for f in TIMING_FIELDS:
            d[f] = None
    return d


def format_rows(rows: Iterable[ReportRow], fmt: str = "csv", timing: bool = False) -> str:
    """Serialize report rows. Timing columns stay empty unless ``timing`` is set,
    which keeps output byte-identical across reruns."""
    rows = list(rows)
    if fmt == "json":
        return "".join(json.dumps(_row_dict(r, timing)) + "\n" for r in rows)
    if fmt != "csv":
        raise ValidationError(f"unknown format {fmt!r}")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ROW_FIELDS)
    for r in rows:
        d = _row_dict(r, timing)
        w.writerow(["" if d[f] is None else (repr(d[f]) if isinstance(d[f], float) else d[f]) for f in ROW_FIELDS])
    return buf.getvalue()


def format_for_path(path: str) -> str:
    return "json" if path.endswith((".json", ".jsonl")) else "csv"


@dataclass
class AccuracyTable:
    """Per-vertex AAPC ``till`` at t = 0..T_max, steady-state and exact probabilities."""

    labels: np.ndarray
    aapc: np.ndarray
    steady_state: np.ndarray
    exact: np.ndarray

    @property
    def T_max(self) -> int:
        return self.aapc.shape[1] - 1

    def header(self) -> list[str]:
        return ["vertex"] + [f"T={t}" for t in range(self.T_max + 1)] + ["steady_state", "exact"]

    def rows(self) -> list[list]:
        out = []
        for i, lab in enumerate(self.labels):
            out.append([int(lab)] + [float(x) for x in self.aapc[i]]
                       + [float(self.steady_state[i]), float(self.exact[i])])
        return out

    def to_csv(self, digits: int | None = None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header())
        for row in self.rows():
            w.writerow([row[0]] + [repr(x) if digits is None else f"{x:.{digits}f}" for x in row[1:]])
        return buf.getvalue()


def accuracy_report(g: Graph, seeds: Iterable[int], T_max: int = 6) -> AccuracyTable:
    seeds = list(seeds)
    exact = exact_influence_enumeration(g, seeds)
    table = activation_probabilities(g, seeds, T_max)
    steady = steady_state_probabilities(g, seeds, tol=1e-12)
    return AccuracyTable(g.labels.copy(), table.probtill.copy(), steady.probs, exact.probs)


def fixture_seeds(name: str, g: Graph) -> list[int]:
    """Default seed for the accuracy fixtures: vertex 1 of figure2, u of figure1."""
    if name == "figure2":
        return [g.index_of(1)]
    if name == "figure1":
        return [0]
    raise ValidationError(f"unknown fixture {name!r}; expected one of {FIXTURES}")
