"""Experiment orchestration: instance ensembles x CD orders x T sweeps -> CSV rows.

Configs are JSON objects::

    {
      "family": "RandomQubo",          # or MaxCut, Factorization, Random4Local, Heisenberg
      "n_qubits": 6,
      "ensemble_size": 20,             # random families: seeds seed_base .. seed_base+size-1
      "seed_base": 0,
      "params": {},                    # family parameters (N, n_x, n_y, g, J, beta, edges, ...)
      "sweep": {"beta": [0.2, 0.3]},   # optional: one instance per value of one parameter
      "instance_file": null,           # optional: a single instance loaded from disk
      "orders": [0, 1, 2, 3],
      "t_delta": [0.05],               # or {"min": 0.01, "max": 100, "points": 30} (log-uniform)
      "n_steps": null,                 # null: evolve.default_steps
      "n_samples": 401,
      "gap_grid": 201,
      "coherence_basis": "full",       # or "adiabatic"
      "output": "results.csv",
      "series_output": null,           # optional per-sample coherence CSV
      "workers": null                  # null: CDQC_WORKERS or os.cpu_count()
    }
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from functools import lru_cache
from typing import Any

import numpy as np

from .agp import AgpExpansion
from .evolve import MAX_NORM_DRIFT, InvalidTraceError, propagate
from .metrics import evaluate_trace
from .problems import Family, ProblemInstance, ground_space, load_instance, make_instance
from .schedule import min_gap

SCHEMA_VERSION = 1
WORKERS_ENV = "CDQC_WORKERS"


@dataclass
class ExperimentConfig:
    family: str = "RandomQubo"
    n_qubits: int = 6
    ensemble_size: int = 1
    seed_base: int = 0
    params: dict = field(default_factory=dict)
    sweep: dict | None = None
    instance_file: str | None = None
    orders: list = field(default_factory=lambda: [0, 1, 2, 3])
    t_delta: Any = field(default_factory=lambda: {"min": 1e-2, "max": 1e2, "points": 30})
    n_steps: int | None = None
    n_samples: int = 401
    gap_grid: int = 201
    coherence_basis: str = "full"
    output: str | None = None
    series_output: str | None = None
    workers: int | None = None

    def __post_init__(self):
        Family(self.family)
        if self.n_qubits < 1 or self.ensemble_size < 1 or self.n_samples < 2 or self.gap_grid < 2:
            raise ValueError("sizes must be positive (n_samples, gap_grid >= 2)")
        if len(set(self.orders)) != len(self.orders) or any(o < 0 for o in self.orders):
            raise ValueError(f"orders must be distinct non-negative integers, got {self.orders}")
        if self.sweep is not None and len(self.sweep) != 1:
            raise ValueError("sweep must name exactly one parameter")
        if self.coherence_basis not in ("full", "adiabatic"):
            raise ValueError(f"unknown coherence_basis {self.coherence_basis!r}")
        grid = self.t_delta_grid()
        if any(v <= 0 for v in grid) or list(grid) != sorted(grid):
            raise ValueError("t_delta grid must be positive and sorted")

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def t_delta_grid(self) -> list[float]:
        td = self.t_delta
        if isinstance(td, dict):
            return [float(v) for v in np.logspace(math.log10(td["min"]), math.log10(td["max"]), int(td["points"]))]
        if isinstance(td, (int, float)):
            return [float(td)]
        return [float(v) for v in td]

    def instance_sources(self) -> list[tuple]:
        """Hashable ``(key, family, n, seed, params_json, file)`` tuples, one per instance."""
        if self.instance_file:
            return [(0, self.family, self.n_qubits, None, "{}", self.instance_file)]
        if self.sweep:
            (name, values), = self.sweep.items()
            return [(i, self.family, self.n_qubits, None,
                     json.dumps({**self.params, name: v}, sort_keys=True), None)
                    for i, v in enumerate(values)]
        random = Family(self.family) in (Family.RANDOM_QUBO, Family.RANDOM_4LOCAL) or \
            self.params.get("random_weights")
        if random:
            return [(self.seed_base + i, self.family, self.n_qubits, self.seed_base + i,
                     json.dumps(self.params, sort_keys=True), None) for i in range(self.ensemble_size)]
        return [(0, self.family, self.n_qubits, None, json.dumps(self.params, sort_keys=True), None)]


@dataclass
class ResultRow:
    family: str
    instance_seed: int
    n_qubits: int
    order_l: int
    T: float
    t_delta: float
    regime: str
    C_P: float
    dE_avg: float
    tau_qsl: float
    p_success: float
    norm_drift: float
    gamma_residual_max: float

    @property
    def flagged(self) -> bool:
        return not (self.norm_drift <= MAX_NORM_DRIFT)


CSV_COLUMNS = [f.name for f in fields(ResultRow)]


@dataclass
class SeriesRow:
    family: str
    instance_seed: int
    order_l: int
    t_delta: float
    t: float
    gap_t: float
    lambda_: float
    C_re: float


SERIES_COLUMNS = ["family", "instance_seed", "order_l", "t_delta", "t", "gap_t", "lambda", "C_re"]


# -- per-worker caches -------------------------------------------------------

@lru_cache(maxsize=8)
def _instance(source: tuple) -> ProblemInstance:
    key, family, n, seed, params_json, path = source
    return load_instance(path) if path else make_instance(family, n, seed, json.loads(params_json))


@lru_cache(maxsize=8)
def _prepared(source: tuple, gap_grid: int):
    inst = _instance(source)
    gap = min_gap(inst, gap_grid).gap
    _, ground = ground_space(inst.h_final)
    return inst, gap, ground


@lru_cache(maxsize=16)
def _expansion(source: tuple, order: int) -> AgpExpansion:
    return AgpExpansion.from_instance(_instance(source), order)


def run_task(task: tuple) -> tuple[ResultRow, list[SeriesRow]]:
    """One (instance, order, t_delta) run."""
    source, order, td, n_steps, n_samples, gap_grid, basis, want_series = task
    inst, gap, ground = _prepared(source, gap_grid)
    expansion = _expansion(source, order)
    T = td / gap
    try:
        trace = propagate(inst, expansion, T, n_steps=n_steps, n_samples=n_samples)
    except InvalidTraceError as exc:
        tr = exc.trace
        nan = float("nan")
        return ResultRow(inst.family.value, source[0], inst.n_qubits, order, T, td, "", nan, nan, nan, nan,
                         tr.norm_drift, nan), []
    m = evaluate_trace(trace, gap, ground, basis=basis)
    residual = max((expansion.solve_alphas(lam).residual for lam in trace.lambdas), default=0.0) \
        if order else 0.0
    row = ResultRow(inst.family.value, source[0], inst.n_qubits, order, float(T), float(td),
                    m.regime.value, m.mean_coherence, m.avg_energy_fluctuation, m.qsl_time,
                    m.success_probability, trace.norm_drift, float(residual))
    series = []
    if want_series:
        series = [SeriesRow(inst.family.value, source[0], order, float(td), float(t), float(gap * t),
                            float(lam), float(c))
                  for t, lam, c in zip(trace.times, trace.lambdas, m.coherence_series)]
    return row, series


def resolve_workers(requested: int | None) -> int:
    if requested:
        return max(1, int(requested))
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass
class ExperimentResult:
    rows: list[ResultRow]
    series: list[SeriesRow]
    summary: list[dict]

    @property
    def n_flagged(self) -> int:
        return sum(r.flagged for r in self.rows)


def run_experiment(config: ExperimentConfig, workers: int | None = None) -> ExperimentResult:
    """Run every (instance, order, t_delta) triple; rows are sorted by (seed, order, T).

    Writes ``config.output`` / ``config.series_output`` when set.
    """
    want_series = config.series_output is not None
    tasks = [(source, order, td, config.n_steps, config.n_samples, config.gap_grid,
              config.coherence_basis, want_series)
             for source in config.instance_sources() for order in config.orders for td in config.t_delta_grid()]
    n_workers = resolve_workers(workers or config.workers)
    if n_workers == 1 or len(tasks) == 1:
        results = [run_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(n_workers) as pool:
            results = list(pool.map(run_task, tasks, chunksize=max(1, len(tasks) // (4 * n_workers))))
    rows = sorted((r for r, _ in results), key=lambda r: (r.instance_seed, r.order_l, r.T))
    series = sorted((s for _, ss in results for s in ss),
                    key=lambda s: (s.instance_seed, s.order_l, s.t_delta, s.t))
    result = ExperimentResult(rows, series, summarize(rows))
    if config.output:
        write_rows_csv(rows, config.output)
    if config.series_output:
        write_series_csv(series, config.series_output)
    return result


def summarize(rows: list[ResultRow]) -> list[dict]:
    """Ensemble means per (order, t_delta)."""
    groups: dict[tuple, list[ResultRow]] = {}
    for r in rows:
        groups.setdefault((r.order_l, r.t_delta), []).append(r)
    out = []
    for (order, td), rs in sorted(groups.items()):
        out.append({
            "order_l": order, "t_delta": td, "n": len(rs),
            "C_P": float(np.mean([r.C_P for r in rs])),
            "dE_avg": float(np.mean([r.dE_avg for r in rs])),
            "p_success": float(np.mean([r.p_success for r in rs])),
            "tau_qsl_over_T": float(np.mean([r.tau_qsl / r.T for r in rs])),
        })
    return out


def format_summary(summary: list[dict]) -> str:
    lines = [f"{'order':>5} {'t_delta':>10} {'n':>4} {'C_P':>8} {'dE_avg':>10} {'p':>8} {'tau/T':>7}"]
    for s in summary:
        lines.append(f"{s['order_l']:>5} {s['t_delta']:>10.4g} {s['n']:>4} {s['C_P']:>8.4f} "
                     f"{s['dE_avg']:>10.4f} {s['p_success']:>8.4f} {s['tau_qsl_over_T']:>7.4f}")
    return "\n".join(lines)


def _fmt(v):
    return repr(float(v)) if isinstance(v, (float, np.floating)) else str(v)


def rows_to_csv(rows: list[ResultRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([_fmt(v) for v in asdict(r).values()])
    return buf.getvalue()


def write_rows_csv(rows: list[ResultRow], path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(rows_to_csv(rows))


def write_series_csv(series: list[SeriesRow], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SERIES_COLUMNS)
        for s in series:
            w.writerow([_fmt(v) for v in asdict(s).values()])


def read_csv(path, columns: list[str]) -> list[dict]:
    """Read a result CSV, checking the header against ``columns``."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        if header != columns:
            missing = [c for c in columns if c not in header]
            extra = [c for c in header if c not in columns]
            detail = f"missing {missing}, unexpected {extra}" if missing or extra else "column order differs"
            raise ValueError(f"{path}: schema mismatch ({detail})")
        rows = [dict(zip(header, line)) for line in reader if line]
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return rows


def gamma_diagnostics(instance: ProblemInstance, order: int, lams) -> list[dict]:
    return AgpExpansion.from_instance(instance, order).gamma_table(lams)


def write_dict_rows(rows: list[dict], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: _fmt(v) for k, v in r.items()})
