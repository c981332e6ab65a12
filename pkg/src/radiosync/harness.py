"""Seeded experiment sweeps, CSV emission, and the acceptance driver.

Every output is a pure function of the root seed: per-trial generators
are derived from (root seed, cell index, trial index), cells and
trials are emitted in deterministic order, and wall-clock timings are
kept out of the CSV files so identical inputs give byte-identical
outputs.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .netsim import DriftParams, SimConfig
from .protocol import run_pipeline
from .randsched import graph_stats
from .seeding import spawn_rng

#: per-run CSV schema, fixed
RUN_COLUMNS = (
    "seed",
    "d",
    "n",
    "beta",
    "exclusive",
    "success",
    "max_radio_cost",
    "rounds",
    "diameter",
)

#: per-cell summary CSV schema, fixed (wall-clock deliberately absent)
SUMMARY_COLUMNS = (
    "d",
    "beta",
    "n",
    "exclusive",
    "drift_c",
    "trials",
    "success_rate",
    "mean_max_radio_cost",
    "max_radio_cost",
    "mean_diameter",
)


@dataclass(frozen=True)
class ExperimentSpec:
    """A sweep grid; one cell per (d, beta, exclusive, drift_c) tuple."""

    d_grid: tuple[int, ...]
    beta_grid: tuple[float, ...]
    exclusive_grid: tuple[bool, ...] = (False,)
    drift_c_grid: tuple[Optional[float], ...] = (None,)
    trials: int = 1
    root_seed: int = 0
    out_path: Optional[str] = None

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError(f"trials must be positive, got {self.trials}")
        if not (self.d_grid and self.beta_grid and self.exclusive_grid):
            raise ValueError("grids must be non-empty")

    def cells(self) -> list[tuple[int, float, bool, Optional[float]]]:
        return [
            (d, beta, excl, drift_c)
            for d in self.d_grid
            for beta in self.beta_grid
            for excl in self.exclusive_grid
            for drift_c in self.drift_c_grid
        ]


@dataclass
class SummaryRecord:
    d: int
    beta: float
    n: int
    exclusive: bool
    drift_c: Optional[float]
    trials: int
    success_rate: float
    mean_max_radio_cost: float
    max_radio_cost: int
    mean_diameter: float
    wall_clock_s: float = field(compare=False, default=0.0)

    def csv_row(self) -> list:
        return [
            self.d,
            self.beta,
            self.n,
            int(self.exclusive),
            "" if self.drift_c is None else self.drift_c,
            self.trials,
            f"{self.success_rate:.6g}",
            f"{self.mean_max_radio_cost:.6g}",
            self.max_radio_cost,
            f"{self.mean_diameter:.6g}" if math.isfinite(self.mean_diameter) else "inf",
        ]


def make_drift(n: int, ratio_bound: float, rng: np.random.Generator) -> DriftParams:
    """Random clock speeds within the declared ratio bound."""
    speeds = 1.0 + rng.random(n) * (ratio_bound - 1.0)
    return DriftParams(
        speeds=tuple(float(s) for s in speeds),
        ratio_bound=ratio_bound,
        min_transmit_time=1.0,
    )


def run_one(
    d: int,
    beta: float,
    exclusive: bool,
    drift_c: Optional[float],
    seed: int,
    rng: Optional[np.random.Generator] = None,
    trace: Optional[list] = None,
) -> dict:
    """Single seeded pipeline run, reported as a flat record.

    ``trace``, when given, collects one radio event per meeting unit.
    The per-node awake counts ride along under a non-CSV key.
    """
    if rng is None:
        rng = spawn_rng(seed)
    config = SimConfig(d=d, beta=beta, exclusive=exclusive, seed=seed)
    if drift_c is not None:
        config.drift = make_drift(config.n, drift_c, rng)
    result = run_pipeline(config, rng, trace=trace)
    stats = graph_stats(result.comm_graph, root=result.root_index)
    return {
        "seed": seed,
        "d": d,
        "n": config.n,
        "beta": beta,
        "exclusive": int(exclusive),
        "success": int(result.success),
        "max_radio_cost": int(result.per_node_radio_cost.max()),
        "rounds": result.rounds_used,
        "diameter": stats.diameter,
        "_per_node_cost": result.per_node_radio_cost.tolist(),
    }


def run_sweep(spec: ExperimentSpec) -> list[SummaryRecord]:
    """Run every cell of the grid and aggregate.

    Per-trial seeds derive from (root seed, cell index, trial index);
    output order is (cell, trial) regardless of any execution order.
    Writes the summary CSV when the spec names an output path.
    """
    from .seeding import derive_seed

    records = []
    for cell_idx, (d, beta, excl, drift_c) in enumerate(spec.cells()):
        t0 = time.perf_counter()
        runs = []
        for trial_idx in range(spec.trials):
            seed = derive_seed(spec.root_seed, cell_idx, trial_idx)
            runs.append(run_one(d, beta, excl, drift_c, seed))
        diameters = [r["diameter"] for r in runs if math.isfinite(r["diameter"])]
        records.append(
            SummaryRecord(
                d=d,
                beta=beta,
                n=runs[0]["n"],
                exclusive=excl,
                drift_c=drift_c,
                trials=spec.trials,
                success_rate=sum(r["success"] for r in runs) / spec.trials,
                mean_max_radio_cost=sum(r["max_radio_cost"] for r in runs)
                / spec.trials,
                max_radio_cost=max(r["max_radio_cost"] for r in runs),
                mean_diameter=(
                    sum(diameters) / len(diameters) if diameters else math.inf
                ),
                wall_clock_s=time.perf_counter() - t0,
            )
        )
    if spec.out_path is not None:
        Path(spec.out_path).write_text(summaries_to_csv(records))
    return records


def summaries_to_csv(records: Sequence[SummaryRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SUMMARY_COLUMNS)
    for rec in records:
        writer.writerow(rec.csv_row())
    return buf.getvalue()


def runs_to_csv(runs: Sequence[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RUN_COLUMNS)
    for r in runs:
        writer.writerow([r[c] for c in RUN_COLUMNS])
    return buf.getvalue()


def per_node_costs_to_csv(costs: Sequence[int]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("node", "radio_cost"))
    for node, cost in enumerate(costs):
        writer.writerow((node, cost))
    return buf.getvalue()


def trace_to_csv(trace: Sequence[tuple]) -> str:
    """Event-trace rows: time unit, awake set, transmitters, and who
    heard whom. Node lists are |-separated; deliveries are
    ``receiver<-senders`` entries separated by ';' (an empty sender
    list means the receiver heard only noise)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("t", "awake", "transmitters", "deliveries"))
    for t, awake, transmitters, delivered in trace:
        deliveries = ";".join(
            f"{r}<-" + "|".join(str(s) for s in senders)
            for r, senders in sorted(delivered.items())
        )
        writer.writerow(
            (
                t,
                "|".join(str(x) for x in awake),
                "|".join(str(x) for x in transmitters),
                deliveries,
            )
        )
    return buf.getvalue()


def load_config_file(path: str) -> dict:
    """Flat key/value config (JSON object); flags override these."""
    data = json.loads(Path(path).read_text())
    if not isinstance(data, dict):
        raise ValueError(f"{path}: expected a flat JSON object")
    for key, value in data.items():
        if isinstance(value, (dict, list)):
            raise ValueError(f"{path}: key {key!r} is not flat")
    return data


def run_acceptance(stream=None) -> bool:
    """Run the full acceptance suite, one line per criterion.

    Returns True iff every criterion passed.
    """
    from .acceptance import run_all

    report = run_all(stream=stream)
    return all(c.passed for c in report)
