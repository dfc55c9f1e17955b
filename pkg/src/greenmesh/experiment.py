"""Batch comparison of solvers over seeds, with CSV outputs and a text report."""

from __future__ import annotations

import csv
import os
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from greenmesh.association import NodeCapacity
from greenmesh.energy import EnergyParams
from greenmesh.errors import ConfigurationError
from greenmesh.evaluation import write_report_csv
from greenmesh.scenario import GeneratorConfig, Scenario, generate_scenario, load_scenario
from greenmesh.solvers import SOLVERS, SolverConfig
from greenmesh.solvers.common import Objective, PlacementResult, write_result_energy_csv, write_trace_csv


@dataclass(frozen=True)
class ExperimentConfig:
    out_dir: Path
    solvers: tuple[str, ...] = ("sa", "de")
    seeds: tuple[int, ...] = tuple(range(20))
    scenario_path: Path | None = None
    generator: GeneratorConfig = field(default_factory=GeneratorConfig)
    scenario_seed: int = 42
    failure_threshold: float | None = None
    solver_config: SolverConfig = field(default_factory=SolverConfig)
    energy: EnergyParams = field(default_factory=EnergyParams)
    policy: str = "nearest"
    node_capacity: float = float("inf")
    jobs: int = 1

    def __post_init__(self):
        if not self.solvers:
            raise ConfigurationError("at least one solver is required")
        unknown = [s for s in self.solvers if s not in SOLVERS]
        if unknown:
            raise ConfigurationError(f"unknown solver(s) {unknown}; choose from {sorted(SOLVERS)}")
        if not self.seeds:
            raise ConfigurationError("at least one seed is required")
        if self.jobs < 1:
            raise ConfigurationError("jobs must be >= 1")

    def build_scenario(self) -> Scenario:
        if self.scenario_path is not None:
            scenario = load_scenario(self.scenario_path)
        else:
            scenario = generate_scenario(self.generator, self.scenario_seed)
        if self.failure_threshold is not None:
            scenario = scenario.with_updates(failure_threshold=self.failure_threshold)
        return scenario


@dataclass(frozen=True)
class RunRecord:
    solver: str
    run: int
    seed: int
    node_count: int
    failure_rate: Fraction
    sustainable: bool
    feasible: bool
    evaluations: int
    sustained_energy: float

    @property
    def run_id(self) -> str:
        return f"{self.solver}_run{self.run:02d}_seed{self.seed}"


@dataclass(frozen=True)
class SolverSummary:
    solver: str
    runs: int
    node_count_median: float
    node_count_min: int
    node_count_max: int
    failure_rate_median: float
    failure_rate_min: float
    failure_rate_max: float
    feasible_fraction: float
    evaluations_median: float


@dataclass(frozen=True)
class ExperimentSummary:
    solvers: tuple[SolverSummary, ...]
    runs: tuple[RunRecord, ...] = ()


def summarize(runs: Sequence[RunRecord]) -> ExperimentSummary:
    by_solver: dict[str, list[RunRecord]] = {}
    for r in runs:
        by_solver.setdefault(r.solver, []).append(r)
    rows = []
    for name in sorted(by_solver):
        rs = by_solver[name]
        counts = [r.node_count for r in rs]
        frs = [float(r.failure_rate) for r in rs]
        rows.append(SolverSummary(
            solver=name,
            runs=len(rs),
            node_count_median=float(statistics.median(counts)),
            node_count_min=min(counts),
            node_count_max=max(counts),
            failure_rate_median=float(statistics.median(frs)),
            failure_rate_min=min(frs),
            failure_rate_max=max(frs),
            feasible_fraction=sum(r.feasible for r in rs) / len(rs),
            evaluations_median=float(statistics.median(r.evaluations for r in rs)),
        ))
    return ExperimentSummary(tuple(rows), tuple(runs))


def _run_one(job):
    scenario, solver, seed, cfg, params, policy, capacity = job
    solver_cfg = replace(cfg, seed=seed)
    obj = Objective(scenario, params, policy, solver_cfg.penalty, NodeCapacity(capacity))
    return SOLVERS[solver](scenario, params, policy, solver_cfg, objective=obj)


def run_solver_jobs(scenario: Scenario, cfg: ExperimentConfig) -> list[tuple[str, int, int, PlacementResult]]:
    plan = [(name, k, seed) for name in cfg.solvers for k, seed in enumerate(cfg.seeds)]
    jobs = [
        (scenario, name, seed, cfg.solver_config, cfg.energy, cfg.policy, cfg.node_capacity)
        for name, _, seed in plan
    ]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_run_one, jobs))
    else:
        results = [_run_one(j) for j in jobs]
    return [(name, k, seed, res) for (name, k, seed), res in zip(plan, results)]


def run_experiment(cfg: ExperimentConfig) -> ExperimentSummary:
    """Run every (solver, seed) pair and write traces, run rows and the summary."""
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if not os.access(out, os.W_OK):
        raise PermissionError(f"output directory {out} is not writable")
    scenario = cfg.build_scenario()

    records = []
    reports = []
    for name, k, seed, res in run_solver_jobs(scenario, cfg):
        rep = res.best_report
        rec = RunRecord(
            solver=name,
            run=k,
            seed=seed,
            node_count=rep.node_count,
            failure_rate=rep.failure_rate,
            sustainable=rep.sustainable,
            feasible=rep.feasible,
            evaluations=res.evaluations_used,
            sustained_energy=rep.sustained_energy,
        )
        write_trace_csv(out / f"{rec.run_id}_trace.csv", res)
        write_result_energy_csv(out / f"{rec.run_id}_energy.csv", res)
        records.append(rec)
        reports.append((rec.run_id, rep))

    write_report_csv(out / "runs.csv", reports)
    summary = summarize(records)
    write_summary_csv(out / "summary.csv", summary)
    return summary


SUMMARY_CSV_COLUMNS = (
    "solver",
    "runs",
    "node_count_median",
    "node_count_min",
    "node_count_max",
    "failure_rate_median",
    "failure_rate_min",
    "failure_rate_max",
    "feasible_fraction",
    "evaluations_median",
)


def write_summary_csv(path, summary: ExperimentSummary) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SUMMARY_CSV_COLUMNS)
        for s in summary.solvers:
            writer.writerow([
                repr(v) if isinstance(v, float) else v
                for v in (getattr(s, c) for c in SUMMARY_CSV_COLUMNS)
            ])


def read_summary_csv(path) -> ExperimentSummary:
    ints = {"runs", "node_count_min", "node_count_max"}
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            kwargs = {}
            for c in SUMMARY_CSV_COLUMNS:
                if c == "solver":
                    kwargs[c] = row[c]
                elif c in ints:
                    kwargs[c] = int(row[c])
                else:
                    kwargs[c] = float(row[c])
            rows.append(SolverSummary(**kwargs))
    return ExperimentSummary(tuple(sorted(rows, key=lambda s: s.solver)))


def emit_report(summary: ExperimentSummary) -> str:
    header = (
        f"{'solver':<11}{'runs':>5}  {'nodes median [min-max]':<24}"
        f"{'FR median [min-max]':<30}{'feasible':>9}{'evals':>10}"
    )
    lines = [header, "-" * len(header)]
    for s in sorted(summary.solvers, key=lambda s: s.solver):
        nodes = f"{s.node_count_median:g} [{s.node_count_min}-{s.node_count_max}]"
        fr = f"{s.failure_rate_median:.4f} [{s.failure_rate_min:.4f}-{s.failure_rate_max:.4f}]"
        lines.append(
            f"{s.solver:<11}{s.runs:>5}  {nodes:<24}{fr:<30}{s.feasible_fraction:>9.2f}{s.evaluations_median:>10g}"
        )
    return "\n".join(lines) + "\n"
