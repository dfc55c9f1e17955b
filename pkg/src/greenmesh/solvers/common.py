"""Shared solver plumbing: configuration, cached objective, results and traces."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from fractions import Fraction

from greenmesh.association import UNBOUNDED, NodeCapacity
from greenmesh.energy import EnergyParams, write_energy_csv
from greenmesh.errors import ConfigurationError
from greenmesh.evaluation import FeasibilityReport, Fitness, default_penalty, evaluate, fitness
from greenmesh.placement import Placement
from greenmesh.scenario import Scenario


@dataclass(frozen=True)
class SolverConfig:
    max_iterations: int = 50
    population_size: int = 100
    crossover_rate: float = 0.5
    scale_factor: float = 0.6
    sa_initial_temp: float = 1.0
    sa_cooling_alpha: float = 0.95
    seed: int = 0
    # None: match the DE evaluation budget, population_size * (max_iterations + 1)
    sa_iterations: int | None = None
    sa_start: str = "full"
    penalty: float | None = None
    exhaustive_limit: int = 20

    def __post_init__(self):
        if self.max_iterations < 0:
            raise ConfigurationError("max_iterations must be >= 0")
        if self.population_size < 4:
            raise ConfigurationError(f"population size must be at least 4, got {self.population_size}")
        if not 0 <= self.crossover_rate <= 1:
            raise ConfigurationError(f"crossover rate must lie in [0, 1], got {self.crossover_rate}")
        if not 0 <= self.scale_factor <= 2:
            raise ConfigurationError(f"scale factor must lie in [0, 2], got {self.scale_factor}")
        if not self.sa_initial_temp > 0:
            raise ConfigurationError("SA initial temperature must be positive")
        if not 0 < self.sa_cooling_alpha < 1:
            raise ConfigurationError("SA cooling factor must lie in (0, 1)")
        if self.sa_iterations is not None and self.sa_iterations < 0:
            raise ConfigurationError("sa_iterations must be >= 0")
        if self.sa_start not in ("full", "random"):
            raise ConfigurationError(f"sa_start must be 'full' or 'random', got {self.sa_start!r}")
        if self.penalty is not None and not self.penalty > 0:
            raise ConfigurationError("penalty must be positive")

    @property
    def sa_steps(self) -> int:
        if self.sa_iterations is not None:
            return self.sa_iterations
        return self.population_size * (self.max_iterations + 1) - 1


class Objective:
    """Memoised placement scorer.

    ``evaluations`` counts every request, cached or not, so the budget seen
    by a solver does not depend on how often it revisits a placement.
    """

    def __init__(self, scenario: Scenario, params: EnergyParams | None = None, policy: str = "nearest",
                 lam: float | None = None, cap: NodeCapacity = UNBOUNDED):
        self.scenario = scenario
        self.params = params if params is not None else EnergyParams()
        self.policy = policy
        self.cap = cap
        self.lam = lam if lam is not None else default_penalty(scenario.num_candidates)
        self.evaluations = 0
        self._cache: dict[tuple[bool, ...], tuple[Fitness, FeasibilityReport]] = {}

    def __call__(self, p: Placement) -> tuple[Fitness, FeasibilityReport]:
        self.evaluations += 1
        hit = self._cache.get(p.placed)
        if hit is None:
            report = evaluate(self.scenario, p, self.params, self.policy, self.cap)
            hit = (fitness(report, self.lam), report)
            self._cache[p.placed] = hit
        return hit


@dataclass(frozen=True)
class TraceRow:
    iteration: int
    best_fitness: float
    best_failure_rate: Fraction
    best_node_count: int
    total_sustained_energy: float
    evaluations: int

    @classmethod
    def of(cls, iteration: int, fit: Fitness, report: FeasibilityReport, evaluations: int) -> "TraceRow":
        return cls(iteration, fit.value, report.failure_rate, report.node_count, report.sustained_energy, evaluations)


@dataclass(frozen=True, eq=False)
class PlacementResult:
    solver: str
    best_placement: Placement
    best_report: FeasibilityReport
    best_fitness: Fitness
    trace: tuple[TraceRow, ...]
    evaluations_used: int
    extras: dict = field(default_factory=dict)

    @property
    def feasible(self) -> bool:
        return self.best_report.feasible


class Incumbent:
    """Best-so-far bookkeeping by fitness value; ties keep the older entry."""

    def __init__(self, fit: Fitness, report: FeasibilityReport):
        self.fit, self.report = fit, report

    def offer(self, fit: Fitness, report: FeasibilityReport) -> bool:
        if fit.value < self.fit.value:
            self.fit, self.report = fit, report
            return True
        return False


TRACE_CSV_COLUMNS = (
    "iteration",
    "best_fitness",
    "best_failure_rate",
    "best_failure_rate_exact",
    "best_node_count",
    "total_sustained_energy",
    "evaluations",
)


def write_trace_csv(path, result: PlacementResult) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRACE_CSV_COLUMNS)
        for row in result.trace:
            writer.writerow((
                row.iteration,
                repr(float(row.best_fitness)),
                repr(float(row.best_failure_rate)),
                str(row.best_failure_rate),
                row.best_node_count,
                repr(float(row.total_sustained_energy)),
                row.evaluations,
            ))


def write_result_energy_csv(path, result: PlacementResult) -> None:
    rep = result.best_report
    write_energy_csv(path, rep.node_indices, rep.energy_trace, rep.consumed, rep.harvested)
