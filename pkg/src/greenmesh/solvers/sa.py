"""Simulated annealing over placements with single-location moves.

Metropolis acceptance under a geometric schedule ``T_k = T0 * alpha**k``.
The walk starts from the full placement unless ``sa_start='random'``.
"""

from __future__ import annotations

import math
import sys

import numpy as np

from greenmesh.energy import EnergyParams
from greenmesh.evaluation import Fitness
from greenmesh.placement import Placement
from greenmesh.scenario import Scenario
from greenmesh.solvers.common import Incumbent, Objective, PlacementResult, SolverConfig, TraceRow

REMOVE_PROBABILITY = 0.5


def sa_neighbor(p: Placement, rng: np.random.Generator) -> Placement:
    """Drop a random placed node (probability 0.5) or toggle a random location."""
    placed = list(p.placed)
    chosen = p.indices
    if rng.random() < REMOVE_PROBABILITY and chosen:
        j = chosen[rng.integers(len(chosen))]
        placed[j] = False
    else:
        j = int(rng.integers(len(placed)))
        placed[j] = not placed[j]
    return Placement(tuple(placed))


def _value(f) -> float:
    return f.value if isinstance(f, Fitness) else float(f)


def sa_accept(current_fit, new_fit, temperature: float, rng: np.random.Generator) -> bool:
    if not temperature > 0:
        raise ValueError("temperature must be positive")
    delta = _value(new_fit) - _value(current_fit)
    if delta <= 0:
        return True
    return bool(rng.random() < math.exp(-delta / temperature))


def temperature_at(k: int, t0: float, alpha: float) -> float:
    # underflows to 0 after ~15k steps at alpha=0.95; keep it a valid temperature
    return max(t0 * alpha ** k, sys.float_info.min)


def sa_place(scenario: Scenario, params: EnergyParams | None = None, policy: str = "nearest",
             cfg: SolverConfig | None = None, objective: Objective | None = None) -> PlacementResult:
    cfg = cfg or SolverConfig()
    obj = objective or Objective(scenario, params, policy, cfg.penalty)
    rng = np.random.default_rng(cfg.seed)
    D = scenario.num_candidates

    if cfg.sa_start == "full":
        current = Placement.full(D)
    else:
        current = Placement(tuple(bool(b) for b in rng.random(D) < 0.5))
    cur_fit, cur_rep = obj(current)
    best = Incumbent(cur_fit, cur_rep)
    trace = [TraceRow.of(0, best.fit, best.report, obj.evaluations)]
    worse_proposed = worse_accepted = 0

    for k in range(cfg.sa_steps):
        temp = temperature_at(k, cfg.sa_initial_temp, cfg.sa_cooling_alpha)
        cand = sa_neighbor(current, rng)
        new_fit, new_rep = obj(cand)
        worse = new_fit.value > cur_fit.value
        worse_proposed += worse
        if sa_accept(cur_fit, new_fit, temp, rng):
            worse_accepted += worse
            current, cur_fit = cand, new_fit
            best.offer(new_fit, new_rep)
        trace.append(TraceRow.of(k + 1, best.fit, best.report, obj.evaluations))

    return PlacementResult(
        solver="sa",
        best_placement=best.report.placement,
        best_report=best.report,
        best_fitness=best.fit,
        trace=tuple(trace),
        evaluations_used=obj.evaluations,
        extras={"worse_proposed": worse_proposed, "worse_accepted": worse_accepted},
    )
