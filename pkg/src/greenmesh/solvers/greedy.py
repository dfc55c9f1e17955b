"""Constructive greedy placement: add the location that lowers FR the most."""

from __future__ import annotations

from greenmesh.energy import EnergyParams
from greenmesh.placement import Placement
from greenmesh.scenario import Scenario
from greenmesh.solvers.common import Incumbent, Objective, PlacementResult, SolverConfig, TraceRow


def greedy_place(scenario: Scenario, params: EnergyParams | None = None, policy: str = "nearest",
                 cfg: SolverConfig | None = None, objective: Objective | None = None) -> PlacementResult:
    """Grow the placement one node per stage until it is feasible.

    The returned placement is the first feasible stage, or the full
    placement when no stage is feasible. Trace rows track the lowest
    fitness seen so far, one row per stage.
    """
    cfg = cfg or SolverConfig()
    obj = objective or Objective(scenario, params, policy, cfg.penalty)
    D = scenario.num_candidates

    current = Placement.empty(D)
    fit, rep = obj(current)
    seen = Incumbent(fit, rep)
    trace = [TraceRow.of(0, seen.fit, seen.report, obj.evaluations)]
    stage = 0
    while not rep.feasible and current.node_count < D:
        stage += 1
        chosen = None
        for j in range(D):
            if current.placed[j]:
                continue
            cand = Placement(current.placed[:j] + (True,) + current.placed[j + 1:])
            cfit, crep = obj(cand)
            # strict < keeps the lowest index on ties
            if chosen is None or crep.failure_rate < chosen[2].failure_rate:
                chosen = (cand, cfit, crep)
        current, fit, rep = chosen
        seen.offer(fit, rep)
        trace.append(TraceRow.of(stage, seen.fit, seen.report, obj.evaluations))

    return PlacementResult(
        solver="greedy",
        best_placement=rep.placement,
        best_report=rep,
        best_fitness=fit,
        trace=tuple(trace),
        evaluations_used=obj.evaluations,
    )
