"""Exact minimum-count placement by enumerating subsets smallest first."""

from __future__ import annotations

from itertools import combinations

from greenmesh.energy import EnergyParams
from greenmesh.errors import ResourceGuardError
from greenmesh.placement import Placement
from greenmesh.scenario import Scenario
from greenmesh.solvers.common import Incumbent, Objective, PlacementResult, SolverConfig, TraceRow


def exhaustive_place(scenario: Scenario, params: EnergyParams | None = None, policy: str = "nearest",
                     cfg: SolverConfig | None = None, objective: Objective | None = None) -> PlacementResult:
    """Return the first feasible subset by (cardinality, lexicographic) order.

    When nothing is feasible the full placement is reported. One trace row
    is written per completed cardinality level.
    """
    cfg = cfg or SolverConfig()
    D = scenario.num_candidates
    if D > cfg.exhaustive_limit:
        raise ResourceGuardError(
            f"exhaustive search over {D} candidates needs 2^{D} evaluations "
            f"(limit {cfg.exhaustive_limit}); use the greedy, sa or de solver instead"
        )
    obj = objective or Objective(scenario, params, policy, cfg.penalty)

    seen = None
    found = None
    trace = []
    for k in range(D + 1):
        for combo in combinations(range(D), k):
            fit, rep = obj(Placement.from_indices(D, combo))
            if seen is None:
                seen = Incumbent(fit, rep)
            else:
                seen.offer(fit, rep)
            if rep.feasible:
                found = (fit, rep)
                break
        trace.append(TraceRow.of(k, seen.fit, seen.report, obj.evaluations))
        if found:
            break

    if found is None:
        found = obj(Placement.full(D))
    fit, rep = found
    return PlacementResult(
        solver="exhaustive",
        best_placement=rep.placement,
        best_report=rep,
        best_fitness=fit,
        trace=tuple(trace),
        evaluations_used=obj.evaluations,
    )
