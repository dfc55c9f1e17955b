"""Placement solvers. Each takes ``(scenario, params, policy, cfg)`` and returns a PlacementResult."""

from greenmesh.solvers.common import Objective, PlacementResult, SolverConfig, TraceRow, write_trace_csv
from greenmesh.solvers.de import de_crossover, de_mutate, de_place, de_select, decode
from greenmesh.solvers.exhaustive import exhaustive_place
from greenmesh.solvers.greedy import greedy_place
from greenmesh.solvers.sa import sa_accept, sa_neighbor, sa_place

SOLVERS = {
    "de": de_place,
    "exhaustive": exhaustive_place,
    "greedy": greedy_place,
    "sa": sa_place,
}

__all__ = [
    "SOLVERS",
    "Objective",
    "PlacementResult",
    "SolverConfig",
    "TraceRow",
    "de_crossover",
    "de_mutate",
    "de_place",
    "de_select",
    "decode",
    "exhaustive_place",
    "greedy_place",
    "sa_accept",
    "sa_neighbor",
    "sa_place",
    "write_trace_csv",
]
