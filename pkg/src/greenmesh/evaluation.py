"""Time-slot simulation and scoring of a placement.

:func:`evaluate` is the single fitness oracle shared by every solver. It
walks the slots in order, and in each one

1. reads the powered nodes off the current battery state,
2. associates clients with the chosen policy,
3. records per-node served demand (for gateway flagging), and
4. advances the batteries.

The failure rate is kept as an exact :class:`fractions.Fraction`.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from greenmesh.association import UNBOUNDED, NodeCapacity, get_assigner
from greenmesh.energy import EnergyParams, Sustainability, initial_state, is_sustainable, slot_flows
from greenmesh.errors import DimensionError
from greenmesh.placement import Placement
from greenmesh.scenario import Scenario

__all__ = [
    "FeasibilityReport",
    "Fitness",
    "Placement",
    "default_penalty",
    "evaluate",
    "failure_rate",
    "fitness",
    "objective",
    "write_report_csv",
]


def failure_rate(m, num_clients: int, num_slots: int) -> Fraction:
    """Share of (client, slot) pairs left without a router.

    ``m`` has shape ``(num_slots, num_clients, num_candidates)``.
    """
    if num_clients <= 0 or num_slots <= 0:
        raise ValueError("failure rate needs at least one client and one slot")
    m = np.asarray(m)
    if m.ndim != 3 or m.shape[0] != num_slots or m.shape[1] != num_clients:
        raise DimensionError(
            f"association matrix of shape {m.shape} does not match {num_slots} slots x {num_clients} clients"
        )
    unserved = int((1 - m.sum(axis=2, dtype=np.int64)).sum())
    return Fraction(unserved, num_clients * num_slots)


def objective(p: Placement) -> int:
    """Deployed node count; a gateway is the same device, so it counts once."""
    return p.node_count


@dataclass(frozen=True, eq=False)
class FeasibilityReport:
    placement: Placement
    node_count: int
    failure_rate: Fraction
    sustainable: bool
    feasible: bool
    per_slot_fr: tuple[Fraction, ...]
    energy_trace: np.ndarray  # charge after each slot, shape (num_slots, node_count)
    consumed: np.ndarray
    harvested: np.ndarray
    sustainability: Sustainability
    failure_threshold: float

    @property
    def node_indices(self) -> tuple[int, ...]:
        return self.placement.indices

    @property
    def sustained_energy(self) -> float:
        """Sum of the charges left in placed nodes after the last slot."""
        if self.energy_trace.size == 0:
            return 0.0
        return float(self.energy_trace[-1].sum())

    @property
    def fr_excess(self) -> Fraction:
        return max(Fraction(0), self.failure_rate - Fraction(self.failure_threshold))


def evaluate(scenario: Scenario, p: Placement, params: EnergyParams | None = None, policy: str = "nearest",
             cap: NodeCapacity = UNBOUNDED) -> FeasibilityReport:
    if params is None:
        params = EnergyParams()
    if p.size != scenario.num_candidates:
        raise DimensionError(f"placement covers {p.size} candidates, scenario has {scenario.num_candidates}")
    assign = get_assigner(policy)

    nodes = np.array(p.indices, dtype=np.intp)
    n = nodes.size
    T, V, S = scenario.num_slots, scenario.num_clients, scenario.num_candidates
    dist = scenario.distances[:, nodes]
    in_range = scenario.in_range[:, nodes]
    demand = scenario.demand
    daylight = scenario.daylight_mask

    matrix = np.zeros((T, V, S), dtype=np.uint8)
    charges = np.empty((T, n))
    consumed = np.empty((T, n))
    harvested = np.empty((T, n))
    peak = np.zeros(n)
    clients = np.arange(V)
    memo: dict[tuple[bytes, bytes], np.ndarray] = {}

    state = initial_state(p, params)
    for l in range(T):
        active = state.charge > 0
        key = (active.tobytes(), demand[l].tobytes())
        choice = memo.get(key)
        if choice is None:
            choice = assign(dist, in_range & active[None, :], demand[l], cap)
            memo[key] = choice
        served_mask = choice >= 0
        matrix[l, clients[served_mask], nodes[choice[served_mask]]] = 1
        served = np.bincount(choice[served_mask], weights=demand[l, served_mask], minlength=n)
        np.maximum(peak, served, out=peak)

        c, h = slot_flows(state, served, bool(daylight[l]), params)
        charge = np.clip(state.charge - c + h, 0.0, params.capacity)
        state = type(state)(charge, state.slot + 1)
        charges[l], consumed[l], harvested[l] = charge, c, h

    fr = failure_rate(matrix, V, T)
    per_slot = tuple(Fraction(V - int(matrix[l].sum()), V) for l in range(T))
    sust = is_sustainable(zip(consumed, harvested)) if n else Sustainability((), True, (), ())

    flags = [False] * S
    for k, j in enumerate(nodes):
        flags[j] = bool(peak[k] > scenario.gateway_demand_threshold)
    placement = Placement(p.placed, tuple(flags))

    ok = fr <= Fraction(scenario.failure_threshold) and sust.sustainable
    return FeasibilityReport(
        placement=placement,
        node_count=objective(placement),
        failure_rate=fr,
        sustainable=sust.sustainable,
        feasible=ok,
        per_slot_fr=per_slot,
        energy_trace=charges,
        consumed=consumed,
        harvested=harvested,
        sustainability=sust,
        failure_threshold=scenario.failure_threshold,
    )


@dataclass(frozen=True, order=True)
class Fitness:
    """Penalised objective; lower is better.

    ``value == node_count`` exactly when the placement is feasible.
    """

    value: float
    node_count: int = 0
    feasible: bool = False


def default_penalty(num_candidates: int) -> float:
    return 10.0 * num_candidates


def fitness(report: FeasibilityReport, lam: float) -> Fitness:
    if not lam > 0:
        raise ValueError("penalty weight must be positive")
    weight = Fraction(lam)
    penalty = weight * report.fr_excess + weight * Fraction(report.sustainability.deficit_fraction)
    return Fitness(float(report.node_count + penalty), report.node_count, report.feasible)


REPORT_CSV_COLUMNS = ("placement_id", "node_count", "failure_rate", "failure_rate_exact", "sustainable", "feasible")


def write_report_csv(path, rows) -> None:
    """Write ``(placement_id, FeasibilityReport)`` pairs as CSV."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(REPORT_CSV_COLUMNS)
        for pid, rep in rows:
            writer.writerow((
                pid,
                rep.node_count,
                repr(float(rep.failure_rate)),
                str(rep.failure_rate),
                int(rep.sustainable),
                int(rep.feasible),
            ))
