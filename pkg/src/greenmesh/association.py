"""Per-slot client-to-router association.

A slice is a ``(num_clients, num_candidates)`` 0/1 array; a full
:data:`AssociationMatrix` stacks one slice per slot, shape
``(num_slots, num_clients, num_candidates)``. ``a[l, i, j] == 1`` means
client ``i`` is served by the node at candidate ``j`` during slot ``l``.

Two policies are provided:

``nearest``
    Each client, in ascending id order, goes to its nearest active in-range
    node. If that node has no capacity left the client stays unserved; the
    policy never falls back to a farther node.
``pf``
    Proportional fairness, greedy form: each client, in ascending id order,
    picks the eligible node (in range, active, enough remaining capacity)
    with the largest gain in ``sum_j log(1 + served_j)``.

Ties always go to the lowest candidate index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from greenmesh.errors import ConfigurationError, DimensionError
from greenmesh.placement import Placement
from greenmesh.scenario import Scenario

AssociationMatrix = np.ndarray


@dataclass(frozen=True)
class NodeCapacity:
    max_demand_per_slot: float = math.inf

    def __post_init__(self):
        if not self.max_demand_per_slot > 0:
            raise ConfigurationError("max_demand_per_slot must be positive or inf")

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.max_demand_per_slot)


UNBOUNDED = NodeCapacity()

# Internal assignment functions work on the placed-node columns only and
# return, for every client, the column position of its node or -1.
Assigner = Callable[[np.ndarray, np.ndarray, np.ndarray, NodeCapacity], np.ndarray]


def _assign_nearest(dist: np.ndarray, eligible: np.ndarray, demand: np.ndarray, cap: NodeCapacity) -> np.ndarray:
    n_clients, n_nodes = dist.shape
    if n_nodes == 0:
        return np.full(n_clients, -1, dtype=np.intp)
    masked = np.where(eligible, dist, np.inf)
    nearest = np.argmin(masked, axis=1)
    out = np.where(eligible[np.arange(n_clients), nearest], nearest, -1)
    if not cap.bounded:
        return out
    load = np.zeros(n_nodes)
    for i in range(n_clients):
        k = out[i]
        if k < 0:
            continue
        if load[k] + demand[i] <= cap.max_demand_per_slot:
            load[k] += demand[i]
        else:
            out[i] = -1
    return out


def _assign_pf(dist: np.ndarray, eligible: np.ndarray, demand: np.ndarray, cap: NodeCapacity) -> np.ndarray:
    n_clients, n_nodes = dist.shape
    out = np.full(n_clients, -1, dtype=np.intp)
    if n_nodes == 0:
        return out
    load = np.zeros(n_nodes)
    limit = cap.max_demand_per_slot
    for i in range(n_clients):
        ok = eligible[i] & (load + demand[i] <= limit)
        if not ok.any():
            continue
        gain = np.where(ok, np.log1p(load + demand[i]) - np.log1p(load), -np.inf)
        k = int(np.argmax(gain))
        out[i] = k
        load[k] += demand[i]
    return out


POLICIES: dict[str, Assigner] = {"nearest": _assign_nearest, "pf": _assign_pf}


def get_assigner(policy: str) -> Assigner:
    try:
        return POLICIES[policy]
    except KeyError:
        raise ConfigurationError(f"unknown association policy {policy!r}; choose from {sorted(POLICIES)}") from None


def _associate(assigner: Assigner, scenario: Scenario, placement: Placement, active: Iterable[int], slot: int,
               cap: NodeCapacity) -> np.ndarray:
    if placement.size != scenario.num_candidates:
        raise DimensionError(
            f"placement covers {placement.size} candidates, scenario has {scenario.num_candidates}"
        )
    active = set(active)
    nodes = np.array([j for j in placement.indices if j in active], dtype=np.intp)
    dist = scenario.distances[:, nodes]
    eligible = scenario.in_range[:, nodes]
    choice = assigner(dist, eligible, scenario.demand[slot], cap)
    out = np.zeros((scenario.num_clients, scenario.num_candidates), dtype=np.uint8)
    served = choice >= 0
    out[np.flatnonzero(served), nodes[choice[served]]] = 1
    return out


def nearest_cell_associate(scenario: Scenario, placement: Placement, active: Iterable[int], slot: int,
                           cap: NodeCapacity = UNBOUNDED) -> np.ndarray:
    """Association slice for one slot under the nearest-cell policy.

    ``active`` holds candidate indices of powered nodes; indices that are
    not placed are ignored.
    """
    return _associate(_assign_nearest, scenario, placement, active, slot, cap)


def proportional_fairness_associate(scenario: Scenario, placement: Placement, active: Iterable[int], slot: int,
                                    cap: NodeCapacity = UNBOUNDED) -> np.ndarray:
    return _associate(_assign_pf, scenario, placement, active, slot, cap)


def served_load(slice_: np.ndarray, demand: np.ndarray) -> np.ndarray:
    """Demand served by each candidate location in one slot."""
    return np.asarray(demand, dtype=float) @ slice_


def pf_utility(slice_: np.ndarray, demand: np.ndarray) -> float:
    return float(np.log1p(served_load(slice_, demand)).sum())


def association_valid(m: AssociationMatrix, scenario: Scenario, placement: Placement, active_trace) -> bool:
    """Check both matrix invariants in every slot.

    ``active_trace[l]`` is the collection of candidate indices powered in
    slot ``l``.
    """
    m = np.asarray(m)
    if m.ndim == 2:
        m = m[None]
    if m.shape[1:] != (scenario.num_clients, scenario.num_candidates) or m.shape[0] != len(active_trace):
        return False
    if not np.isin(m, (0, 1)).all():
        return False
    if (m.sum(axis=2) > 1).any():
        return False
    placed = np.array(placement.placed, dtype=bool)
    for l, active in enumerate(active_trace):
        allowed = np.zeros(scenario.num_candidates, dtype=bool)
        allowed[list(active)] = True
        allowed &= placed
        ok = scenario.in_range & allowed[None, :]
        if (m[l].astype(bool) & ~ok).any():
            return False
    return True
