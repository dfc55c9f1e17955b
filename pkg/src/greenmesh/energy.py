"""Per-slot battery bookkeeping for solar-recharged mesh nodes.

Each placed node holds a charge in ``[0, capacity]``. In every slot an
active node (charge > 0) drains ``discharge_rate_base`` plus
``discharge_per_demand`` per unit of demand it served; daylight slots add
``charge_rate``. Surplus above capacity is discarded and a node that hits
zero is off until harvest brings it back above zero.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from greenmesh.errors import DimensionError, ValidationError


@dataclass(frozen=True)
class EnergyParams:
    capacity: float = 100.0
    charge_rate: float = 10.0
    discharge_rate_base: float = 4.0
    discharge_per_demand: float = 0.0

    def __post_init__(self):
        if not self.capacity > 0:
            raise ValidationError(f"capacity must be positive, got {self.capacity}", field="capacity")
        for name in ("charge_rate", "discharge_rate_base", "discharge_per_demand"):
            if not getattr(self, name) >= 0:
                raise ValidationError(f"{name} must be non-negative", field=name)


@dataclass(frozen=True, eq=False)
class EnergyState:
    charge: np.ndarray
    slot: int = 0

    def __eq__(self, other):
        if not isinstance(other, EnergyState):
            return NotImplemented
        return self.slot == other.slot and np.array_equal(self.charge, other.charge)


def initial_state(placement, params: EnergyParams) -> EnergyState:
    """Every placed node starts fully charged at slot 0."""
    n = placement.node_count
    return EnergyState(np.full(n, float(params.capacity)), 0)


def slot_flows(state: EnergyState, served_demand, is_daylight: bool, params: EnergyParams):
    """Energy consumed and harvested by each node over one slot."""
    served = np.asarray(served_demand, dtype=float)
    if served.shape != state.charge.shape:
        raise DimensionError(
            f"served_demand has {served.size} entries for {state.charge.size} placed nodes"
        )
    if np.any(served < 0):
        raise ValueError("served_demand must be non-negative")
    active = state.charge > 0
    consumed = np.where(active, params.discharge_rate_base + params.discharge_per_demand * served, 0.0)
    harvested = np.full(state.charge.shape, params.charge_rate if is_daylight else 0.0)
    return consumed, harvested


def step_energy(state: EnergyState, served_demand, is_daylight: bool, params: EnergyParams) -> EnergyState:
    consumed, harvested = slot_flows(state, served_demand, is_daylight, params)
    charge = np.clip(state.charge - consumed + harvested, 0.0, params.capacity)
    return EnergyState(charge, state.slot + 1)


def active_nodes(state: EnergyState) -> set[int]:
    return {int(n) for n in np.flatnonzero(state.charge > 0)}


@dataclass(frozen=True)
class Sustainability:
    """Horizon energy balance, per node and for the whole network.

    Truthiness follows the per-node verdict, which is the stricter one.
    """

    per_node: tuple[bool, ...]
    aggregate: bool
    consumed: tuple[float, ...]
    harvested: tuple[float, ...]

    @property
    def sustainable(self) -> bool:
        return all(self.per_node)

    def __bool__(self):
        return self.sustainable

    @property
    def deficit_fraction(self) -> float:
        """Summed per-node shortfall relative to total consumption."""
        total = sum(self.consumed)
        if total <= 0:
            return 0.0
        short = sum(max(0.0, c - h) for c, h in zip(self.consumed, self.harvested))
        return short / total


def is_sustainable(trace: Iterable[tuple]) -> Sustainability:
    """Check consumed <= harvested summed over all slots.

    ``trace`` yields one ``(consumed, harvested)`` pair per slot; each member
    is a scalar (a single node or a network total) or a per-node sequence.
    """
    consumed = None
    harvested = None
    for c, h in trace:
        c = np.atleast_1d(np.asarray(c, dtype=float))
        h = np.atleast_1d(np.asarray(h, dtype=float))
        if c.shape != h.shape:
            raise DimensionError("consumed and harvested must have the same shape in every slot")
        if consumed is None:
            consumed, harvested = c.copy(), h.copy()
        else:
            if c.shape != consumed.shape:
                raise DimensionError("node count changed between slots")
            consumed += c
            harvested += h
    if consumed is None:
        return Sustainability((), True, (), ())
    per_node = tuple(bool(x) for x in consumed <= harvested)
    return Sustainability(
        per_node=per_node,
        aggregate=bool(consumed.sum() <= harvested.sum()),
        consumed=tuple(float(x) for x in consumed),
        harvested=tuple(float(x) for x in harvested),
    )


ENERGY_CSV_COLUMNS = ("slot", "node_index", "charge", "consumed", "harvested")


def write_energy_csv(path, node_indices: Sequence[int], charge, consumed, harvested) -> None:
    """Write slot-by-node arrays as long-format rows, one per (slot, node)."""
    charge = np.asarray(charge)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(ENERGY_CSV_COLUMNS)
        for l in range(charge.shape[0]):
            for k, j in enumerate(node_indices):
                writer.writerow(
                    (l, int(j), repr(float(charge[l, k])), repr(float(consumed[l, k])), repr(float(harvested[l, k])))
                )
