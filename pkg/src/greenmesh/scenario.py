"""Problem instances: candidate grid, clients, time-slot profile and thresholds.

A :class:`Scenario` is an immutable value object. Geometry that every
evaluation needs (client/candidate distances and the coverage mask) is
computed lazily once per instance and cached.

Indices are 0-based throughout: candidate ``j`` in ``range(num_candidates)``,
client ``i`` in ``range(num_clients)`` and slot ``l`` in ``range(num_slots)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Sequence

import numpy as np

from greenmesh.errors import ConfigurationError, ScenarioFormatError, ValidationError

DEFAULT_FAILURE_THRESHOLD = 0.05


@dataclass(frozen=True)
class CandidateLocation:
    index: int
    position: tuple[float, float]


@dataclass(frozen=True)
class Client:
    id: int
    position: tuple[float, float]
    demand: tuple[float, ...]


@dataclass(frozen=True)
class Scenario:
    field_width: float
    field_height: float
    grid_rows: int
    grid_cols: int
    candidate_locations: tuple[CandidateLocation, ...]
    clients: tuple[Client, ...]
    num_slots: int
    daylight_slots: frozenset[int]
    coverage_radius: float
    failure_threshold: float = DEFAULT_FAILURE_THRESHOLD
    gateway_demand_threshold: float = math.inf

    def __post_init__(self):
        # normalise containers so equality and hashing are structural
        object.__setattr__(self, "candidate_locations", tuple(self.candidate_locations))
        object.__setattr__(self, "clients", tuple(self.clients))
        object.__setattr__(self, "daylight_slots", frozenset(self.daylight_slots))
        self._validate()

    def _validate(self):
        def fail(name, msg):
            raise ValidationError(f"{name}: {msg}", field=name)

        if not self.field_width > 0:
            fail("field_width", f"must be positive, got {self.field_width}")
        if not self.field_height > 0:
            fail("field_height", f"must be positive, got {self.field_height}")
        if self.grid_rows < 1 or self.grid_cols < 1:
            fail("grid_rows", f"grid must be at least 1x1, got {self.grid_rows}x{self.grid_cols}")
        if self.grid_rows * self.grid_cols != len(self.candidate_locations):
            fail(
                "candidate_locations",
                f"expected {self.grid_rows * self.grid_cols} locations, got {len(self.candidate_locations)}",
            )
        for k, loc in enumerate(self.candidate_locations):
            if loc.index != k:
                fail("candidate_locations", f"index {loc.index} at position {k}; indices must be 0..n-1")
            if not self._inside(loc.position):
                fail("candidate_locations", f"location {k} at {loc.position} is outside the field")
        if len(self.clients) < 1:
            fail("clients", "at least one client is required")
        if self.num_slots < 1:
            fail("num_slots", f"must be >= 1, got {self.num_slots}")
        for k, c in enumerate(self.clients):
            if c.id != k:
                fail("clients", f"client id {c.id} at position {k}; ids must be 0..n-1")
            if not self._inside(c.position):
                fail("clients", f"client {k} at {c.position} is outside the field")
            if len(c.demand) != self.num_slots:
                fail("clients", f"client {k} demand has length {len(c.demand)}, expected {self.num_slots}")
            if any(not d >= 0 for d in c.demand):
                fail("clients", f"client {k} has negative demand")
        if not 0 <= self.failure_threshold <= 1:
            fail("failure_threshold", f"must lie in [0, 1], got {self.failure_threshold}")
        if not self.coverage_radius > 0:
            fail("coverage_radius", f"must be positive, got {self.coverage_radius}")
        bad = [s for s in self.daylight_slots if not 0 <= s < self.num_slots]
        if bad:
            fail("daylight_slots", f"slots {sorted(bad)} outside 0..{self.num_slots - 1}")
        if not self.gateway_demand_threshold >= 0:
            fail("gateway_demand_threshold", "must be non-negative")

    def _inside(self, pos) -> bool:
        x, y = pos
        return 0 <= x <= self.field_width and 0 <= y <= self.field_height

    @property
    def num_candidates(self) -> int:
        return len(self.candidate_locations)

    @property
    def num_clients(self) -> int:
        return len(self.clients)

    @cached_property
    def candidate_xy(self) -> np.ndarray:
        return np.array([loc.position for loc in self.candidate_locations], dtype=float)

    @cached_property
    def client_xy(self) -> np.ndarray:
        return np.array([c.position for c in self.clients], dtype=float)

    @cached_property
    def distances(self) -> np.ndarray:
        """Client-by-candidate Euclidean distance matrix."""
        diff = self.client_xy[:, None, :] - self.candidate_xy[None, :, :]
        return np.hypot(diff[..., 0], diff[..., 1])

    @cached_property
    def in_range(self) -> np.ndarray:
        return self.distances <= self.coverage_radius

    @cached_property
    def demand(self) -> np.ndarray:
        """Slot-by-client demand matrix."""
        return np.array([c.demand for c in self.clients], dtype=float).T.copy()

    @cached_property
    def daylight_mask(self) -> np.ndarray:
        mask = np.zeros(self.num_slots, dtype=bool)
        mask[sorted(self.daylight_slots)] = True
        return mask

    def with_updates(self, **changes) -> "Scenario":
        """Copy with some fields replaced (and revalidated)."""
        data = {name: getattr(self, name) for name in self.__dataclass_fields__}
        data.update(changes)
        return Scenario(**data)


@dataclass(frozen=True)
class GeneratorConfig:
    field_width: float = 1000.0
    field_height: float = 1000.0
    grid_rows: int = 6
    grid_cols: int = 6
    num_clients: int = 100
    num_slots: int = 24
    daylight_slots: Sequence[int] | None = None
    demand_high: float = 1.0
    demand_low_fraction: float = 0.2
    coverage_radius: float | None = None
    failure_threshold: float = DEFAULT_FAILURE_THRESHOLD
    gateway_demand_threshold: float | None = None
    gateway_percentile: float = 80.0


def default_daylight_slots(num_slots: int) -> frozenset[int]:
    """Slots 7-18 of a 24-slot day (0-based 6..17), scaled to other day lengths."""
    lo = round(num_slots * 6 / 24)
    hi = round(num_slots * 18 / 24)
    return frozenset(range(lo, hi))


def grid_centers(width: float, height: float, rows: int, cols: int) -> list[tuple[float, float]]:
    """Cell centers in row-major order, row 0 at the bottom (small y)."""
    dx, dy = width / cols, height / rows
    return [((c + 0.5) * dx, (r + 0.5) * dy) for r in range(rows) for c in range(cols)]


def generate_scenario(config: GeneratorConfig, seed: int) -> Scenario:
    """Build a scenario with clients scattered uniformly over the field."""
    for name in ("field_width", "field_height", "grid_rows", "grid_cols", "num_clients", "num_slots"):
        value = getattr(config, name)
        if not value > 0:
            raise ConfigurationError(f"{name} must be positive, got {value}")
    if config.demand_high < 0 or config.demand_low_fraction < 0:
        raise ConfigurationError("demand values must be non-negative")
    if config.coverage_radius is not None and not config.coverage_radius > 0:
        raise ConfigurationError(f"coverage_radius must be positive, got {config.coverage_radius}")

    w, h = float(config.field_width), float(config.field_height)
    rows, cols = config.grid_rows, config.grid_cols
    candidates = tuple(
        CandidateLocation(k, pos) for k, pos in enumerate(grid_centers(w, h, rows, cols))
    )

    rng = np.random.default_rng(seed)
    xy = rng.random((config.num_clients, 2)) * np.array([w, h])

    if config.daylight_slots is None:
        daylight = default_daylight_slots(config.num_slots)
    else:
        daylight = frozenset(int(s) for s in config.daylight_slots)
    low = config.demand_high * config.demand_low_fraction
    profile = tuple(
        float(config.demand_high) if l in daylight else float(low) for l in range(config.num_slots)
    )
    clients = tuple(
        Client(i, (float(x), float(y)), profile) for i, (x, y) in enumerate(xy)
    )

    radius = config.coverage_radius
    if radius is None:
        radius = math.hypot(w / cols, h / rows)

    scenario = Scenario(
        field_width=w,
        field_height=h,
        grid_rows=rows,
        grid_cols=cols,
        candidate_locations=candidates,
        clients=clients,
        num_slots=config.num_slots,
        daylight_slots=daylight,
        coverage_radius=float(radius),
        failure_threshold=config.failure_threshold,
    )
    threshold = config.gateway_demand_threshold
    if threshold is None:
        threshold = reference_gateway_threshold(scenario, config.gateway_percentile)
    return scenario.with_updates(gateway_demand_threshold=float(threshold))


def reference_gateway_threshold(scenario: Scenario, percentile: float = 80.0) -> float:
    """Percentile of per-node peak served demand with every candidate placed.

    Every client is served by its nearest in-range candidate (lowest index on
    ties) and all nodes are assumed powered.
    """
    dist = np.where(scenario.in_range, scenario.distances, np.inf)
    nearest = np.argmin(dist, axis=1)
    covered = np.isfinite(dist[np.arange(scenario.num_clients), nearest])
    served = np.zeros((scenario.num_slots, scenario.num_candidates))
    for l in range(scenario.num_slots):
        np.add.at(served[l], nearest[covered], scenario.demand[l, covered])
    peaks = served.max(axis=0)
    return float(np.percentile(peaks, percentile))


def clients_in_range(scenario: Scenario, j: int) -> set[int]:
    if not 0 <= j < scenario.num_candidates:
        raise IndexError(f"candidate index {j} out of range 0..{scenario.num_candidates - 1}")
    return {int(i) for i in np.flatnonzero(scenario.in_range[:, j])}


# --- file format -----------------------------------------------------------

def scenario_to_dict(scenario: Scenario) -> dict:
    return {
        "field_width": scenario.field_width,
        "field_height": scenario.field_height,
        "grid_rows": scenario.grid_rows,
        "grid_cols": scenario.grid_cols,
        "candidate_locations": [
            {"index": loc.index, "position": list(loc.position)} for loc in scenario.candidate_locations
        ],
        "clients": [
            {"id": c.id, "position": list(c.position), "demand": list(c.demand)} for c in scenario.clients
        ],
        "num_slots": scenario.num_slots,
        "daylight_slots": sorted(scenario.daylight_slots),
        "coverage_radius": scenario.coverage_radius,
        "failure_threshold": scenario.failure_threshold,
        "gateway_demand_threshold": (
            None if math.isinf(scenario.gateway_demand_threshold) else scenario.gateway_demand_threshold
        ),
    }


def _require(data: dict, key: str, where: str = "scenario"):
    if key not in data:
        raise ScenarioFormatError(f"{where}: missing field '{key}'")
    return data[key]


def _point(value, where: str) -> tuple[float, float]:
    if not isinstance(value, list) or len(value) != 2:
        raise ScenarioFormatError(f"{where}: position must be an [x, y] array")
    try:
        return (float(value[0]), float(value[1]))
    except (TypeError, ValueError) as exc:
        raise ScenarioFormatError(f"{where}: position must be numeric") from exc


def scenario_from_dict(data: dict) -> Scenario:
    if not isinstance(data, dict):
        raise ScenarioFormatError("scenario: top level must be a JSON object")
    try:
        candidates = tuple(
            CandidateLocation(
                int(_require(loc, "index", f"candidate_locations[{k}]")),
                _point(_require(loc, "position", f"candidate_locations[{k}]"), f"candidate_locations[{k}]"),
            )
            for k, loc in enumerate(_require(data, "candidate_locations"))
        )
        clients = tuple(
            Client(
                int(_require(c, "id", f"clients[{k}]")),
                _point(_require(c, "position", f"clients[{k}]"), f"clients[{k}]"),
                tuple(float(d) for d in _require(c, "demand", f"clients[{k}]")),
            )
            for k, c in enumerate(_require(data, "clients"))
        )
        gateway = data.get("gateway_demand_threshold")
        return Scenario(
            field_width=float(_require(data, "field_width")),
            field_height=float(_require(data, "field_height")),
            grid_rows=int(_require(data, "grid_rows")),
            grid_cols=int(_require(data, "grid_cols")),
            candidate_locations=candidates,
            clients=clients,
            num_slots=int(_require(data, "num_slots")),
            daylight_slots=frozenset(int(s) for s in _require(data, "daylight_slots")),
            coverage_radius=float(_require(data, "coverage_radius")),
            failure_threshold=float(data.get("failure_threshold", DEFAULT_FAILURE_THRESHOLD)),
            gateway_demand_threshold=math.inf if gateway is None else float(gateway),
        )
    except (TypeError, AttributeError) as exc:
        raise ScenarioFormatError(f"scenario: malformed structure ({exc})") from exc


def save_scenario(scenario: Scenario, path) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(scenario), indent=1) + "\n", encoding="utf-8")


def load_scenario(path) -> Scenario:
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioFormatError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return scenario_from_dict(data)
