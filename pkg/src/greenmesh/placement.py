"""Placement: which candidate locations host a node, and which act as gateways."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from greenmesh.errors import ValidationError


@dataclass(frozen=True)
class Placement:
    placed: tuple[bool, ...]
    gateway_flags: tuple[bool, ...] | None = None

    def __post_init__(self):
        placed = tuple(bool(p) for p in self.placed)
        object.__setattr__(self, "placed", placed)
        flags = self.gateway_flags
        flags = (False,) * len(placed) if flags is None else tuple(bool(g) for g in flags)
        if len(flags) != len(placed):
            raise ValidationError("gateway_flags and placed differ in length", field="gateway_flags")
        if any(g and not p for g, p in zip(flags, placed)):
            raise ValidationError("gateway flag set on an unplaced location", field="gateway_flags")
        object.__setattr__(self, "gateway_flags", flags)

    @classmethod
    def from_indices(cls, size: int, indices: Iterable[int]) -> "Placement":
        chosen = set(indices)
        bad = [j for j in chosen if not 0 <= j < size]
        if bad:
            raise IndexError(f"indices {sorted(bad)} out of range for {size} candidates")
        return cls(tuple(j in chosen for j in range(size)))

    @classmethod
    def empty(cls, size: int) -> "Placement":
        return cls((False,) * size)

    @classmethod
    def full(cls, size: int) -> "Placement":
        return cls((True,) * size)

    @property
    def size(self) -> int:
        return len(self.placed)

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(j for j, p in enumerate(self.placed) if p)

    @property
    def node_count(self) -> int:
        return sum(self.placed)

    @property
    def gateway_indices(self) -> tuple[int, ...]:
        return tuple(j for j, g in enumerate(self.gateway_flags) if g)

    def without_gateways(self) -> "Placement":
        return Placement(self.placed)

    def __str__(self):
        return "{" + ",".join(map(str, self.indices)) + "}"
