"""Time discretization and per-slot trace containers.

Conventions used throughout the package: power in kW, energy in kWh,
money in USD, time in hours. A billing cycle is a uniform grid of T
slots of length ``slot_hours`` (default 720 one-hour slots = 30 days).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

TRACE_KINDS = ("demand", "ghi", "temperature", "wind_speed", "generation", "grid_power")
# Kinds that must be nonnegative elementwise.
NONNEGATIVE_KINDS = frozenset({"demand", "generation", "grid_power", "ghi", "wind_speed"})

SOLAR_CLASSES = ("clear", "partial_cloudy", "cloudy")
WIND_CLASSES = ("high", "middle", "low")
BS_TYPES = ("resident", "office", "comprehensive")


class ScenarioError(ValueError):
    """A scenario, trace, or config component failed validation."""


@dataclass(frozen=True)
class TimeGrid:
    """Uniform slot grid covering one billing cycle."""

    slot_hours: float = 1.0
    slot_count: int = 720
    cycle_start: str = "2020-06-01T00:00"  # informational only

    def __post_init__(self):
        if self.slot_hours <= 0:
            raise ScenarioError(f"slot_hours must be positive, got {self.slot_hours}")
        if self.slot_count < 1:
            raise ScenarioError(f"slot_count must be >= 1, got {self.slot_count}")

    @property
    def duration_hours(self) -> float:
        return self.slot_hours * self.slot_count

    def hour_of_day(self, slot: int) -> float:
        """Clock hour in [0, 24) at the start of a slot."""
        return (slot * self.slot_hours) % 24.0

    def day_index(self, slot: int) -> int:
        return int(slot * self.slot_hours // 24.0)


@dataclass(frozen=True)
class Trace:
    """A per-slot series tied to a grid. Values are read-only after construction."""

    grid: TimeGrid
    values: np.ndarray
    kind: str

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 1:
            raise ScenarioError(f"trace values must be 1-D, got shape {arr.shape}")
        if len(arr) != self.grid.slot_count:
            raise ScenarioError(
                f"trace length {len(arr)} does not match grid slot_count {self.grid.slot_count}"
            )
        if not np.all(np.isfinite(arr)):
            raise ScenarioError(f"{self.kind} trace contains non-finite values")
        if self.kind not in TRACE_KINDS:
            raise ScenarioError(f"unknown trace kind {self.kind!r}")
        if self.kind in NONNEGATIVE_KINDS and np.any(arr < 0):
            raise ScenarioError(f"{self.kind} trace must be nonnegative elementwise")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return self.grid.slot_count

    def to_csv(self, path: str | Path) -> None:
        """Write ``slot,value`` rows. Floats are written with full precision
        so that import returns bit-identical values."""
        lines = ["slot,value"]
        lines += [f"{i},{repr(float(v))}" for i, v in enumerate(self.values)]
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def from_csv(cls, path: str | Path, kind: str, slot_hours: float = 1.0,
                 grid: TimeGrid | None = None) -> "Trace":
        text = Path(path).read_text().strip().splitlines()
        if not text or text[0].strip() != "slot,value":
            raise ScenarioError(f"{path}: expected header 'slot,value'")
        values = []
        for i, line in enumerate(text[1:]):
            slot_s, value_s = line.split(",")
            if int(slot_s) != i:
                raise ScenarioError(f"{path}: slot indices must run 0..T-1, got {slot_s} at row {i}")
            values.append(float(value_s))
        if grid is None:
            grid = TimeGrid(slot_hours=slot_hours, slot_count=len(values))
        return cls(grid=grid, values=np.array(values), kind=kind)


def check_same_grid(traces: Iterable[Trace]) -> TimeGrid:
    grids = {(t.grid.slot_hours, t.grid.slot_count) for t in traces}
    if len(grids) != 1:
        raise ScenarioError(f"traces use mismatched grids: {sorted(grids)}")
    for t in traces:
        return t.grid
    raise ScenarioError("no traces given")


def require_positive(name: str, value: float) -> None:
    if not value > 0:
        raise ScenarioError(f"{name} must be positive, got {value}")
