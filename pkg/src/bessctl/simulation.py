"""Scenario configuration, validation, and materialization into traces.

A ScenarioConfig is the user-facing description (archetype, per-day
weather calendar, tariff, equipment); ``build_simulation`` turns it into
a Simulation holding the concrete per-slot traces everything downstream
consumes. Scenario files are JSON; traces can be overridden with CSV
files in the core ``slot,value`` format to substitute measured data.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .battery import BatteryConfig
from .billing import EquipmentConfig, Tariff
from .core import BS_TYPES, ScenarioError, TimeGrid, Trace
from .demand import DEFAULT_NOISE_FRAC, calibrated_demand
from .renewables import (PvConfig, WeatherDayClass, WindConfig, concat_day_traces,
                         generation_trace, synth_weather_day)

# Shipped 30-day calendars. Class counts per city: beijing is clear-heavy,
# shanghai is high-wind-heavy with fewer clear days, guangzhou leans
# cloudy/low-wind. Each includes a two-day cloudy & low-wind stretch, the
# hardest condition for the battery to ride through.
CITY_CALENDARS: dict[str, tuple[tuple[str, str], ...]] = {
    "beijing": (
        ("clear", "middle"), ("clear", "high"), ("clear", "low"), ("partial_cloudy", "high"),
        ("clear", "middle"), ("clear", "low"), ("partial_cloudy", "middle"), ("clear", "middle"),
        ("cloudy", "high"), ("clear", "low"), ("partial_cloudy", "high"), ("clear", "middle"),
        ("clear", "low"), ("partial_cloudy", "low"), ("clear", "middle"), ("cloudy", "middle"),
        ("cloudy", "low"), ("cloudy", "low"), ("clear", "middle"), ("partial_cloudy", "high"),
        ("clear", "low"), ("clear", "middle"), ("partial_cloudy", "middle"), ("clear", "high"),
        ("cloudy", "middle"), ("partial_cloudy", "low"), ("clear", "low"), ("partial_cloudy", "high"),
        ("cloudy", "high"), ("clear", "middle"),
    ),
    "shanghai": (
        ("clear", "high"), ("clear", "high"), ("partial_cloudy", "high"), ("partial_cloudy", "low"),
        ("cloudy", "middle"), ("partial_cloudy", "high"), ("clear", "high"), ("cloudy", "high"),
        ("partial_cloudy", "low"), ("cloudy", "middle"), ("partial_cloudy", "high"), ("clear", "high"),
        ("partial_cloudy", "high"), ("cloudy", "low"), ("cloudy", "low"), ("partial_cloudy", "low"),
        ("cloudy", "middle"), ("partial_cloudy", "high"), ("clear", "high"), ("cloudy", "middle"),
        ("partial_cloudy", "high"), ("clear", "high"), ("partial_cloudy", "low"), ("cloudy", "middle"),
        ("partial_cloudy", "high"), ("clear", "high"), ("cloudy", "high"), ("partial_cloudy", "high"),
        ("cloudy", "middle"), ("clear", "high"),
    ),
    "guangzhou": (
        ("partial_cloudy", "low"), ("cloudy", "middle"), ("clear", "middle"), ("cloudy", "high"),
        ("partial_cloudy", "low"), ("cloudy", "low"), ("cloudy", "low"), ("partial_cloudy", "middle"),
        ("clear", "low"), ("cloudy", "middle"), ("partial_cloudy", "high"), ("cloudy", "low"),
        ("partial_cloudy", "low"), ("clear", "middle"), ("cloudy", "high"), ("partial_cloudy", "low"),
        ("cloudy", "low"), ("cloudy", "low"), ("clear", "middle"), ("cloudy", "middle"),
        ("partial_cloudy", "high"), ("cloudy", "high"), ("partial_cloudy", "low"), ("clear", "low"),
        ("cloudy", "middle"), ("partial_cloudy", "middle"), ("cloudy", "low"), ("cloudy", "high"),
        ("partial_cloudy", "low"), ("clear", "middle"),
    ),
}

TRACE_OVERRIDE_KINDS = ("demand", "ghi", "temperature", "wind_speed")


@dataclass(frozen=True)
class ScenarioConfig:
    bs_type: str = "resident"
    weather_calendar: tuple[tuple[str, str], ...] = CITY_CALENDARS["shanghai"]
    tariff: Tariff = field(default_factory=Tariff)
    battery: BatteryConfig = field(default_factory=BatteryConfig)
    pv: PvConfig = field(default_factory=PvConfig)
    wind: WindConfig = field(default_factory=WindConfig)
    equipment: EquipmentConfig = field(default_factory=EquipmentConfig)
    rng_seed: int = 0
    slot_hours: float = 1.0
    slot_count: int | None = None  # derived from the calendar when omitted
    demand_noise_frac: float = DEFAULT_NOISE_FRAC
    city: str = ""  # informational label used in reports
    trace_overrides: dict[str, str] = field(default_factory=dict)


def validate_scenario(cfg: ScenarioConfig) -> ScenarioConfig:
    """Check every component invariant; returns cfg unchanged on success."""
    if cfg.bs_type not in BS_TYPES:
        raise ScenarioError(f"unknown bs_type {cfg.bs_type!r}, expected one of {BS_TYPES}")
    if not cfg.weather_calendar:
        raise ScenarioError("weather_calendar must contain at least one day")
    for day in cfg.weather_calendar:
        WeatherDayClass(*day)
    slots_per_day = 24.0 / cfg.slot_hours
    if abs(slots_per_day - round(slots_per_day)) > 1e-9:
        raise ScenarioError(f"slot_hours {cfg.slot_hours} must divide a 24 h day")
    derived = len(cfg.weather_calendar) * int(round(slots_per_day))
    if cfg.slot_count is not None and cfg.slot_count != derived:
        raise ScenarioError(
            f"dimension mismatch: calendar of {len(cfg.weather_calendar)} days covers "
            f"{derived} slots but slot_count is {cfg.slot_count}")
    cfg.tariff.validate()
    cfg.battery.validate()
    cfg.pv.validate()
    cfg.wind.validate()
    cfg.equipment.validate()
    if not (0 <= cfg.demand_noise_frac < 1):
        raise ScenarioError(f"demand_noise_frac must lie in [0, 1), got {cfg.demand_noise_frac}")
    for kind in cfg.trace_overrides:
        if kind not in TRACE_OVERRIDE_KINDS:
            raise ScenarioError(
                f"trace override kind {kind!r} not supported, expected {TRACE_OVERRIDE_KINDS}")
    return cfg


@dataclass(frozen=True)
class Simulation:
    """A fully materialized scenario: validated configs plus per-slot traces."""

    grid: TimeGrid
    demand: Trace
    pv_gen: Trace
    wind_gen: Trace
    generation: Trace
    ghi: Trace
    temperature: Trace
    wind_speed: Trace
    battery: BatteryConfig
    tariff: Tariff
    equipment: EquipmentConfig
    bs_type: str = "custom"
    city: str = ""
    rng_seed: int = 0
    calendar: tuple[tuple[str, str], ...] = ()

    @property
    def slot_count(self) -> int:
        return self.grid.slot_count

    @property
    def demand_max(self) -> float:
        return float(np.max(self.demand.values))

    @property
    def generation_max(self) -> float:
        m = float(np.max(self.generation.values))
        return m if m > 0 else 1.0


def build_simulation(cfg: ScenarioConfig, base_dir: str | Path | None = None) -> Simulation:
    """Synthesize (or load) all traces for a validated scenario.

    Deterministic: the same config yields bit-identical traces. Trace
    overrides are resolved relative to base_dir when given.
    """
    validate_scenario(cfg)
    slots_per_day = int(round(24.0 / cfg.slot_hours))
    grid = TimeGrid(slot_hours=cfg.slot_hours,
                    slot_count=len(cfg.weather_calendar) * slots_per_day)

    def override_path(kind):
        raw = cfg.trace_overrides.get(kind)
        if raw is None:
            return None
        path = Path(raw)
        if base_dir is not None and not path.is_absolute():
            path = Path(base_dir) / path
        return path

    day_traces = [
        synth_weather_day(WeatherDayClass(*day), i, cfg.rng_seed, cfg.slot_hours)
        for i, day in enumerate(cfg.weather_calendar)
    ]
    ghi, temp, wind = concat_day_traces(day_traces)
    for kind, current in (("ghi", ghi), ("temperature", temp), ("wind_speed", wind)):
        path = override_path(kind)
        if path is not None:
            loaded = Trace.from_csv(path, kind, grid=grid)
            if kind == "ghi":
                ghi = loaded
            elif kind == "temperature":
                temp = loaded
            else:
                wind = loaded

    pv_gen, wind_gen, gen = generation_trace(ghi, temp, wind, cfg.pv, cfg.wind)

    demand_path = override_path("demand")
    if demand_path is not None:
        dem = Trace.from_csv(demand_path, "demand", grid=grid)
    else:
        dem = calibrated_demand(cfg.bs_type, grid, cfg.rng_seed,
                                cfg.tariff.energy_price, cfg.tariff.demand_price,
                                noise_frac=cfg.demand_noise_frac)

    return Simulation(
        grid=grid, demand=dem, pv_gen=pv_gen, wind_gen=wind_gen, generation=gen,
        ghi=ghi, temperature=temp, wind_speed=wind,
        battery=cfg.battery, tariff=cfg.tariff, equipment=cfg.equipment,
        bs_type=cfg.bs_type, city=cfg.city, rng_seed=cfg.rng_seed,
        calendar=tuple(tuple(day) for day in cfg.weather_calendar),
    )


def simulation_from_traces(demand: Trace, pv_gen: Trace, wind_gen: Trace,
                           battery: BatteryConfig, tariff: Tariff,
                           equipment: EquipmentConfig | None = None,
                           **meta) -> Simulation:
    """Assemble a Simulation from explicit traces (for synthetic instances
    and tests). Weather traces are filled with zeros."""
    grid = demand.grid
    zeros = np.zeros(grid.slot_count)
    gen = Trace(grid=grid, values=pv_gen.values + wind_gen.values, kind="generation")
    return Simulation(
        grid=grid, demand=demand, pv_gen=pv_gen, wind_gen=wind_gen, generation=gen,
        ghi=Trace(grid=grid, values=zeros, kind="ghi"),
        temperature=Trace(grid=grid, values=zeros, kind="temperature"),
        wind_speed=Trace(grid=grid, values=zeros, kind="wind_speed"),
        battery=battery, tariff=tariff,
        equipment=equipment if equipment is not None else EquipmentConfig(),
        **meta,
    )


# ---------------------------------------------------------------------------
# Scenario file I/O (JSON). The schema mirrors the dataclass fields; see
# README for the documented layout.


def scenario_to_dict(cfg: ScenarioConfig) -> dict:
    data = asdict(cfg)
    data["weather_calendar"] = [list(day) for day in cfg.weather_calendar]
    data["battery"]["cycle_table"] = [list(row) for row in cfg.battery.cycle_table]
    return data


def scenario_from_dict(data: dict) -> ScenarioConfig:
    data = dict(data)
    try:
        calendar = tuple(tuple(day) for day in data.pop("weather_calendar"))
        battery_d = dict(data.pop("battery", {}))
        if "cycle_table" in battery_d:
            battery_d["cycle_table"] = tuple(tuple(row) for row in battery_d["cycle_table"])
        cfg = ScenarioConfig(
            weather_calendar=calendar,
            tariff=Tariff(**data.pop("tariff", {})),
            battery=BatteryConfig(**battery_d),
            pv=PvConfig(**data.pop("pv", {})),
            wind=WindConfig(**data.pop("wind", {})),
            equipment=EquipmentConfig(**data.pop("equipment", {})),
            **data,
        )
    except TypeError as exc:
        raise ScenarioError(f"malformed scenario file: {exc}") from exc
    return validate_scenario(cfg)


def save_scenario(cfg: ScenarioConfig, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(scenario_to_dict(cfg), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_scenario(path: str | Path) -> ScenarioConfig:
    with open(path) as fh:
        return scenario_from_dict(json.load(fh))


def city_scenario(bs_type: str, city: str, seed: int = 0, **overrides) -> ScenarioConfig:
    """Scenario for one of the shipped city calendars."""
    if city not in CITY_CALENDARS:
        raise ScenarioError(f"unknown city {city!r}, expected one of {sorted(CITY_CALENDARS)}")
    return ScenarioConfig(bs_type=bs_type, weather_calendar=CITY_CALENDARS[city],
                          rng_seed=seed, city=city, **overrides)


def single_day_scenario(bs_type: str, solar_class: str, wind_class: str,
                        seed: int = 0, **overrides) -> ScenarioConfig:
    """One-day scenario for a single weather class (24 slots at 1 h)."""
    return ScenarioConfig(bs_type=bs_type, weather_calendar=((solar_class, wind_class),),
                          rng_seed=seed, city=f"{solar_class}-{wind_class}", **overrides)
