"""Weather synthesis and solar/wind power conversion.

Weather is synthesized per day from a (solar_class, wind_class) label:
clear days follow a half-sine irradiance profile peaking at solar noon,
partial-cloudy days multiply it by random dips in [0.3, 1], cloudy days
scale it by 0.3. Wind speed is a class mean (10/7/4 m/s) plus bounded
noise. The PV and wind turbine models are parametric surrogates, kept
simple enough to verify by hand; replace the synthesized traces with
measured CSV data for higher fidelity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (SOLAR_CLASSES, WIND_CLASSES, ScenarioError, TimeGrid, Trace,
                   check_same_grid, require_positive)

# Daylight window for the half-sine irradiance profile (local clock hours).
SUNRISE_HOUR = 6.0
SUNSET_HOUR = 18.0
GHI_CLEAR_PEAK = 1000.0  # W/m^2
CLOUDY_SCALE = 0.3
PARTIAL_DIP_RANGE = (0.3, 1.0)

WIND_CLASS_MEAN_MS = {"high": 10.0, "middle": 7.0, "low": 4.0}
WIND_NOISE_MS = 0.5  # uniform +/- bound


@dataclass(frozen=True)
class PvConfig:
    """Solar PV array parameters."""

    rating_kw: float = 4.95
    ghi_stc: float = 1000.0        # reference irradiance, W/m^2
    temp_coeff: float = -0.004     # output derating per degC of cell temp above 25
    cell_temp_gain: float = 0.03   # cell heating, degC per W/m^2

    def validate(self) -> "PvConfig":
        require_positive("pv.rating_kw", self.rating_kw)
        require_positive("pv.ghi_stc", self.ghi_stc)
        if self.temp_coeff > 0:
            raise ScenarioError(f"pv.temp_coeff must be <= 0, got {self.temp_coeff}")
        return self


@dataclass(frozen=True)
class WindConfig:
    """Wind turbine parameters. Speeds are measured at ref_height_m and
    corrected to hub height with a power-law shear profile."""

    rating_kw: float = 6.0
    cut_in_ms: float = 3.0
    rated_ms: float = 12.0
    cut_out_ms: float = 25.0
    hub_height_m: float = 30.0
    ref_height_m: float = 10.0
    shear_exponent: float = 0.14

    def validate(self) -> "WindConfig":
        require_positive("wind.rating_kw", self.rating_kw)
        if not (0 < self.cut_in_ms < self.rated_ms < self.cut_out_ms):
            raise ScenarioError(
                f"wind speeds must satisfy 0 < cut_in < rated < cut_out, got "
                f"{self.cut_in_ms}/{self.rated_ms}/{self.cut_out_ms}"
            )
        require_positive("wind.hub_height_m", self.hub_height_m)
        require_positive("wind.ref_height_m", self.ref_height_m)
        return self

    @property
    def hub_correction(self) -> float:
        return (self.hub_height_m / self.ref_height_m) ** self.shear_exponent


@dataclass(frozen=True)
class WeatherDayClass:
    solar_class: str
    wind_class: str

    def __post_init__(self):
        if self.solar_class not in SOLAR_CLASSES:
            raise ScenarioError(f"unknown solar class {self.solar_class!r}")
        if self.wind_class not in WIND_CLASSES:
            raise ScenarioError(f"unknown wind class {self.wind_class!r}")


def _clear_sky_ghi(hour: float) -> float:
    """Half-sine irradiance between sunrise and sunset, W/m^2."""
    if hour <= SUNRISE_HOUR or hour >= SUNSET_HOUR:
        return 0.0
    span = SUNSET_HOUR - SUNRISE_HOUR
    return GHI_CLEAR_PEAK * float(np.sin(np.pi * (hour - SUNRISE_HOUR) / span))


def synth_weather_day(day_class: WeatherDayClass, day_index: int, seed: int,
                      slot_hours: float = 1.0) -> tuple[Trace, Trace, Trace]:
    """Deterministic one-day (ghi, temperature, wind_speed) traces.

    The same (class, day_index, seed) triple always yields bit-identical
    traces, so whole-cycle weather is reproducible from the scenario seed.
    """
    slots = int(round(24.0 / slot_hours))
    if abs(slots * slot_hours - 24.0) > 1e-9:
        raise ScenarioError(f"slot_hours {slot_hours} does not divide a 24 h day")
    grid = TimeGrid(slot_hours=slot_hours, slot_count=slots)
    rng = np.random.default_rng([seed, day_index])

    hours = np.arange(slots) * slot_hours
    ghi = np.array([_clear_sky_ghi(h) for h in hours])
    if day_class.solar_class == "partial_cloudy":
        dips = rng.uniform(*PARTIAL_DIP_RANGE, size=slots)
        ghi = ghi * dips
    elif day_class.solar_class == "cloudy":
        ghi = ghi * CLOUDY_SCALE

    # Mild diurnal temperature swing, coolest ~02:00, warmest ~14:00.
    temp = 22.0 - 6.0 * np.cos(2.0 * np.pi * (hours - 14.0) / 24.0)

    mean = WIND_CLASS_MEAN_MS[day_class.wind_class]
    wind = mean + rng.uniform(-WIND_NOISE_MS, WIND_NOISE_MS, size=slots)
    wind = np.maximum(wind, 0.0)

    return (
        Trace(grid=grid, values=ghi, kind="ghi"),
        Trace(grid=grid, values=temp, kind="temperature"),
        Trace(grid=grid, values=wind, kind="wind_speed"),
    )


def pv_output(ghi: float, temp: float, cfg: PvConfig) -> float:
    """PV power (kW) at one slot.

    Output scales linearly with irradiance and derates with cell
    temperature above 25 degC (cell temp = ambient + gain * ghi),
    clamped to [0, rating].
    """
    if ghi < 0:
        raise ValueError(f"ghi must be nonnegative, got {ghi}")
    cell_temp = temp + cfg.cell_temp_gain * ghi
    raw = cfg.rating_kw * (ghi / cfg.ghi_stc) * (1.0 + cfg.temp_coeff * (cell_temp - 25.0))
    return min(max(raw, 0.0), cfg.rating_kw)


def wind_output(wind_speed: float, cfg: WindConfig) -> float:
    """Wind turbine power (kW) for a speed measured at reference height.

    Piecewise curve on the hub-height speed: zero below cut-in and above
    cut-out, rated at and above the rated speed, cubic in between.
    """
    if wind_speed < 0:
        raise ValueError(f"wind_speed must be nonnegative, got {wind_speed}")
    v = wind_speed * cfg.hub_correction
    if v < cfg.cut_in_ms or v > cfg.cut_out_ms:
        return 0.0
    if v >= cfg.rated_ms:
        return cfg.rating_kw
    ci3 = cfg.cut_in_ms ** 3
    return cfg.rating_kw * (v ** 3 - ci3) / (cfg.rated_ms ** 3 - ci3)


def generation_trace(ghi: Trace, temp: Trace, wind_speed: Trace,
                     pv: PvConfig, wt: WindConfig) -> tuple[Trace, Trace, Trace]:
    """Elementwise (g_solar, g_wind, g_total) from weather traces."""
    grid = check_same_grid([ghi, temp, wind_speed])
    g_s = np.array([pv_output(g, t, pv) for g, t in zip(ghi.values, temp.values)])
    g_w = np.array([wind_output(v, wt) for v in wind_speed.values])
    return (
        Trace(grid=grid, values=g_s, kind="generation"),
        Trace(grid=grid, values=g_w, kind="generation"),
        Trace(grid=grid, values=g_s + g_w, kind="generation"),
    )


def concat_day_traces(day_traces: list[tuple[Trace, Trace, Trace]]) -> tuple[Trace, Trace, Trace]:
    """Stitch per-day (ghi, temp, wind) traces into whole-cycle traces."""
    slot_hours = day_traces[0][0].grid.slot_hours
    total = sum(t[0].grid.slot_count for t in day_traces)
    grid = TimeGrid(slot_hours=slot_hours, slot_count=total)
    ghi = np.concatenate([t[0].values for t in day_traces])
    temp = np.concatenate([t[1].values for t in day_traces])
    wind = np.concatenate([t[2].values for t in day_traces])
    return (
        Trace(grid=grid, values=ghi, kind="ghi"),
        Trace(grid=grid, values=temp, kind="temperature"),
        Trace(grid=grid, values=wind, kind="wind_speed"),
    )
