"""Base-station power demand synthesis and billing-anchored calibration.

Three archetypes: resident (evening peak, weekends stay high), office
(weekday daytime peak, depressed weekends), comprehensive (high through
day and evening, valley in the early morning). Hourly shape weights are
hand-authored; an affine calibration pins each trace's mean and peak to
targets back-solved from reference monthly energy/demand charges, so the
grid-only bill of a calibrated trace is known in advance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import BS_TYPES, ScenarioError, TimeGrid, Trace, require_positive

# Hour-of-day weights in [0, 1]; the overall max across both shapes is 1
# so peak_kw is actually reached.
_RESIDENT_WEEKDAY = (0.0, 0.0, 0.0, 0.0, 0.0, 0.05, 0.15, 0.25, 0.3, 0.3, 0.3, 0.35,
                     0.4, 0.35, 0.3, 0.3, 0.4, 0.6, 0.8, 0.95, 1.0, 0.95, 0.7, 0.3)
_RESIDENT_WEEKEND = (0.05, 0.0, 0.0, 0.0, 0.0, 0.05, 0.15, 0.3, 0.5, 0.65, 0.75, 0.8,
                     0.8, 0.75, 0.7, 0.7, 0.75, 0.8, 0.9, 1.0, 1.0, 0.9, 0.7, 0.35)
_OFFICE_WEEKDAY = (0.0, 0.0, 0.0, 0.0, 0.0, 0.05, 0.2, 0.5, 0.8, 0.95, 1.0, 1.0,
                   0.9, 0.95, 1.0, 0.95, 0.9, 0.7, 0.4, 0.2, 0.1, 0.05, 0.0, 0.0)
_OFFICE_WEEKEND = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.05, 0.1, 0.2, 0.25, 0.3, 0.3,
                   0.25, 0.25, 0.25, 0.2, 0.15, 0.1, 0.05, 0.05, 0.0, 0.0, 0.0, 0.0)
_COMPREHENSIVE_WEEKDAY = (0.1, 0.05, 0.0, 0.0, 0.0, 0.1, 0.25, 0.5, 0.7, 0.8, 0.85, 0.9,
                          0.9, 0.85, 0.85, 0.85, 0.9, 0.95, 1.0, 1.0, 0.95, 0.8, 0.5, 0.25)
_COMPREHENSIVE_WEEKEND = (0.1, 0.05, 0.0, 0.0, 0.0, 0.05, 0.2, 0.4, 0.6, 0.7, 0.8, 0.85,
                          0.85, 0.8, 0.8, 0.8, 0.85, 0.9, 1.0, 1.0, 0.95, 0.8, 0.55, 0.3)

DEFAULT_NOISE_FRAC = 0.02  # bounded noise amplitude as a fraction of peak_kw

# Reference monthly (energy USD, demand USD) bills used to anchor demand
# calibration; with the default tariff these back-solve to the mean/peak
# kW targets each archetype is scaled to.
BILL_ANCHORS_USD = {
    "resident": (44.6, 23.1),
    "office": (40.1, 20.2),
    "comprehensive": (45.6, 22.8),
}


@dataclass(frozen=True)
class DemandProfile:
    """Weekly demand shape for one base-station archetype."""

    bs_type: str
    base_kw: float
    peak_kw: float
    weekday_shape: tuple[float, ...]
    weekend_shape: tuple[float, ...]

    def __post_init__(self):
        if self.bs_type not in BS_TYPES:
            raise ScenarioError(f"unknown bs_type {self.bs_type!r}")
        require_positive("demand base_kw", self.base_kw)
        if self.peak_kw < self.base_kw:
            raise ScenarioError(
                f"peak_kw {self.peak_kw} must be >= base_kw {self.base_kw}")
        for name, shape in (("weekday", self.weekday_shape), ("weekend", self.weekend_shape)):
            if len(shape) != 24:
                raise ScenarioError(f"{name}_shape must have 24 entries")
            if min(shape) < 0 or max(shape) > 1:
                raise ScenarioError(f"{name}_shape weights must lie in [0, 1]")
        if max(max(self.weekday_shape), max(self.weekend_shape)) != 1.0:
            raise ScenarioError("max shape weight across the week must be exactly 1")


DEFAULT_PROFILES = {
    "resident": DemandProfile("resident", 0.55, 1.45, _RESIDENT_WEEKDAY, _RESIDENT_WEEKEND),
    "office": DemandProfile("office", 0.5, 1.3, _OFFICE_WEEKDAY, _OFFICE_WEEKEND),
    "comprehensive": DemandProfile("comprehensive", 0.6, 1.42,
                                   _COMPREHENSIVE_WEEKDAY, _COMPREHENSIVE_WEEKEND),
}


def synth_demand(profile: DemandProfile, grid: TimeGrid, seed: int,
                 noise_frac: float = DEFAULT_NOISE_FRAC) -> Trace:
    """d(t) = base + (peak-base)*shape(hour, daytype) + bounded noise.

    Days 0-4 of each week are weekdays, 5-6 weekend. Noise is uniform in
    +/- noise_frac*peak; the result is clamped to [0, peak]. Deterministic
    for a fixed seed.
    """
    hours_per_day = 24.0 / grid.slot_hours
    if abs(hours_per_day - round(hours_per_day)) > 1e-9 or grid.duration_hours % 24.0 != 0:
        raise ScenarioError("demand synthesis requires a grid covering whole days")
    rng = np.random.default_rng([seed, 0x0D])
    values = np.empty(grid.slot_count)
    for t in range(grid.slot_count):
        day = grid.day_index(t)
        hour = int(grid.hour_of_day(t)) % 24
        shape = profile.weekend_shape if day % 7 >= 5 else profile.weekday_shape
        d = profile.base_kw + (profile.peak_kw - profile.base_kw) * shape[hour]
        if noise_frac > 0:
            d += rng.uniform(-noise_frac, noise_frac) * profile.peak_kw
        values[t] = min(max(d, 0.0), profile.peak_kw)
    return Trace(grid=grid, values=values, kind="demand")


def calibrate_demand(trace: Trace, target_mean_kw: float, target_peak_kw: float) -> Trace:
    """Affine-rescale a trace so its mean and max hit the given targets.

    Raises if the trace is constant, targets are inconsistent, or the
    required affine map would push any slot negative.
    """
    require_positive("target_mean_kw", target_mean_kw)
    require_positive("target_peak_kw", target_peak_kw)
    if target_peak_kw < target_mean_kw:
        raise ScenarioError(
            f"target peak {target_peak_kw} must be >= target mean {target_mean_kw}")
    x = trace.values
    mean_x, max_x = float(np.mean(x)), float(np.max(x))
    if max_x - mean_x < 1e-12:
        raise ScenarioError("cannot calibrate a constant demand trace")
    scale = (target_peak_kw - target_mean_kw) / (max_x - mean_x)
    offset = target_mean_kw - scale * mean_x
    values = scale * x + offset
    if np.any(values < 0):
        raise ScenarioError(
            f"calibration to mean {target_mean_kw}, peak {target_peak_kw} kW "
            "would produce negative demand")
    return Trace(grid=trace.grid, values=values, kind="demand")


ANCHOR_CYCLE_HOURS = 720.0  # the anchor bills are for one 30-day cycle


def calibration_targets(bs_type: str, energy_price: float,
                        demand_price: float) -> tuple[float, float]:
    """(mean_kw, peak_kw) targets back-solved from the archetype's anchor
    bill: mean = energy_bill / (price * cycle hours), peak = demand_bill /
    price. The implied kW levels apply to scenarios of any length."""
    energy_usd, demand_usd = BILL_ANCHORS_USD[bs_type]
    return energy_usd / (energy_price * ANCHOR_CYCLE_HOURS), demand_usd / demand_price


def calibrated_demand(bs_type: str, grid: TimeGrid, seed: int,
                      energy_price: float, demand_price: float,
                      noise_frac: float = DEFAULT_NOISE_FRAC) -> Trace:
    """Synthesize the archetype's trace and calibrate it to its anchor bill."""
    raw = synth_demand(DEFAULT_PROFILES[bs_type], grid, seed, noise_frac=noise_frac)
    mean_kw, peak_kw = calibration_targets(bs_type, energy_price, demand_price)
    return calibrate_demand(raw, mean_kw, peak_kw)
