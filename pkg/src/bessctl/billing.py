"""Per-slot cost accounting: energy charge, incremental demand charge,
generator usage cost, battery degradation cost, and ROI.

The demand charge is billed incrementally: each slot pays
demand_price * max(0, p - p_max) and the running peak p_max is updated,
which telescopes to demand_price * (cycle peak) when p_max starts at 0.
Generator usage amortizes the purchase price linearly over the lifetime
for every slot the generator produces. Battery degradation converts SoE
loss into money against the battery's full replacement value.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .battery import BatteryConfig
from .core import ScenarioError, require_positive

HOURS_PER_YEAR = 8760.0


@dataclass(frozen=True)
class Tariff:
    energy_price: float = 0.049   # USD/kWh
    demand_price: float = 16.08   # USD/kW of cycle peak

    def validate(self) -> "Tariff":
        require_positive("tariff.energy_price", self.energy_price)
        require_positive("tariff.demand_price", self.demand_price)
        return self


@dataclass(frozen=True)
class EquipmentConfig:
    """Purchase prices and service lifetimes of the generators."""

    pv_price: float = 3950.0
    pv_lifetime_hours: float = 25 * HOURS_PER_YEAR
    wind_price: float = 4500.0
    wind_lifetime_hours: float = 20 * HOURS_PER_YEAR

    def validate(self) -> "EquipmentConfig":
        require_positive("equipment.pv_price", self.pv_price)
        require_positive("equipment.pv_lifetime_hours", self.pv_lifetime_hours)
        require_positive("equipment.wind_price", self.wind_price)
        require_positive("equipment.wind_lifetime_hours", self.wind_lifetime_hours)
        return self


@dataclass
class EquipmentBook:
    """Mutable remaining-lifetime ledger for one rollout."""

    config: EquipmentConfig = field(default_factory=EquipmentConfig)
    pv_remaining_hours: float = -1.0
    wind_remaining_hours: float = -1.0

    def __post_init__(self):
        if self.pv_remaining_hours < 0:
            self.pv_remaining_hours = self.config.pv_lifetime_hours
        if self.wind_remaining_hours < 0:
            self.wind_remaining_hours = self.config.wind_lifetime_hours
        if self.pv_remaining_hours > self.config.pv_lifetime_hours:
            raise ScenarioError("pv_remaining_hours exceeds the PV lifetime")
        if self.wind_remaining_hours > self.config.wind_lifetime_hours:
            raise ScenarioError("wind_remaining_hours exceeds the wind lifetime")


def energy_charge(p_kw: float, dt: float, tariff: Tariff) -> float:
    """energy_price * p * dt for one slot's grid draw."""
    if p_kw < 0:
        raise ValueError(f"grid power must be nonnegative, got {p_kw}")
    return tariff.energy_price * p_kw * dt


def demand_charge_step(p_kw: float, p_max_kw: float, tariff: Tariff) -> tuple[float, float]:
    """Incremental demand charge and the updated running peak."""
    charge = tariff.demand_price * max(0.0, p_kw - p_max_kw)
    return charge, max(p_kw, p_max_kw)


def generator_use_cost(using: bool, price: float, lifetime_hours: float,
                       remaining_hours: float, dt: float) -> tuple[float, float, bool]:
    """(cost, new_remaining, replaced) for one slot of generator use.

    Cost is price * dt / lifetime while the generator produces. When the
    remaining lifetime is exhausted the generator is replaced: remaining
    resets to the full lifetime and the replaced flag is set so callers
    can log the capital event.
    """
    if not using:
        return 0.0, remaining_hours, False
    cost = price * dt / lifetime_hours
    remaining = remaining_hours - dt
    if remaining <= 0:
        return cost, lifetime_hours, True
    return cost, remaining, False


def battery_degradation_cost(delta_soe: float, cfg: BatteryConfig) -> float:
    """SoE loss priced against the battery's replacement value."""
    if delta_soe < 0:
        raise ValueError(f"delta_soe must be nonnegative, got {delta_soe}")
    return cfg.replacement_value_usd * delta_soe


def roi(monthly_saving_usd: float, equipment: EquipmentConfig, battery: BatteryConfig) -> float:
    """Annualized return on investment: 12 * monthly saving over the total
    equipment outlay (generators plus battery replacement value)."""
    investment = equipment.pv_price + equipment.wind_price + battery.replacement_value_usd
    return 12.0 * monthly_saving_usd / investment


@dataclass
class CostBreakdown:
    """Cycle totals. ``investment`` = pv + wind + battery; ``total`` is the
    full bill including all three."""

    energy: float = 0.0
    demand: float = 0.0
    pv_cost: float = 0.0
    wind_cost: float = 0.0
    battery_cost: float = 0.0
    peak_kw: float = 0.0

    @property
    def investment(self) -> float:
        return self.pv_cost + self.wind_cost + self.battery_cost

    @property
    def total(self) -> float:
        return self.energy + self.demand + self.investment

    @property
    def billable(self) -> float:
        """Energy + demand + battery degradation: the policy-dependent part
        of the bill, excluding sunk generator amortization."""
        return self.energy + self.demand + self.battery_cost

    def add_slot(self, ce: float, cd: float, c_pv: float, c_wind: float,
                 c_batt: float, p_kw: float) -> None:
        self.energy += ce
        self.demand += cd
        self.pv_cost += c_pv
        self.wind_cost += c_wind
        self.battery_cost += c_batt
        if p_kw > self.peak_kw:
            self.peak_kw = p_kw

    def as_dict(self) -> dict:
        return {
            "energy_usd": self.energy,
            "demand_usd": self.demand,
            "pv_cost_usd": self.pv_cost,
            "wind_cost_usd": self.wind_cost,
            "battery_cost_usd": self.battery_cost,
            "investment_usd": self.investment,
            "total_usd": self.total,
            "peak_kw": self.peak_kw,
        }

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.as_dict(), fh, indent=2)
            fh.write("\n")
