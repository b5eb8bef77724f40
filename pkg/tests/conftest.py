import numpy as np
import pytest

from bessctl.battery import BatteryConfig
from bessctl.billing import EquipmentConfig, Tariff
from bessctl.core import TimeGrid, Trace
from bessctl.simulation import Simulation, simulation_from_traces


@pytest.fixture
def battery_cfg():
    return BatteryConfig()


@pytest.fixture
def tariff():
    return Tariff()


def make_small_instance(seed: int, slots: int = 12,
                        capacity_kwh: float = 2.0) -> Simulation:
    """Deficit-heavy random instance small enough for the exhaustive
    oracle: flat-ish demand around 1.3 kW, generation a noisy day curve
    that leaves roughly half the slots short, and a small battery so
    dispatch choices matter without dominating the bill."""
    rng = np.random.default_rng([seed, 0x5EED])
    grid = TimeGrid(slot_hours=1.0, slot_count=slots)
    demand = rng.uniform(1.1, 1.5, slots)
    hump = np.sin(np.pi * np.arange(slots) / slots) ** 2
    pv = np.maximum(0.0, 3.0 * hump * rng.uniform(0.0, 1.2, slots) - 0.4)
    battery = BatteryConfig(capacity_kwh=capacity_kwh, max_charge_kw=1.0,
                            max_discharge_kw=1.0)
    return simulation_from_traces(
        demand=Trace(grid=grid, values=demand, kind="demand"),
        pv_gen=Trace(grid=grid, values=pv, kind="generation"),
        wind_gen=Trace(grid=grid, values=np.zeros(slots), kind="generation"),
        battery=battery, tariff=Tariff(), equipment=EquipmentConfig(),
    )


@pytest.fixture
def small_instance():
    return make_small_instance(seed=0)
