import numpy as np
import pytest

from bessctl.billing import (CostBreakdown, EquipmentBook, EquipmentConfig, Tariff,
                             battery_degradation_cost, demand_charge_step,
                             energy_charge, generator_use_cost, roi)


def test_energy_charge_examples(tariff):
    assert energy_charge(0.0, 1.0, tariff) == 0.0
    assert energy_charge(1.2, 1.0, tariff) == pytest.approx(0.0588)
    # constant draw over a whole cycle
    total = sum(energy_charge(1.293, 1.0, tariff) for _ in range(720))
    assert total == pytest.approx(45.62, abs=0.01)


def test_energy_charge_rejects_negative(tariff):
    with pytest.raises(ValueError):
        energy_charge(-0.1, 1.0, tariff)


def test_demand_charge_step_examples(tariff):
    charge, p_max = demand_charge_step(1.0, 1.5, tariff)
    assert charge == 0.0 and p_max == 1.5
    charge, p_max = demand_charge_step(1.437, 0.0, tariff)
    assert charge == pytest.approx(23.11, abs=0.01)
    assert p_max == 1.437


def test_demand_charge_telescopes(tariff):
    rng = np.random.default_rng(6)
    for _ in range(50):
        trace = rng.uniform(0, 5, rng.integers(10, 400))
        total, p_max = 0.0, 0.0
        for p in trace:
            charge, p_max = demand_charge_step(p, p_max, tariff)
            total += charge
        assert total == pytest.approx(tariff.demand_price * trace.max(), rel=1e-12)


def test_generator_use_cost_examples():
    eq = EquipmentConfig()
    cost, remaining, replaced = generator_use_cost(False, eq.pv_price,
                                                   eq.pv_lifetime_hours,
                                                   eq.pv_lifetime_hours, 1.0)
    assert cost == 0.0 and remaining == eq.pv_lifetime_hours and not replaced
    cost, _, _ = generator_use_cost(True, 3950.0, 219000.0, 219000.0, 1.0)
    assert cost == pytest.approx(0.018037, abs=1e-6)
    cost, _, _ = generator_use_cost(True, 4500.0, 175200.0, 175200.0, 1.0)
    assert cost == pytest.approx(0.025685, abs=1e-6)


def test_generator_replacement_resets_lifetime():
    cost, remaining, replaced = generator_use_cost(True, 100.0, 50.0, 0.5, 1.0)
    assert replaced
    assert remaining == 50.0
    assert cost == pytest.approx(100.0 / 50.0)


def test_battery_degradation_cost_examples(battery_cfg):
    assert battery_degradation_cost(0.0, battery_cfg) == 0.0
    # one slot of cycle budget at DoD 0.5 against a $2710 replacement
    assert battery_degradation_cost(0.2 / 3500.0, battery_cfg) == pytest.approx(0.1549, abs=2e-4)
    # a whole life from SoE 1.0 down to 0.8
    assert battery_degradation_cost(0.2, battery_cfg) == pytest.approx(542.0)


def test_roi_examples(battery_cfg):
    eq = EquipmentConfig()
    assert eq.pv_price + eq.wind_price + battery_cfg.replacement_value_usd == 11160.0
    assert roi(50.7, eq, battery_cfg) == pytest.approx(0.0546, abs=5e-4)
    assert roi(47.0, eq, battery_cfg) == pytest.approx(0.0506, abs=5e-4)
    assert roi(0.0, eq, battery_cfg) == 0.0


def test_cost_breakdown_identity():
    cb = CostBreakdown()
    rng = np.random.default_rng(2)
    for _ in range(500):
        cb.add_slot(*rng.uniform(0, 0.3, 5), rng.uniform(0, 2))
    assert cb.total == pytest.approx(cb.energy + cb.demand + cb.investment, abs=1e-9 * 500)
    assert cb.investment == pytest.approx(cb.pv_cost + cb.wind_cost + cb.battery_cost)
    assert cb.billable == pytest.approx(cb.energy + cb.demand + cb.battery_cost)
    d = cb.as_dict()
    assert d["total_usd"] == pytest.approx(cb.total)


def test_equipment_book_defaults():
    book = EquipmentBook()
    assert book.pv_remaining_hours == book.config.pv_lifetime_hours
    assert book.wind_remaining_hours == book.config.wind_lifetime_hours
