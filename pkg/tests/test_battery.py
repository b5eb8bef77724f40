import numpy as np
import pytest

from bessctl.battery import (BatteryConfig, BatteryState, apply_operation, cycle_life,
                             feasible_bounds, fresh_state)
from bessctl.core import ScenarioError


def test_cycle_life_at_table_knots(battery_cfg):
    for dod, cycles in battery_cfg.cycle_table:
        assert cycle_life(dod, battery_cfg) == cycles


def test_cycle_life_interpolates(battery_cfg):
    # midway between (0.2, 9000) and (0.3, 6000)
    assert cycle_life(0.25, battery_cfg) == pytest.approx(7500.0)


def test_cycle_life_clamps_to_endpoints(battery_cfg):
    assert cycle_life(0.05, battery_cfg) == 15000.0
    assert cycle_life(1.0, battery_cfg) == 1400.0


def test_cycle_life_rejects_nonpositive_dod(battery_cfg):
    with pytest.raises(ValueError):
        cycle_life(0.0, battery_cfg)


def test_cycle_life_nonincreasing(battery_cfg):
    dods = np.linspace(0.01, 1.0, 300)
    values = [cycle_life(d, battery_cfg) for d in dods]
    assert all(b <= a for a, b in zip(values, values[1:]))


def test_feasible_bounds_full_battery_surplus(battery_cfg):
    state = BatteryState(soc=battery_cfg.soc_max)
    assert feasible_bounds(state, 5.0, battery_cfg, 1.0) == (0.0, 0.0)


def test_feasible_bounds_discharge_headroom(battery_cfg):
    state = BatteryState(soc=0.5)
    b_min, b_max = feasible_bounds(state, -1.0, battery_cfg, 1.0)
    assert b_min == 0.0
    assert b_max == pytest.approx(min(8.0, (0.5 - 0.1) * 10.0))  # = 4


def test_feasible_bounds_charge_limited_by_surplus(battery_cfg):
    state = BatteryState(soc=0.5)
    b_min, b_max = feasible_bounds(state, 3.0, battery_cfg, 1.0)
    assert b_max == 0.0
    assert b_min == pytest.approx(-min(16.0, 0.999 * 3.0, 5.0))  # = -2.997


def test_feasible_bounds_one_side_degenerate(battery_cfg):
    rng = np.random.default_rng(8)
    for _ in range(200):
        state = BatteryState(soc=rng.uniform(0.1, 1.0), dod=rng.uniform(0, 0.8))
        surplus = rng.uniform(-4, 4)
        b_min, b_max = feasible_bounds(state, surplus, battery_cfg, 1.0)
        assert b_min <= 0.0 <= b_max
        assert b_min == 0.0 or b_max == 0.0


def test_apply_idle_is_identity(battery_cfg):
    state = BatteryState(soe=0.95, soc=0.4, dod=0.2)
    res = apply_operation(state, 0.0, battery_cfg, 1.0)
    assert res.state == state
    assert res.load_side_kw == 0.0
    assert res.delta_soe == 0.0


def test_apply_discharge_example(battery_cfg):
    # soc 0.5, b +2 kW for 1 h on a 10 kWh battery at DoD 0.3
    res = apply_operation(BatteryState(soe=1.0, soc=0.5, dod=0.3), 2.0, battery_cfg, 1.0)
    assert res.state.soc == pytest.approx(0.3)
    assert res.load_side_kw == pytest.approx(0.85 * 2.0)
    assert res.state.dod == pytest.approx(0.5)
    # one slot of cycle budget at DoD 0.5: (1 - 0.8) / 3500
    assert res.delta_soe == pytest.approx(0.2 / 3500.0)
    assert res.state.soe == pytest.approx(1.0 - 0.2 / 3500.0)


def test_apply_charge_example(battery_cfg):
    res = apply_operation(BatteryState(soe=1.0, soc=0.5, dod=0.0), -3.0, battery_cfg, 1.0)
    assert res.state.soc == pytest.approx(0.8)
    assert res.delta_soe == 0.0
    assert res.load_side_kw == 0.0


def test_charge_refills_depth(battery_cfg):
    res = apply_operation(BatteryState(soe=1.0, soc=0.5, dod=0.3), -2.0, battery_cfg, 1.0)
    assert res.state.dod == pytest.approx(0.1)
    res2 = apply_operation(BatteryState(soe=1.0, soc=0.5, dod=0.1), -2.0, battery_cfg, 1.0)
    assert res2.state.dod == 0.0  # floored


def test_apply_rejects_rate_violation(battery_cfg):
    with pytest.raises(ValueError):
        apply_operation(BatteryState(soc=1.0), 9.0, battery_cfg, 1.0)
    with pytest.raises(ValueError):
        apply_operation(BatteryState(soc=0.1), -17.0, battery_cfg, 1.0)


def test_apply_rejects_soc_window_violation(battery_cfg):
    with pytest.raises(ValueError):
        apply_operation(BatteryState(soc=0.2), 2.0, battery_cfg, 1.0)  # would hit 0.0


def test_dead_battery_flagged():
    cfg = BatteryConfig()
    state = BatteryState(soe=0.8000001, soc=0.5, dod=0.0)
    res = apply_operation(state, 2.0, cfg, 1.0)
    assert res.dead  # SoE crossed the ineffective level


def test_random_trajectories_invariants(battery_cfg):
    """SoC within bounds, SoE monotone, no wear while charging, and the
    slot never both charges and discharges."""
    rng = np.random.default_rng(123)
    for _ in range(50):
        state = fresh_state(battery_cfg)
        last_soe = state.soe
        for _ in range(200):
            surplus = rng.uniform(-3, 3)
            b_min, b_max = feasible_bounds(state, surplus, battery_cfg, 1.0)
            frac = rng.uniform()
            b = frac * b_min if surplus >= 0 else frac * b_max
            res = apply_operation(state, b, battery_cfg, 1.0)
            assert battery_cfg.soc_min - 1e-9 <= res.state.soc <= battery_cfg.soc_max + 1e-9
            assert res.state.soe <= last_soe + 1e-15
            if b <= 0:
                assert res.delta_soe == 0.0
            assert not (b > 0 and surplus >= 0)
            assert not (b < 0 and surplus < 0)
            last_soe = res.state.soe
            state = res.state


def test_round_trip_efficiency_bookkeeping(battery_cfg):
    """Charge then discharge the same terminal energy: the load receives
    eta_discharge times it, the source supplied it over eta_charge."""
    state = BatteryState(soe=1.0, soc=0.5, dod=0.0)
    charged = apply_operation(state, -2.0, battery_cfg, 1.0)
    assert charged.state.soc == pytest.approx(0.7)
    source_draw = 2.0 / battery_cfg.eta_charge
    assert source_draw == pytest.approx(2.002002002002002)
    discharged = apply_operation(charged.state, 2.0, battery_cfg, 1.0)
    assert discharged.state.soc == pytest.approx(0.5)
    assert discharged.load_side_kw == pytest.approx(battery_cfg.eta_discharge * 2.0)


def test_config_validation():
    with pytest.raises(ScenarioError):
        BatteryConfig(soc_min=0.5, soc_max=0.5).validate()
    with pytest.raises(ScenarioError):
        BatteryConfig(eta_charge=1.2).validate()
    with pytest.raises(ScenarioError):
        BatteryConfig(capacity_kwh=0.0).validate()
    with pytest.raises(ScenarioError):
        BatteryConfig(cycle_table=((0.5, 100.0), (0.4, 200.0))).validate()
    with pytest.raises(ScenarioError):
        BatteryConfig(cycle_table=((0.4, 100.0), (0.5, 200.0))).validate()
    assert BatteryConfig().validate().replacement_value_usd == pytest.approx(2710.0)
