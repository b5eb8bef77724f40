import numpy as np
import pytest

from bessctl.billing import Tariff
from bessctl.core import ScenarioError, TimeGrid, Trace
from bessctl.demand import (BILL_ANCHORS_USD, DEFAULT_PROFILES, DemandProfile,
                            calibrate_demand, calibrated_demand, calibration_targets,
                            synth_demand)

GRID = TimeGrid(slot_hours=1.0, slot_count=720)


def test_resident_night_weekday_is_base_load():
    profile = DEFAULT_PROFILES["resident"]
    trace = synth_demand(profile, GRID, seed=3, noise_frac=0.0)
    assert trace.values[3] == profile.base_kw  # 03:00 weekday, shape weight 0


def test_resident_default_peak():
    profile = DEFAULT_PROFILES["resident"]
    trace = synth_demand(profile, GRID, seed=3, noise_frac=0.0)
    assert trace.values.max() == pytest.approx(1.45)


def test_noise_bounded_and_clamped():
    profile = DEFAULT_PROFILES["resident"]
    trace = synth_demand(profile, GRID, seed=3)
    clean = synth_demand(profile, GRID, seed=3, noise_frac=0.0)
    assert np.all(np.abs(trace.values - clean.values) <= 0.02 * profile.peak_kw + 1e-12)
    assert np.all(trace.values <= profile.peak_kw)
    assert np.all(trace.values > 0)


def test_demand_strictly_positive_all_profiles():
    for profile in DEFAULT_PROFILES.values():
        trace = synth_demand(profile, GRID, seed=9)
        assert np.all(trace.values > 0)


def test_office_weekend_depressed():
    profile = DEFAULT_PROFILES["office"]
    trace = synth_demand(profile, GRID, seed=1, noise_frac=0.0)
    values = trace.values.reshape(30, 24)
    weekday_mean = values[[0, 1, 2, 3, 4]].mean()
    weekend_mean = values[[5, 6]].mean()
    assert weekend_mean < 0.75 * weekday_mean


def test_resident_weekend_stays_high():
    profile = DEFAULT_PROFILES["resident"]
    trace = synth_demand(profile, GRID, seed=1, noise_frac=0.0)
    values = trace.values.reshape(30, 24)
    day = slice(9, 17)
    assert values[5][day].mean() > values[0][day].mean()  # Saturday daytime > Monday


def test_synth_determinism():
    profile = DEFAULT_PROFILES["comprehensive"]
    a = synth_demand(profile, GRID, seed=5)
    b = synth_demand(profile, GRID, seed=5)
    assert np.array_equal(a.values, b.values)


def test_calibration_hits_targets():
    tariff = Tariff()
    for bs_type in ("resident", "office", "comprehensive"):
        mean_kw, peak_kw = calibration_targets(bs_type, tariff.energy_price,
                                               tariff.demand_price)
        trace = calibrated_demand(bs_type, GRID, seed=2, energy_price=tariff.energy_price,
                                  demand_price=tariff.demand_price)
        assert trace.values.mean() == pytest.approx(mean_kw, rel=1e-3)
        assert trace.values.max() == pytest.approx(peak_kw, rel=1e-3)
        assert np.all(trace.values >= 0)


def test_calibration_target_values():
    # back-solved from the anchor bills at the default tariff
    mean_kw, peak_kw = calibration_targets("resident", 0.049, 16.08)
    assert mean_kw == pytest.approx(44.6 / 35.28)
    assert mean_kw == pytest.approx(1.264, abs=5e-4)
    assert peak_kw == pytest.approx(23.1 / 16.08)
    assert peak_kw == pytest.approx(1.437, abs=5e-4)
    mean2, peak2 = calibration_targets("office", 0.049, 16.08)
    assert (round(mean2, 3), round(peak2, 3)) == (1.137, 1.256)
    mean3, peak3 = calibration_targets("comprehensive", 0.049, 16.08)
    assert (round(mean3, 3), round(peak3, 3)) == (1.293, 1.418)


def test_calibrated_trace_reproduces_anchor_bill():
    # The whole point of calibration: grid-only billing lands on the anchors.
    tariff = Tariff()
    for bs_type, (energy_usd, demand_usd) in BILL_ANCHORS_USD.items():
        trace = calibrated_demand(bs_type, GRID, seed=77, energy_price=tariff.energy_price,
                                  demand_price=tariff.demand_price)
        energy = tariff.energy_price * trace.values.sum() * 1.0
        demand = tariff.demand_price * trace.values.max()
        assert energy == pytest.approx(energy_usd, rel=0.01)
        assert demand == pytest.approx(demand_usd, rel=0.01)


def test_calibrate_rejects_constant_trace():
    flat = Trace(grid=GRID, values=np.ones(720), kind="demand")
    with pytest.raises(ScenarioError):
        calibrate_demand(flat, 1.0, 2.0)


def test_calibrate_rejects_infeasible_targets():
    profile = DEFAULT_PROFILES["resident"]
    trace = synth_demand(profile, GRID, seed=3, noise_frac=0.0)
    # squashing the peak far above the mean forces negatives at the base
    with pytest.raises(ScenarioError):
        calibrate_demand(trace, 0.1, 5.0)


def test_profile_validation():
    with pytest.raises(ScenarioError):
        DemandProfile("resident", 0.0, 1.0, (0.5,) * 24, (1.0,) + (0.5,) * 23)
    with pytest.raises(ScenarioError):
        DemandProfile("resident", 0.5, 1.0, (0.5,) * 23, (1.0,) + (0.5,) * 23)
    with pytest.raises(ScenarioError):
        # max weight never reaches 1
        DemandProfile("resident", 0.5, 1.0, (0.5,) * 24, (0.5,) * 24)
