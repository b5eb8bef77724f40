"""bessctl: renewable-plus-battery supply simulation and learned dispatch
for cellular base stations."""

from ._kernels import BACKEND, COMPILED
from .battery import BatteryConfig, BatteryState
from .billing import CostBreakdown, EquipmentConfig, Tariff, roi
from .core import ScenarioError, TimeGrid, Trace
from .demand import DemandProfile, calibrate_demand, synth_demand
from .dqn import Hyperparams, QNetwork, ReplayBuffer, train
from .environment import ActionGrid, Env, rollout
from .policies import DqnPolicy, exhaustive_oracle, greedy_policy, grid_only_policy
from .renewables import PvConfig, WindConfig, pv_output, wind_output
from .simulation import (ScenarioConfig, Simulation, build_simulation, city_scenario,
                         load_scenario, save_scenario, single_day_scenario,
                         validate_scenario)

__version__ = "0.1.0"

__all__ = [
    "ActionGrid", "BACKEND", "BatteryConfig", "BatteryState", "COMPILED",
    "CostBreakdown", "DemandProfile", "DqnPolicy", "Env", "EquipmentConfig",
    "Hyperparams", "PvConfig", "QNetwork", "ReplayBuffer", "ScenarioConfig",
    "ScenarioError", "Simulation", "Tariff", "TimeGrid", "Trace", "WindConfig",
    "build_simulation", "calibrate_demand", "city_scenario", "exhaustive_oracle",
    "greedy_policy", "grid_only_policy", "load_scenario", "pv_output", "roi",
    "rollout", "save_scenario", "single_day_scenario", "synth_demand", "train",
    "validate_scenario", "wind_output",
]
