"""Reference policies and the exhaustive small-horizon optimizer.

Policies are callables ``(obs, env) -> action index``. The oracle
enumerates every distinct action sequence through the exact slot
dynamics and is the ground-truth lower bound for small instances.
"""

from __future__ import annotations

import numpy as np

from . import _kernels as K
from .battery import feasible_bounds, fresh_state
from .dqn import QNetwork
from .environment import ActionGrid, Env
from .simulation import Simulation

POLICY_KINDS = ("grid_only", "greedy", "dqn", "oracle")

ORACLE_HORIZON_CAP = 16
ORACLE_NODE_LIMIT = 10 ** 8


def grid_only_policy(obs, env: Env) -> int:
    """Always idle; pair with an unequipped env for the no-deployment bill."""
    return env.action_grid.idle_index


def greedy_policy(obs, env: Env) -> int:
    """Myopic rule: charge at the maximum level whenever there is
    surplus; in deficit take the largest discharge level whose delivered
    power still fits inside the deficit (never discharge into
    curtailment); idle when no level fits."""
    d = env.current_demand
    g = env.current_generation
    surplus = g - d
    levels = env.action_grid.levels
    if surplus >= 0:
        return int(np.argmin(levels))  # most negative = max charge
    cfg = env.sim.battery
    _, b_max = feasible_bounds(env.state.battery, surplus, cfg, env.sim.grid.slot_hours)
    deficit = -surplus
    best = env.action_grid.idle_index
    best_level = 0.0
    for idx, frac in enumerate(levels):
        if frac <= 0:
            continue
        delivered = cfg.eta_discharge * frac * b_max
        if 0.0 < delivered <= deficit + 1e-12 and frac > best_level:
            best, best_level = idx, frac
    return best


class DqnPolicy:
    """Greedy action under a trained Q-network."""

    def __init__(self, net: QNetwork):
        self.net = net

    def __call__(self, obs, env: Env) -> int:
        return int(np.argmax(self.net.q_values(obs)))


def oracle_branching(action_count: int) -> int:
    """Distinct actions per slot after surplus-sign masking: one side of
    the symmetric grid plus idle."""
    return (action_count + 1) // 2


def exhaustive_oracle(sim: Simulation, action_grid: ActionGrid | None = None,
                      horizon_cap: int = ORACLE_HORIZON_CAP,
                      node_limit: int = ORACLE_NODE_LIMIT) -> tuple[float, np.ndarray]:
    """Minimum total cost over all action sequences, with one argmin
    sequence (lexicographically first among ties).

    The search tree is bounded by branching^T where branching counts the
    distinct (deduplicated) actions per slot; instances beyond the guard
    are refused.
    """
    grid = action_grid or ActionGrid()
    t = sim.slot_count
    if t > horizon_cap:
        raise ValueError(f"oracle horizon {t} exceeds the cap of {horizon_cap} slots")
    if oracle_branching(grid.size) ** t > node_limit:
        raise ValueError(
            f"oracle search space {oracle_branching(grid.size)}^{t} exceeds {node_limit}")
    pv_rate = sim.equipment.pv_price / sim.equipment.pv_lifetime_hours
    wind_rate = sim.equipment.wind_price / sim.equipment.wind_lifetime_hours
    ctx = K.make_slot_context(sim.battery, sim.tariff, sim.grid.slot_hours,
                              pv_rate, wind_rate, True)
    start = fresh_state(sim.battery)
    cost, seq = K.oracle_search(
        ctx, sim.demand.values, sim.pv_gen.values, sim.wind_gen.values,
        np.asarray(grid.levels, dtype=np.float64), start.soc, start.soe, start.dod)
    return float(cost), seq


def sequence_policy(seq) -> "callable":
    """Replay a fixed action sequence (used to cross-check the oracle)."""
    def policy(obs, env: Env) -> int:
        return int(seq[env.state.slot])
    return policy
