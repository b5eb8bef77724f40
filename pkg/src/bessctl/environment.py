"""The per-slot decision process around the dispatch simulator.

Observations are 8-vectors in [-1, 1]: demand and generation normalized
by their trace maxima, the battery triple (SoE, SoC, DoD), the running
grid peak normalized by the demand maximum, and sin/cos of the hour of
day. Actions index a symmetric grid of fractions of the feasible
charge/discharge bound; the side disallowed by the surplus sign is
masked to idle, so every index is always legal. The slot reward is
exp(-(slot cost)) by default.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _kernels as K
from .battery import BatteryState, fresh_state
from .billing import CostBreakdown, EquipmentBook
from .core import ScenarioError
from .simulation import Simulation

SLOT_CSV_HEADER = "slot,d,g,b,tilde_b,p,p_max,soc,soe,dod,ce,cd,cu,reward,curtailed"


@dataclass(frozen=True)
class ActionGrid:
    """Symmetric fraction levels; negative = charge side, positive =
    discharge side, zero idles."""

    levels: tuple[float, ...] = (-1.0, -0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75, 1.0)

    def __post_init__(self):
        if len(self.levels) % 2 == 0:
            raise ScenarioError("action grid must have an odd number of levels")
        if 0.0 not in self.levels:
            raise ScenarioError("action grid must contain the idle level 0")
        neg = sorted(-l for l in self.levels if l < 0)
        pos = sorted(l for l in self.levels if l > 0)
        if neg != pos:
            raise ScenarioError("action grid levels must be symmetric around 0")
        if any(not -1 <= l <= 1 for l in self.levels):
            raise ScenarioError("action grid levels must lie in [-1, 1]")

    @property
    def size(self) -> int:
        return len(self.levels)

    @property
    def idle_index(self) -> int:
        return self.levels.index(0.0)

    @classmethod
    def coarse(cls, k: int = 5) -> "ActionGrid":
        """Evenly spaced grid with k levels (k odd), e.g. k=5 gives
        (-1, -0.5, 0, 0.5, 1)."""
        if k < 3 or k % 2 == 0:
            raise ScenarioError(f"coarse grid size must be odd and >= 3, got {k}")
        half = k // 2
        return cls(tuple(i / half for i in range(-half, half + 1)))


@dataclass
class EnvState:
    slot: int
    demand_kw: float
    generation_kw: float
    battery: BatteryState
    p_max_kw: float
    books: EquipmentBook


@dataclass(frozen=True)
class SlotReport:
    slot: int
    demand_kw: float
    generation_kw: float
    b_kw: float
    load_side_kw: float
    grid_kw: float
    p_max_kw: float
    soc: float
    soe: float
    dod: float
    energy_cost: float
    demand_cost: float
    investment_cost: float
    reward: float
    curtailed_kw: float

    def csv_row(self) -> str:
        return ",".join(repr(v) for v in (
            self.slot, self.demand_kw, self.generation_kw, self.b_kw,
            self.load_side_kw, self.grid_kw, self.p_max_kw, self.soc, self.soe,
            self.dod, self.energy_cost, self.demand_cost, self.investment_cost,
            self.reward, self.curtailed_kw))


def write_slot_csv(reports: list[SlotReport], path: str | Path) -> None:
    lines = [SLOT_CSV_HEADER] + [r.csv_row() for r in reports]
    Path(path).write_text("\n".join(lines) + "\n")


class Env:
    """One billing-cycle episode over a materialized Simulation.

    ``equipped=False`` runs the grid-only reference: zero generation, no
    battery dispatch, no equipment costs.
    """

    OBS_SIZE = 8

    def __init__(self, sim: Simulation, action_grid: ActionGrid | None = None,
                 equipped: bool = True, collect_reports: bool = True,
                 reward_mode: str = "exp"):
        if reward_mode not in ("exp", "linear"):
            raise ScenarioError(f"reward_mode must be 'exp' or 'linear', got {reward_mode!r}")
        self.sim = sim
        self.action_grid = action_grid or ActionGrid()
        self.equipped = equipped
        self.collect_reports = collect_reports
        self.reward_mode = reward_mode

        self._demand = sim.demand.values
        if equipped:
            self._g_s = sim.pv_gen.values
            self._g_w = sim.wind_gen.values
            pv_rate = sim.equipment.pv_price / sim.equipment.pv_lifetime_hours
            wind_rate = sim.equipment.wind_price / sim.equipment.wind_lifetime_hours
        else:
            self._g_s = np.zeros(sim.slot_count)
            self._g_w = np.zeros(sim.slot_count)
            pv_rate = 0.0
            wind_rate = 0.0
        self._ctx = K.make_slot_context(sim.battery, sim.tariff, sim.grid.slot_hours,
                                        pv_rate, wind_rate, reward_mode == "exp")
        self._d_max = sim.demand_max
        g_max = float(np.max(self._g_s + self._g_w))
        self._g_max = g_max if g_max > 0 else 1.0
        hours = np.array([sim.grid.hour_of_day(t) for t in range(sim.slot_count)])
        self._sin_h = np.sin(2.0 * np.pi * hours / 24.0)
        self._cos_h = np.cos(2.0 * np.pi * hours / 24.0)

        self.state: EnvState | None = None
        self.totals = CostBreakdown()
        self.reward_total = 0.0
        self.replacements: list[tuple[str, int]] = []

    @property
    def action_count(self) -> int:
        return self.action_grid.size

    @property
    def slot_count(self) -> int:
        return self.sim.slot_count

    @property
    def episode_cost(self) -> float:
        return self.totals.total

    def reset(self) -> np.ndarray:
        battery = fresh_state(self.sim.battery)
        self.state = EnvState(slot=0, demand_kw=float(self._demand[0]),
                              generation_kw=float(self._g_s[0] + self._g_w[0]),
                              battery=battery, p_max_kw=0.0,
                              books=EquipmentBook(config=self.sim.equipment))
        self.totals = CostBreakdown()
        self.reward_total = 0.0
        self.replacements = []
        return self._observe(0, battery, 0.0)

    def _observe(self, slot: int, battery: BatteryState, p_max: float) -> np.ndarray:
        return np.array([
            self._demand[slot] / self._d_max,
            (self._g_s[slot] + self._g_w[slot]) / self._g_max,
            battery.soe,
            battery.soc,
            battery.dod,
            p_max / self._d_max,
            self._sin_h[slot],
            self._cos_h[slot],
        ])

    def step(self, action_idx: int) -> tuple[np.ndarray, float, bool, SlotReport | None]:
        st = self.state
        if st is None:
            raise RuntimeError("call reset() before step()")
        t = st.slot
        if t >= self.slot_count:
            raise RuntimeError("episode already finished; call reset()")
        frac = self.action_grid.levels[action_idx] if self.equipped else 0.0

        (b, load, p, curtailed, soc, soe, dod, p_max,
         ce, cd, c_pv, c_wind, c_batt, reward) = K.slot_step(
            self._ctx, float(self._demand[t]), float(self._g_s[t]), float(self._g_w[t]),
            st.battery.soc, st.battery.soe, st.battery.dod, st.p_max_kw, frac)

        battery = BatteryState(soe=soe, soc=soc, dod=dod)
        if soe < self.sim.battery.soe_ineffective:
            # Worn-out battery is swapped for a fresh one; the wear was
            # already billed through the degradation cost.
            self.replacements.append(("battery", t))
            battery = BatteryState(soe=1.0, soc=soc, dod=0.0)

        books = st.books
        if self._g_s[t] > 0.0:
            books.pv_remaining_hours -= self.sim.grid.slot_hours
            if books.pv_remaining_hours <= 0:
                books.pv_remaining_hours = self.sim.equipment.pv_lifetime_hours
                self.replacements.append(("pv", t))
        if self._g_w[t] > 0.0:
            books.wind_remaining_hours -= self.sim.grid.slot_hours
            if books.wind_remaining_hours <= 0:
                books.wind_remaining_hours = self.sim.equipment.wind_lifetime_hours
                self.replacements.append(("wind", t))

        self.totals.add_slot(ce, cd, c_pv, c_wind, c_batt, p)
        self.reward_total += reward

        report = None
        if self.collect_reports:
            report = SlotReport(
                slot=t, demand_kw=float(self._demand[t]),
                generation_kw=float(self._g_s[t] + self._g_w[t]),
                b_kw=b, load_side_kw=load, grid_kw=p, p_max_kw=p_max,
                soc=soc, soe=soe, dod=dod, energy_cost=ce, demand_cost=cd,
                investment_cost=c_pv + c_wind + c_batt, reward=reward,
                curtailed_kw=curtailed)

        done = t + 1 == self.slot_count
        self.state = EnvState(slot=t + 1,
                              demand_kw=float(self._demand[t + 1]) if not done else 0.0,
                              generation_kw=float(self._g_s[t + 1] + self._g_w[t + 1]) if not done else 0.0,
                              battery=battery, p_max_kw=p_max, books=books)
        obs = (self._observe(t + 1, battery, p_max) if not done
               else np.zeros(self.OBS_SIZE))
        return obs, reward, done, report

    # Convenience views for policies that inspect the raw slot.
    @property
    def current_demand(self) -> float:
        return float(self._demand[self.state.slot])

    @property
    def current_generation(self) -> float:
        return float(self._g_s[self.state.slot] + self._g_w[self.state.slot])


def rollout(policy, sim: Simulation, action_grid: ActionGrid | None = None,
            equipped: bool = True, collect_reports: bool = True,
            reward_mode: str = "exp") -> tuple[CostBreakdown, list[SlotReport]]:
    """Run one full episode under ``policy(obs, env) -> action index``."""
    env = Env(sim, action_grid=action_grid, equipped=equipped,
              collect_reports=collect_reports, reward_mode=reward_mode)
    obs = env.reset()
    reports: list[SlotReport] = []
    done = False
    while not done:
        obs, _, done, report = env.step(policy(obs, env))
        if report is not None:
            reports.append(report)
    return env.totals, reports
