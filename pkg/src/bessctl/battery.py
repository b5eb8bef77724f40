"""Battery state evolution, dispatch limits, and depth-of-discharge wear.

Sign convention for the dispatch variable b (kW at the battery
terminals): positive discharges to the load, negative charges from
surplus renewable generation, zero idles. A slot never both charges and
discharges; the feasible side is fixed by the sign of the renewable
surplus g - d.

State is the triple (SoE, SoC, DoD): SoE is the remaining effective
capacity as a fraction of the initial capacity and only decreases; SoC
is the stored-energy fraction; DoD tracks the depth of the current
discharge excursion. Each discharging slot consumes
(1 - soe_ineffective) / cycle_life(DoD) of SoE, i.e. one slot's worth of
the cycle budget at that depth, so deep or fragmented discharging wears
the battery faster.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import ScenarioError, require_positive

# (DoD fraction, surviving discharge/charge cycles). Repo defaults shaped
# like published lithium-ion cycle curves; configurable per scenario.
DEFAULT_CYCLE_TABLE = (
    (0.1, 15000.0), (0.2, 9000.0), (0.3, 6000.0), (0.4, 4500.0), (0.5, 3500.0),
    (0.6, 2800.0), (0.7, 2300.0), (0.8, 1900.0), (0.9, 1600.0), (1.0, 1400.0),
)

_BOUND_TOL = 1e-9


@dataclass(frozen=True)
class BatteryConfig:
    capacity_kwh: float = 10.0
    soc_min: float = 0.1
    soc_max: float = 1.0
    soe_ineffective: float = 0.8   # replace the battery once SoE falls here
    eta_charge: float = 0.999      # source draw = |b| / eta_charge
    eta_discharge: float = 0.85    # load receives eta_discharge * b
    max_charge_kw: float = 16.0
    max_discharge_kw: float = 8.0
    unit_cost_per_kwh: float = 271.0
    cycle_table: tuple[tuple[float, float], ...] = DEFAULT_CYCLE_TABLE
    initial_soc: float = 0.5

    def validate(self) -> "BatteryConfig":
        require_positive("battery.capacity_kwh", self.capacity_kwh)
        require_positive("battery.max_charge_kw", self.max_charge_kw)
        require_positive("battery.max_discharge_kw", self.max_discharge_kw)
        require_positive("battery.unit_cost_per_kwh", self.unit_cost_per_kwh)
        if not (0 <= self.soc_min < self.soc_max <= 1):
            raise ScenarioError(
                f"SoC bounds must satisfy 0 <= min < max <= 1, got "
                f"[{self.soc_min}, {self.soc_max}]")
        if not (0 < self.soe_ineffective < 1):
            raise ScenarioError(
                f"soe_ineffective must lie in (0, 1), got {self.soe_ineffective}")
        for name, eta in (("eta_charge", self.eta_charge), ("eta_discharge", self.eta_discharge)):
            if not (0 < eta <= 1):
                raise ScenarioError(f"battery.{name} must lie in (0, 1], got {eta}")
        if not (self.soc_min <= self.initial_soc <= self.soc_max):
            raise ScenarioError(
                f"initial_soc {self.initial_soc} outside [{self.soc_min}, {self.soc_max}]")
        dods = [d for d, _ in self.cycle_table]
        cycles = [c for _, c in self.cycle_table]
        if len(dods) < 2 or any(b <= a for a, b in zip(dods, dods[1:])):
            raise ScenarioError("cycle_table DoD keys must be strictly increasing")
        if dods[0] <= 0 or dods[-1] > 1:
            raise ScenarioError("cycle_table DoD keys must lie in (0, 1]")
        if any(c <= 0 for c in cycles) or any(b >= a for a, b in zip(cycles, cycles[1:])):
            raise ScenarioError("cycle_table cycle counts must be positive and strictly decreasing")
        return self

    @property
    def replacement_value_usd(self) -> float:
        return self.unit_cost_per_kwh * self.capacity_kwh


@dataclass(frozen=True)
class BatteryState:
    soe: float = 1.0
    soc: float = 0.5
    dod: float = 0.0


@dataclass(frozen=True)
class OperationResult:
    state: BatteryState
    load_side_kw: float   # power delivered to the load (discharge only)
    delta_soe: float
    dead: bool            # SoE crossed soe_ineffective; replacement due


def cycle_life(dod: float, cfg: BatteryConfig) -> float:
    """Surviving cycles at a DoD level: piecewise-linear through the
    config table, clamped to the endpoint values outside its range."""
    if dod <= 0:
        raise ValueError(f"dod must be positive, got {dod}")
    table = cfg.cycle_table
    if dod <= table[0][0]:
        return table[0][1]
    if dod >= table[-1][0]:
        return table[-1][1]
    for (d0, c0), (d1, c1) in zip(table, table[1:]):
        if dod <= d1:
            return c0 + (c1 - c0) * (dod - d0) / (d1 - d0)
    return table[-1][1]  # unreachable


def feasible_bounds(state: BatteryState, surplus_kw: float, cfg: BatteryConfig,
                    dt: float) -> tuple[float, float]:
    """(b_min, b_max) for the slot, with b_min <= 0 <= b_max and at least
    one side degenerate.

    With surplus (g >= d) only charging is allowed, limited by the charge
    rate, the surplus converted at eta_charge, and the SoC headroom. In
    deficit only discharging is allowed, limited by the discharge rate
    and the energy above soc_min.
    """
    pi = cfg.capacity_kwh
    if surplus_kw >= 0:
        b_min = -min(cfg.max_charge_kw,
                     cfg.eta_charge * surplus_kw,
                     (cfg.soc_max - state.soc) * pi / dt)
        return (min(b_min, 0.0), 0.0)
    b_max = min(cfg.max_discharge_kw, (state.soc - cfg.soc_min) * pi / dt)
    return (0.0, max(b_max, 0.0))


def apply_operation(state: BatteryState, b_kw: float, cfg: BatteryConfig,
                    dt: float) -> OperationResult:
    """One-slot state update for a dispatch b_kw.

    Discharge: SoC drops by b*dt/pi, the load receives eta_discharge*b,
    DoD deepens by b*dt/pi, and SoE drops by one cycle's worth of life at
    the new depth. Charge: SoC rises by |b|*dt/pi, the released depth
    refills, no SoE wear. Raises on rate or SoC-window violations.
    """
    pi = cfg.capacity_kwh
    if b_kw > cfg.max_discharge_kw + _BOUND_TOL or -b_kw > cfg.max_charge_kw + _BOUND_TOL:
        raise ValueError(f"dispatch {b_kw} kW exceeds the battery's rate limits")
    soc_next = state.soc - b_kw * dt / pi
    if soc_next > cfg.soc_max + _BOUND_TOL or soc_next < cfg.soc_min - _BOUND_TOL:
        raise ValueError(
            f"dispatch {b_kw} kW would move SoC to {soc_next}, outside "
            f"[{cfg.soc_min}, {cfg.soc_max}]")
    if b_kw > 0:
        delta_dod = b_kw * dt / pi
        dod_next = min(state.dod + delta_dod, 1.0)
        delta_soe = (1.0 - cfg.soe_ineffective) / cycle_life(dod_next, cfg)
        next_state = BatteryState(soe=state.soe - delta_soe, soc=soc_next, dod=dod_next)
        return OperationResult(next_state, cfg.eta_discharge * b_kw, delta_soe,
                               dead=next_state.soe < cfg.soe_ineffective)
    if b_kw < 0:
        dod_next = max(0.0, state.dod + b_kw * dt / pi)
        next_state = BatteryState(soe=state.soe, soc=soc_next, dod=dod_next)
        return OperationResult(next_state, 0.0, 0.0, dead=False)
    return OperationResult(state, 0.0, 0.0, dead=False)


def fresh_state(cfg: BatteryConfig) -> BatteryState:
    return BatteryState(soe=1.0, soc=cfg.initial_soc, dod=0.0)
