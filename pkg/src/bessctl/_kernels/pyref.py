"""Pure-Python reference kernels.

``slot_step`` composes the battery and billing module functions, so this
backend is the executable definition of the per-slot dynamics; the
compiled backend mirrors its arithmetic operation-for-operation (the
slot dynamics are bit-identical across backends, network math matches to
rounding because BLAS may reassociate sums).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import battery as bat
from .. import billing as bil


@dataclass(frozen=True)
class SlotContext:
    battery: bat.BatteryConfig
    tariff: bil.Tariff
    dt: float
    pv_rate_usd_per_hour: float
    wind_rate_usd_per_hour: float
    exp_reward: bool = True


def make_slot_context(battery_cfg, tariff, dt, pv_rate_usd_per_hour,
                      wind_rate_usd_per_hour, exp_reward=True):
    return SlotContext(battery_cfg, tariff, dt, pv_rate_usd_per_hour,
                       wind_rate_usd_per_hour, exp_reward)


def slot_step(ctx: SlotContext, d: float, g_s: float, g_w: float,
              soc: float, soe: float, dod: float, p_max: float, frac: float):
    """One slot of dispatch dynamics for an action fraction in [-1, 1].

    Negative fractions scale the charge bound, positive the discharge
    bound; the side not allowed by the surplus sign is masked to idle.
    Returns (b, load_side, p, curtailed, soc', soe', dod', p_max',
    ce, cd, c_pv, c_wind, c_batt, reward).
    """
    cfg = ctx.battery
    g = g_s + g_w
    surplus = g - d
    state = bat.BatteryState(soe=soe, soc=soc, dod=dod)
    b_min, b_max = bat.feasible_bounds(state, surplus, cfg, ctx.dt)
    if frac < 0.0:
        b = (-frac) * b_min
    elif frac > 0.0:
        b = frac * b_max
    else:
        b = 0.0

    res = bat.apply_operation(state, b, cfg, ctx.dt)
    load = res.load_side_kw
    if b > 0.0:
        p = max(0.0, d - g - load)
        curtailed = max(0.0, g + load - d)
    else:
        p = max(0.0, d - g)
        curtailed = max(0.0, surplus - (-b) / cfg.eta_charge) if surplus > 0.0 else 0.0

    ce = bil.energy_charge(p, ctx.dt, ctx.tariff)
    cd, p_max_next = bil.demand_charge_step(p, p_max, ctx.tariff)
    c_pv = ctx.pv_rate_usd_per_hour * ctx.dt if g_s > 0.0 else 0.0
    c_wind = ctx.wind_rate_usd_per_hour * ctx.dt if g_w > 0.0 else 0.0
    c_batt = bil.battery_degradation_cost(res.delta_soe, cfg)
    cost = ce + cd + c_pv + c_wind + c_batt
    reward = math.exp(-cost) if ctx.exp_reward else -cost

    return (b, load, p, curtailed, res.state.soc, res.state.soe, res.state.dod,
            p_max_next, ce, cd, c_pv, c_wind, c_batt, reward)


# ---------------------------------------------------------------------------
# Feed-forward Q-network math on a flat parameter vector.
# Layout per layer l (sizes[l] -> sizes[l+1]): weight matrix row-major
# (out, in), then bias vector (out,).


def _views(sizes, params):
    views = []
    off = 0
    for n_in, n_out in zip(sizes[:-1], sizes[1:]):
        w = params[off:off + n_out * n_in].reshape(n_out, n_in)
        off += n_out * n_in
        b = params[off:off + n_out]
        off += n_out
        views.append((w, b))
    return views


def param_count(sizes) -> int:
    return int(sum((n_in + 1) * n_out for n_in, n_out in zip(sizes[:-1], sizes[1:])))


def nn_forward(sizes, params, x):
    """Single-observation forward pass: rectified-linear hidden layers,
    identity output."""
    a = x
    layers = _views(sizes, params)
    for w, b in layers[:-1]:
        a = np.maximum(w @ a + b, 0.0)
    w, b = layers[-1]
    return w @ a + b


def nn_forward_batch(sizes, params, X):
    A = X
    layers = _views(sizes, params)
    for w, b in layers[:-1]:
        A = np.maximum(A @ w.T + b, 0.0)
    w, b = layers[-1]
    return A @ w.T + b


def _forward_cache(sizes, params, X):
    layers = _views(sizes, params)
    acts = [X]
    pre = []
    A = X
    for w, b in layers[:-1]:
        Z = A @ w.T + b
        pre.append(Z)
        A = np.maximum(Z, 0.0)
        acts.append(A)
    w, b = layers[-1]
    out = A @ w.T + b
    return layers, acts, pre, out


def nn_gradients(sizes, params, X, actions, targets):
    """(loss, flat gradient) of the mean squared error between the
    taken-action outputs and the targets. Gradient flows only through the
    taken action of each sample."""
    layers, acts, pre, out = _forward_cache(sizes, params, X)
    n = X.shape[0]
    rows = np.arange(n)
    diff = out[rows, actions] - targets
    loss = float(np.mean(diff * diff))

    d_out = np.zeros_like(out)
    d_out[rows, actions] = 2.0 * diff / n

    grad = np.zeros_like(params)
    off = len(params)
    delta = d_out
    for li in range(len(layers) - 1, -1, -1):
        w, _ = layers[li]
        db = delta.sum(axis=0)
        dw = delta.T @ acts[li]
        off -= len(db)
        grad[off:off + len(db)] = db
        off -= dw.size
        grad[off:off + dw.size] = dw.ravel()
        if li > 0:
            delta = (delta @ w) * (pre[li - 1] > 0.0)
    return loss, grad


def nn_train_step(sizes, params, X, actions, targets, lr):
    """One SGD step in place: params -= lr * grad. Returns the pre-update
    batch loss."""
    loss, grad = nn_gradients(sizes, params, X, actions, targets)
    params -= lr * grad
    return loss


# ---------------------------------------------------------------------------
# Exhaustive small-horizon search.


def oracle_search(ctx: SlotContext, demand, g_s, g_w, levels,
                  soc0: float, soe0: float, dod0: float):
    """Depth-first enumeration of every distinct action sequence through
    the exact slot dynamics, with branch-and-bound pruning (per-slot costs
    are nonnegative, so a prefix already costing more than the incumbent
    cannot win). Masked duplicate actions are collapsed to the lowest
    level index, which also makes the returned argmin sequence the
    lexicographically first among ties.

    Returns (best_cost, best_sequence as level indices).
    """
    T = len(demand)
    K = len(levels)
    best_cost = math.inf
    best_seq: list[int] | None = None
    seq = [0] * T

    def descend(t, soc, soe, dod, p_max, acc):
        nonlocal best_cost, best_seq
        if acc >= best_cost:
            return
        if t == T:
            best_cost = acc
            best_seq = seq[:t].copy()
            return
        seen = set()
        for idx in range(K):
            out = slot_step(ctx, demand[t], g_s[t], g_w[t],
                            soc, soe, dod, p_max, levels[idx])
            b = out[0]
            if b in seen:
                continue
            seen.add(b)
            seq[t] = idx
            cost = out[8] + out[9] + out[10] + out[11] + out[12]
            descend(t + 1, out[4], out[5], out[6], out[7], acc + cost)

    descend(0, soc0, soe0, dod0, 0.0, 0.0)
    assert best_seq is not None
    return best_cost, np.array(best_seq, dtype=np.int64)
