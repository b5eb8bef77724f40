"""Compare the compiled kernels against the pure-Python reference.

Run from the repo root after building the extension:

    python3 benchmarks/bench_kernels.py

Covers the scalar hot paths (slot dynamics, single-observation forward,
exhaustive search) plus the batch network math that intentionally stays
on numpy in both backends (the numbers below show why: BLAS wins there).
"""

import time

import numpy as np

from bessctl._kernels import pyref
from bessctl.battery import BatteryConfig
from bessctl.billing import Tariff
from bessctl.dqn import Hyperparams, train
from bessctl.environment import Env
from bessctl.simulation import build_simulation, city_scenario

try:
    from bessctl._kernels import _compiled
except ImportError:
    _compiled = None


def timeit(fn, n, *args):
    t0 = time.perf_counter()
    for _ in range(n):
        fn(*args)
    return (time.perf_counter() - t0) / n


def row(name, py_s, c_s, unit="us", scale=1e6):
    speedup = f"{py_s / c_s:6.1f}x" if c_s else "      -"
    c_txt = f"{c_s * scale:10.2f}" if c_s else "         -"
    print(f"{name:<28}{py_s * scale:10.2f}{c_txt}{speedup}")


def main():
    rng = np.random.default_rng(0)
    battery, tariff = BatteryConfig(), Tariff()
    args = (battery, tariff, 1.0, 0.018, 0.0257, True)
    ctx_py = pyref.make_slot_context(*args)
    ctx_c = _compiled.make_slot_context(*args) if _compiled else None

    print(f"{'kernel':<28}{'python us':>10}{'compiled us':>11}{'speedup':>8}")

    slot_args = (1.2, 0.5, 0.3, 0.5, 1.0, 0.1, 0.4, 0.25)
    py = timeit(pyref.slot_step, 20000, ctx_py, *slot_args)
    cc = timeit(_compiled.slot_step, 20000, ctx_c, *slot_args) if _compiled else None
    row("slot_step", py, cc)

    sizes = np.array([8, 64, 64, 9], dtype=np.int64)
    params = rng.normal(0, 0.3, pyref.param_count(sizes))
    x = rng.normal(0, 1, 8)
    py = timeit(pyref.nn_forward, 10000, sizes, params, x)
    cc = timeit(_compiled.nn_forward, 10000, sizes, params, x) if _compiled else None
    row("nn_forward (single obs)", py, cc)

    X = np.ascontiguousarray(rng.normal(0, 1, (64, 8)))
    acts = rng.integers(0, 9, 64).astype(np.int64)
    tg = rng.normal(0, 1, 64)
    py = timeit(pyref.nn_forward_batch, 2000, sizes, params, X)
    cc = timeit(_compiled.nn_forward_batch, 2000, sizes, params, X) if _compiled else None
    row("nn_forward_batch (64)", py, cc)

    py = timeit(lambda: pyref.nn_train_step(sizes, params.copy(), X, acts, tg, 1e-3), 500)
    cc = (timeit(lambda: _compiled.nn_train_step(sizes, params.copy(), X, acts, tg, 1e-3), 500)
          if _compiled else None)
    row("nn_train_step (64)", py, cc)

    levels = np.array([-1.0, -0.5, 0.0, 0.5, 1.0])
    small = BatteryConfig(capacity_kwh=3.0, max_charge_kw=2.0, max_discharge_kw=2.0)
    ctx_py_s = pyref.make_slot_context(small, tariff, 1.0, 0.0, 0.0, True)
    d = rng.uniform(0.5, 2.0, 12)
    gs = np.maximum(rng.uniform(-1, 3, 12), 0.0)
    gw = np.zeros(12)
    py = timeit(pyref.oracle_search, 1, ctx_py_s, d, gs, gw, levels, 0.5, 1.0, 0.0)
    if _compiled:
        ctx_c_s = _compiled.make_slot_context(small, tariff, 1.0, 0.0, 0.0, True)
        cc = timeit(_compiled.oracle_search, 10, ctx_c_s, d, gs, gw, levels, 0.5, 1.0, 0.0)
    else:
        cc = None
    row("oracle_search (T=12, K=5)", py, cc, unit="ms")

    sim = build_simulation(city_scenario("resident", "shanghai", seed=7))
    hp = Hyperparams(episodes=5)
    t0 = time.perf_counter()
    train(lambda: Env(sim, collect_reports=False), hp, seed=0)
    per_ep = (time.perf_counter() - t0) / hp.episodes
    backend = "compiled" if _compiled else "python"
    print(f"\nend-to-end training ({backend} selected): "
          f"{per_ep:.3f} s/episode on a 720-slot cycle")


if __name__ == "__main__":
    main()
