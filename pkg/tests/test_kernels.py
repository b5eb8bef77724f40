"""Backend agreement: the compiled kernels must reproduce the pure-Python
reference — slot dynamics bit-exactly, network math to rounding."""

import numpy as np
import pytest

import bessctl._kernels as K
from bessctl._kernels import pyref
from bessctl.battery import BatteryConfig
from bessctl.billing import Tariff

compiled = pytest.importorskip("bessctl._kernels._compiled")

LEVELS = (-1.0, -0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75, 1.0)


@pytest.fixture(scope="module")
def contexts():
    battery, tariff = BatteryConfig(), Tariff()
    args = (battery, tariff, 1.0, 0.0180365, 0.0256849, True)
    return pyref.make_slot_context(*args), compiled.make_slot_context(*args)


def test_slot_step_bit_identical(contexts):
    ctx_py, ctx_c = contexts
    rng = np.random.default_rng(99)
    for _ in range(5000):
        args = (rng.uniform(0, 3), rng.uniform(0, 5), rng.uniform(0, 6),
                rng.uniform(0.1, 1.0), rng.uniform(0.8, 1.0), rng.uniform(0, 0.9),
                rng.uniform(0, 2), rng.choice(LEVELS))
        assert pyref.slot_step(ctx_py, *args) == compiled.slot_step(ctx_c, *args)


def test_nn_forward_agrees():
    rng = np.random.default_rng(7)
    for sizes in ([3, 4, 2], [8, 64, 64, 9], [2, 16, 16, 2]):
        sizes = np.asarray(sizes, dtype=np.int64)
        params = rng.normal(0, 0.4, pyref.param_count(sizes))
        x = rng.normal(0, 1, int(sizes[0]))
        qa = pyref.nn_forward(sizes, params, x)
        qb = compiled.nn_forward(sizes, params, x)
        assert qa == pytest.approx(qb, rel=1e-12, abs=1e-12)


def test_nn_gradients_agree():
    rng = np.random.default_rng(8)
    sizes = np.array([8, 32, 32, 9], dtype=np.int64)
    params = rng.normal(0, 0.4, pyref.param_count(sizes))
    X = np.ascontiguousarray(rng.normal(0, 1, (32, 8)))
    actions = rng.integers(0, 9, 32).astype(np.int64)
    targets = rng.normal(0, 1, 32)
    la, ga = pyref.nn_gradients(sizes, params, X, actions, targets)
    lb, gb = compiled.nn_gradients(sizes, params, X, actions, targets)
    assert la == pytest.approx(lb, rel=1e-12)
    denom = np.maximum(np.abs(ga), 1e-10)
    assert np.max(np.abs(ga - gb) / denom) < 1e-9


def test_nn_train_step_agrees():
    rng = np.random.default_rng(9)
    sizes = np.array([4, 16, 3], dtype=np.int64)
    params = rng.normal(0, 0.4, pyref.param_count(sizes))
    X = np.ascontiguousarray(rng.normal(0, 1, (16, 4)))
    actions = rng.integers(0, 3, 16).astype(np.int64)
    targets = rng.normal(0, 1, 16)
    pa, pb = params.copy(), params.copy()
    la = pyref.nn_train_step(sizes, pa, X, actions, targets, 0.01)
    lb = compiled.nn_train_step(sizes, pb, X, actions, targets, 0.01)
    assert la == pytest.approx(lb, rel=1e-12)
    assert pa == pytest.approx(pb, rel=1e-10, abs=1e-14)


def test_oracle_search_identical(contexts):
    ctx_py, ctx_c = contexts
    rng = np.random.default_rng(10)
    levels = np.array([-1.0, -0.5, 0.0, 0.5, 1.0])
    for _ in range(5):
        T = 8
        d = rng.uniform(0.5, 2.0, T)
        gs = np.maximum(rng.uniform(-1, 3, T), 0.0)
        gw = np.zeros(T)
        ca, sa = pyref.oracle_search(ctx_py, d, gs, gw, levels, 0.5, 1.0, 0.0)
        cb, sb = compiled.oracle_search(ctx_c, d, gs, gw, levels, 0.5, 1.0, 0.0)
        assert ca == cb  # exact: same arithmetic, same enumeration order
        assert np.array_equal(sa, sb)


def test_backend_selection_env_var():
    import os
    import subprocess
    import sys

    code = ("import bessctl._kernels as k; print(k.BACKEND)")
    out = subprocess.run([sys.executable, "-c", code],
                         env={**os.environ, "BESSCTL_KERNEL": "py"},
                         capture_output=True, text=True)
    assert out.stdout.strip() == "python"
    out = subprocess.run([sys.executable, "-c", code],
                         env={**os.environ, "BESSCTL_KERNEL": ""},
                         capture_output=True, text=True)
    assert out.stdout.strip() in ("compiled", "python")


def test_selected_backend_exports_full_api():
    for name in K.KERNEL_API:
        assert callable(getattr(K, name))
