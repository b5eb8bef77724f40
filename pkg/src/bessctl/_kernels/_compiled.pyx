# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels: a mirror of ``pyref`` with identical arithmetic.

Slot dynamics follow the exact operation order of the pure-Python
reference (results are bit-identical); network math uses plain loops, so
it matches numpy/BLAS to rounding rather than bitwise.
"""

from libc.math cimport exp, INFINITY

import numpy as np


def make_slot_context(battery_cfg, tariff, double dt, double pv_rate_usd_per_hour,
                      double wind_rate_usd_per_hour, bint exp_reward=True):
    params = np.array([
        dt,
        battery_cfg.capacity_kwh,
        battery_cfg.soc_min,
        battery_cfg.soc_max,
        battery_cfg.soe_ineffective,
        battery_cfg.eta_charge,
        battery_cfg.eta_discharge,
        battery_cfg.max_charge_kw,
        battery_cfg.max_discharge_kw,
        battery_cfg.unit_cost_per_kwh * battery_cfg.capacity_kwh,
        tariff.energy_price,
        tariff.demand_price,
        pv_rate_usd_per_hour,
        wind_rate_usd_per_hour,
        1.0 if exp_reward else 0.0,
    ], dtype=np.float64)
    dods = np.array([row[0] for row in battery_cfg.cycle_table], dtype=np.float64)
    cycles = np.array([row[1] for row in battery_cfg.cycle_table], dtype=np.float64)
    return (params, dods, cycles)


cdef double _cycle_life(double dod, const double[:] dods, const double[:] cycles) noexcept nogil:
    cdef Py_ssize_t n = dods.shape[0]
    cdef Py_ssize_t i
    if dod <= dods[0]:
        return cycles[0]
    if dod >= dods[n - 1]:
        return cycles[n - 1]
    for i in range(n - 1):
        if dod <= dods[i + 1]:
            return cycles[i] + (cycles[i + 1] - cycles[i]) * (dod - dods[i]) / (dods[i + 1] - dods[i])
    return cycles[n - 1]


cdef struct SlotOut:
    double b, load, p, curtailed, soc, soe, dod, p_max
    double ce, cd, c_pv, c_wind, c_batt, reward


cdef void _slot_step(const double[:] prm, const double[:] dods, const double[:] cycles,
                     double d, double g_s, double g_w,
                     double soc, double soe, double dod, double p_max,
                     double frac, SlotOut* out) noexcept nogil:
    cdef double dt = prm[0]
    cdef double pi = prm[1]
    cdef double g = g_s + g_w
    cdef double surplus = g - d
    cdef double b_min = 0.0, b_max = 0.0, b, tmp
    cdef double load, p, curtailed, soc2, soe2, dod2, delta_soe, cl
    cdef double ce, cd, c_pv, c_wind, c_batt, cost

    if surplus >= 0.0:
        b_min = prm[7]
        tmp = prm[5] * surplus
        if tmp < b_min:
            b_min = tmp
        tmp = (prm[3] - soc) * pi / dt
        if tmp < b_min:
            b_min = tmp
        b_min = -b_min
        if b_min > 0.0:
            b_min = 0.0
    else:
        b_max = prm[8]
        tmp = (soc - prm[2]) * pi / dt
        if tmp < b_max:
            b_max = tmp
        if b_max < 0.0:
            b_max = 0.0

    if frac < 0.0:
        b = (-frac) * b_min
    elif frac > 0.0:
        b = frac * b_max
    else:
        b = 0.0

    soc2 = soc - b * dt / pi
    if b > 0.0:
        dod2 = dod + b * dt / pi
        if dod2 > 1.0:
            dod2 = 1.0
        cl = _cycle_life(dod2, dods, cycles)
        delta_soe = (1.0 - prm[4]) / cl
        soe2 = soe - delta_soe
        load = prm[6] * b
        p = d - g - load
        if p < 0.0:
            p = 0.0
        curtailed = g + load - d
        if curtailed < 0.0:
            curtailed = 0.0
    else:
        if b < 0.0:
            dod2 = dod + b * dt / pi
            if dod2 < 0.0:
                dod2 = 0.0
        else:
            dod2 = dod
            soc2 = soc
        delta_soe = 0.0
        soe2 = soe
        load = 0.0
        p = d - g
        if p < 0.0:
            p = 0.0
        if surplus > 0.0:
            curtailed = surplus - (-b) / prm[5]
            if curtailed < 0.0:
                curtailed = 0.0
        else:
            curtailed = 0.0

    ce = prm[10] * p * dt
    tmp = p - p_max
    cd = prm[11] * tmp if tmp > 0.0 else 0.0
    if p > p_max:
        p_max = p
    c_pv = prm[12] * dt if g_s > 0.0 else 0.0
    c_wind = prm[13] * dt if g_w > 0.0 else 0.0
    c_batt = prm[9] * delta_soe
    cost = ce + cd + c_pv + c_wind + c_batt

    out.b = b
    out.load = load
    out.p = p
    out.curtailed = curtailed
    out.soc = soc2
    out.soe = soe2
    out.dod = dod2
    out.p_max = p_max
    out.ce = ce
    out.cd = cd
    out.c_pv = c_pv
    out.c_wind = c_wind
    out.c_batt = c_batt
    out.reward = exp(-cost) if prm[14] != 0.0 else -cost


def slot_step(ctx, double d, double g_s, double g_w, double soc, double soe,
              double dod, double p_max, double frac):
    cdef const double[:] prm = ctx[0]
    cdef const double[:] dods = ctx[1]
    cdef const double[:] cycles = ctx[2]
    cdef SlotOut out
    _slot_step(prm, dods, cycles, d, g_s, g_w, soc, soe, dod, p_max, frac, &out)
    return (out.b, out.load, out.p, out.curtailed, out.soc, out.soe, out.dod,
            out.p_max, out.ce, out.cd, out.c_pv, out.c_wind, out.c_batt, out.reward)


# ---------------------------------------------------------------------------
# Q-network math on a flat parameter vector. Layout per layer: row-major
# (out, in) weights, then biases. Contiguous views plus a skip on zero
# deltas (the output delta has one nonzero per sample) keep the loops
# vectorizable.



cdef inline double _dot(const double* w, const double* a, Py_ssize_t n) noexcept nogil:
    # 4-way unrolled multiply-accumulate; explicit partial sums let the
    # compiler vectorize without global fast-math.
    cdef double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0
    cdef Py_ssize_t i = 0
    while i + 4 <= n:
        s0 += w[i] * a[i]
        s1 += w[i + 1] * a[i + 1]
        s2 += w[i + 2] * a[i + 2]
        s3 += w[i + 3] * a[i + 3]
        i += 4
    while i < n:
        s0 += w[i] * a[i]
        i += 1
    return (s0 + s1) + (s2 + s3)


def nn_forward(const long[::1] sizes, const double[::1] params, const double[::1] x):
    cdef Py_ssize_t n_layers = sizes.shape[0] - 1
    cdef Py_ssize_t width = 0, li, i, j, off = 0, n_in, n_out, base
    for li in range(sizes.shape[0]):
        if sizes[li] > width:
            width = sizes[li]
    buf_a = np.empty(width)
    buf_b = np.empty(width)
    cdef double[::1] a = buf_a
    cdef double[::1] z = buf_b
    cdef double[::1] swap
    cdef double s
    for i in range(sizes[0]):
        a[i] = x[i]
    for li in range(n_layers):
        n_in = sizes[li]
        n_out = sizes[li + 1]
        for j in range(n_out):
            base = off + j * n_in
            s = params[off + n_out * n_in + j] + _dot(&params[base], &a[0], n_in)
            if li < n_layers - 1 and s < 0.0:
                s = 0.0
            z[j] = s
        off += n_out * n_in + n_out
        swap = a
        a = z
        z = swap
    out = np.empty(int(sizes[n_layers]))
    cdef double[::1] o = out
    for j in range(sizes[n_layers]):
        o[j] = a[j]
    return out


def nn_forward_batch(const long[::1] sizes, const double[::1] params, const double[:, ::1] X):
    cdef Py_ssize_t B = X.shape[0]
    cdef Py_ssize_t n_layers = sizes.shape[0] - 1
    cdef Py_ssize_t width = 0, li, i, j, r, off = 0, n_in, n_out, base
    for li in range(sizes.shape[0]):
        if sizes[li] > width:
            width = sizes[li]
    buf_a = np.empty((B, width))
    buf_b = np.empty((B, width))
    cdef double[:, ::1] a = buf_a
    cdef double[:, ::1] z = buf_b
    cdef double[:, ::1] swap
    cdef double s
    for r in range(B):
        for i in range(sizes[0]):
            a[r, i] = X[r, i]
    for li in range(n_layers):
        n_in = sizes[li]
        n_out = sizes[li + 1]
        for r in range(B):
            for j in range(n_out):
                base = off + j * n_in
                s = params[off + n_out * n_in + j] + _dot(&params[base], &a[r, 0], n_in)
                if li < n_layers - 1 and s < 0.0:
                    s = 0.0
                z[r, j] = s
        off += n_out * n_in + n_out
        swap = a
        a = z
        z = swap
    out = np.empty((B, int(sizes[n_layers])))
    cdef double[:, ::1] o = out
    for r in range(B):
        for j in range(sizes[n_layers]):
            o[r, j] = a[r, j]
    return out


cdef double _gradients(const long[::1] sizes, const double[::1] params,
                       const double[:, ::1] X, const long[::1] actions,
                       const double[::1] targets, double[::1] grad):
    """Shared forward/backward; fills ``grad`` and returns the loss."""
    cdef Py_ssize_t B = X.shape[0]
    cdef Py_ssize_t n_layers = sizes.shape[0] - 1
    cdef Py_ssize_t li, i, j, r, off, n_in, n_out, base
    cdef double s, diff, dj, loss = 0.0

    # Forward, caching post-activation layers (acts[0] is the input).
    acts = [np.asarray(X)]
    pres = []
    cdef const double[:, ::1] a_prev
    cdef double[:, ::1] a_next
    cdef double[:, ::1] pre
    off = 0
    for li in range(n_layers):
        n_in = sizes[li]
        n_out = sizes[li + 1]
        a_prev = acts[li]
        pre_arr = np.empty((B, n_out))
        pre = pre_arr
        for r in range(B):
            for j in range(n_out):
                base = off + j * n_in
                pre[r, j] = params[off + n_out * n_in + j] + _dot(&params[base], &a_prev[r, 0], n_in)
        if li < n_layers - 1:
            act_arr = np.empty((B, n_out))
            a_next = act_arr
            for r in range(B):
                for j in range(n_out):
                    a_next[r, j] = pre[r, j] if pre[r, j] > 0.0 else 0.0
            acts.append(act_arr)
            pres.append(pre_arr)
        else:
            acts.append(pre_arr)
        off += n_out * n_in + n_out

    cdef double[:, ::1] out_view = acts[n_layers]
    cdef Py_ssize_t K = sizes[n_layers]
    delta_arr = np.zeros((B, K))
    cdef double[:, ::1] delta = delta_arr
    for r in range(B):
        diff = out_view[r, actions[r]] - targets[r]
        loss += diff * diff
        delta[r, actions[r]] = 2.0 * diff / B
    loss /= B

    # Backward: accumulate grad slices layer by layer from the top.
    cdef double[:, ::1] delta_prev
    cdef double[:, ::1] pre_view
    for li in range(n_layers - 1, -1, -1):
        n_in = sizes[li]
        n_out = sizes[li + 1]
        off -= n_out * n_in + n_out
        a_prev = acts[li]
        for r in range(B):
            for j in range(n_out):
                dj = delta[r, j]
                if dj == 0.0:
                    continue
                grad[off + n_out * n_in + j] += dj
                base = off + j * n_in
                for i in range(n_in):
                    grad[base + i] += dj * a_prev[r, i]
        if li > 0:
            delta_prev_arr = np.zeros((B, n_in))
            delta_prev = delta_prev_arr
            pre_view = pres[li - 1]
            for r in range(B):
                for j in range(n_out):
                    dj = delta[r, j]
                    if dj == 0.0:
                        continue
                    base = off + j * n_in
                    for i in range(n_in):
                        delta_prev[r, i] += dj * params[base + i]
                for i in range(n_in):
                    if pre_view[r, i] <= 0.0:
                        delta_prev[r, i] = 0.0
            delta = delta_prev
    return loss


def nn_gradients(const long[::1] sizes, const double[::1] params,
                 const double[:, ::1] X, const long[::1] actions,
                 const double[::1] targets):
    grad = np.zeros(params.shape[0])
    cdef double loss = _gradients(sizes, params, X, actions, targets, grad)
    return loss, grad


def nn_train_step(const long[::1] sizes, double[::1] params,
                  const double[:, ::1] X, const long[::1] actions,
                  const double[::1] targets, double lr):
    grad_arr = np.zeros(params.shape[0])
    cdef double[::1] grad = grad_arr
    cdef double loss = _gradients(sizes, params, X, actions, targets, grad_arr)
    cdef Py_ssize_t i
    for i in range(params.shape[0]):
        params[i] = params[i] - lr * grad[i]
    return loss


# ---------------------------------------------------------------------------
# Exhaustive search with branch-and-bound (per-slot costs are nonnegative,
# so a prefix already costing at least the incumbent cannot improve).


cdef void _descend(const double[:] prm, const double[:] dods, const double[:] cycles,
                   const double[:] d, const double[:] g_s, const double[:] g_w,
                   const double[:] levels,
                   Py_ssize_t t, Py_ssize_t T, Py_ssize_t K,
                   double soc, double soe, double dod, double p_max,
                   double acc, double* best_cost, long* best_seq,
                   long* cur_seq) noexcept nogil:
    cdef SlotOut out
    cdef double seen[32]
    cdef Py_ssize_t n_seen = 0, idx, i
    cdef bint dup
    cdef double cost
    if acc >= best_cost[0]:
        return
    if t == T:
        best_cost[0] = acc
        for i in range(T):
            best_seq[i] = cur_seq[i]
        return
    for idx in range(K):
        _slot_step(prm, dods, cycles, d[t], g_s[t], g_w[t],
                   soc, soe, dod, p_max, levels[idx], &out)
        dup = False
        for i in range(n_seen):
            if seen[i] == out.b:
                dup = True
                break
        if dup:
            continue
        seen[n_seen] = out.b
        n_seen += 1
        cur_seq[t] = idx
        cost = out.ce + out.cd + out.c_pv + out.c_wind + out.c_batt
        _descend(prm, dods, cycles, d, g_s, g_w, levels,
                 t + 1, T, K, out.soc, out.soe, out.dod, out.p_max,
                 acc + cost, best_cost, best_seq, cur_seq)


def oracle_search(ctx, const double[:] demand, const double[:] g_s,
                  const double[:] g_w, const double[:] levels,
                  double soc0, double soe0, double dod0):
    cdef const double[:] prm = ctx[0]
    cdef const double[:] dods = ctx[1]
    cdef const double[:] cycles = ctx[2]
    cdef Py_ssize_t T = demand.shape[0]
    cdef Py_ssize_t K = levels.shape[0]
    if K > 32:
        raise ValueError("action grid too large for the compiled oracle")
    best = np.zeros(T, dtype=np.int64)
    cur = np.zeros(T, dtype=np.int64)
    cdef long[:] best_view = best
    cdef long[:] cur_view = cur
    cdef double best_cost = INFINITY
    _descend(prm, dods, cycles, demand, g_s, g_w, levels,
             0, T, K, soc0, soe0, dod0, 0.0, 0.0,
             &best_cost, &best_view[0], &cur_view[0])
    return float(best_cost), best
