"""Hot numeric kernels.

Every kernel exists in two flavours: an explicit-loop version compiled with
numba (``*_nb``) and a vectorised numpy version (``*_np``). The module-level
names without suffix point at whichever backend :mod:`flexloss._accel`
selected. The event-loop simulator has a single source; on the fallback path it
runs as plain Python over numpy buffers.

Transition tables are int64 arrays of shape ``(T, 3)`` holding
``(source index, target index, rate kind)`` rows, where the rate kind selects
from ``(rho, k*rho, 1, gamma)``.
"""

from __future__ import annotations

import math

import numpy as np

from ._accel import NUMBA_ENABLED, njit

INDEPENDENT, PARTIAL, FULL = 0, 1, 2
PAIR_R, PAIR_B, PAIR_G = 0, 1, 2  # full-partial, full-independent, partial-independent

# canonical row-major indices of the states where an arrival is accepted
_F00, _F01, _F02, _F10, _F20 = 0, 1, 2, 3, 6
_P00, _P01, _P02, _P10 = 0, 1, 2, 3

# --------------------------------------------------------------------------- numba


@njit
def fill_generator_nb(table, n, rho, k, gamma):
    rates = np.array([rho, k * rho, 1.0, gamma])
    q = np.zeros((n, n))
    for t in range(table.shape[0]):
        q[table[t, 0], table[t, 1]] += rates[table[t, 2]]
    for i in range(n):
        s = 0.0
        for j in range(n):
            if j != i:
                s += q[i, j]
        q[i, i] = -s
    return q


@njit
def gth_nb(q):
    """Grassmann-Taksar-Heyman state reduction; NaNs if a pivot vanishes."""
    n = q.shape[0]
    a = q.copy()
    for m in range(n - 1, 0, -1):
        s = 0.0
        for j in range(m):
            s += a[m, j]
        if not s > 0.0:
            return np.full(n, np.nan)
        for i in range(m):
            a[i, m] /= s
        for i in range(m):
            f = a[i, m]
            if f != 0.0:
                for j in range(m):
                    a[i, j] += f * a[m, j]
    p = np.zeros(n)
    p[0] = 1.0
    for m in range(1, n):
        acc = 0.0
        for i in range(m):
            acc += p[i] * a[i, m]
        p[m] = acc
        if acc > 1.0:
            # power-of-two rescale keeps the weights bounded without rounding them
            scale = 2.0 ** -math.frexp(acc)[1]
            for i in range(m + 1):
                p[i] *= scale
    total = 0.0
    for m in range(n):
        total += p[m]
    for m in range(n):
        p[m] /= total
    return p


@njit
def throughput_from_pi_nb(design, rho, k, p):
    if design == FULL:
        return (k + 1.0) * rho * (p[_F00] + p[_F01] + p[_F02] + p[_F10] + p[_F20])
    return rho * (p[_P00] + p[_P01] + p[_P02] + p[_P10]) + k * rho * (p[_P00] + p[_P10])


@njit
def independent_throughput_nb(rho, k):
    return rho / (rho + 1.0) + k * rho / (k * rho + 1.0)


@njit
def gamma_zero_pi_nb(design, rho, k):
    if design == FULL:
        p = np.zeros(9)
        if k > 0.0:
            p[7] = 1.0
            return p
    else:
        p = np.zeros(6)
    # server 2 frozen by a type-1 overflow; server 1 alternates idle/busy
    p[1] = 1.0 / (rho + 1.0)
    p[4] = rho / (rho + 1.0)
    return p


@njit
def design_throughput_nb(design, rho, k, gamma, full_table, partial_table):
    if design == INDEPENDENT:
        return independent_throughput_nb(rho, k)
    if gamma == 0.0:
        return throughput_from_pi_nb(design, rho, k, gamma_zero_pi_nb(design, rho, k))
    if design == FULL:
        q = fill_generator_nb(full_table, 9, rho, k, gamma)
    else:
        q = fill_generator_nb(partial_table, 6, rho, k, gamma)
    return throughput_from_pi_nb(design, rho, k, gth_nb(q))


@njit
def gap_nb(pair, rho, k, gamma, full_table, partial_table):
    if pair == PAIR_R:
        return (design_throughput_nb(FULL, rho, k, gamma, full_table, partial_table)
                - design_throughput_nb(PARTIAL, rho, k, gamma, full_table, partial_table))
    if pair == PAIR_B:
        return (design_throughput_nb(FULL, rho, k, gamma, full_table, partial_table)
                - independent_throughput_nb(rho, k))
    return (design_throughput_nb(PARTIAL, rho, k, gamma, full_table, partial_table)
            - independent_throughput_nb(rho, k))


@njit
def bisect_gap_nb(pair, rho, k, lo, hi, tol, max_iter, full_table, partial_table):
    """Bisection for an increasing gap; returns (root, f(lo), f(hi), iterations).

    The root is NaN when the endpoints do not bracket a sign change.
    """
    f_lo = gap_nb(pair, rho, k, lo, full_table, partial_table)
    f_hi = gap_nb(pair, rho, k, hi, full_table, partial_table)
    if not (f_lo < 0.0 and f_hi > 0.0):
        return np.nan, f_lo, f_hi, 0
    it = 0
    while hi - lo > tol and it < max_iter:
        mid = 0.5 * (lo + hi)
        f_mid = gap_nb(pair, rho, k, mid, full_table, partial_table)
        if f_mid == 0.0:
            lo = mid
            hi = mid
            break
        if f_mid < 0.0:
            lo = mid
        else:
            hi = mid
        it += 1
    return 0.5 * (lo + hi), f_lo, f_hi, it


# --------------------------------------------------------------------------- numpy


def fill_generator_np(table, n, rho, k, gamma):
    rates = np.array([rho, k * rho, 1.0, gamma])
    q = np.zeros((n, n))
    np.add.at(q, (table[:, 0], table[:, 1]), rates[table[:, 2]])
    q[np.diag_indices(n)] = -q.sum(axis=1)
    return q


@np.errstate(over="ignore", invalid="ignore", divide="ignore")  # overflow surfaces as NaN
def gth_np(q):
    n = q.shape[0]
    a = np.array(q, dtype=float)
    np.fill_diagonal(a, 0.0)
    for m in range(n - 1, 0, -1):
        s = a[m, :m].sum()
        if not s > 0.0:
            return np.full(n, np.nan)
        a[:m, m] /= s
        a[:m, :m] += np.outer(a[:m, m], a[m, :m])
    p = np.zeros(n)
    p[0] = 1.0
    for m in range(1, n):
        p[m] = p[:m] @ a[:m, m]
        if p[m] > 1.0:
            p[: m + 1] *= 2.0 ** -math.frexp(p[m])[1]
    return p / p.sum()


def throughput_from_pi_np(design, rho, k, p):
    if design == FULL:
        return (k + 1.0) * rho * (p[_F00] + p[_F01] + p[_F02] + p[_F10] + p[_F20])
    return rho * (p[_P00] + p[_P01] + p[_P02] + p[_P10]) + k * rho * (p[_P00] + p[_P10])


def independent_throughput_np(rho, k):
    return rho / (rho + 1.0) + k * rho / (k * rho + 1.0)


def gamma_zero_pi_np(design, rho, k):
    p = np.zeros(9 if design == FULL else 6)
    if design == FULL and k > 0.0:
        p[7] = 1.0
        return p
    p[1] = 1.0 / (rho + 1.0)
    p[4] = rho / (rho + 1.0)
    return p


def design_throughput_np(design, rho, k, gamma, full_table, partial_table):
    if design == INDEPENDENT:
        return independent_throughput_np(rho, k)
    if gamma == 0.0:
        return throughput_from_pi_np(design, rho, k, gamma_zero_pi_np(design, rho, k))
    table, n = (full_table, 9) if design == FULL else (partial_table, 6)
    p = gth_np(fill_generator_np(table, n, rho, k, gamma))
    return throughput_from_pi_np(design, rho, k, p)


def gap_np(pair, rho, k, gamma, full_table, partial_table):
    first, second = {PAIR_R: (FULL, PARTIAL), PAIR_B: (FULL, INDEPENDENT),
                     PAIR_G: (PARTIAL, INDEPENDENT)}[pair]
    return (design_throughput_np(first, rho, k, gamma, full_table, partial_table)
            - design_throughput_np(second, rho, k, gamma, full_table, partial_table))


def bisect_gap_np(pair, rho, k, lo, hi, tol, max_iter, full_table, partial_table):
    f_lo = gap_np(pair, rho, k, lo, full_table, partial_table)
    f_hi = gap_np(pair, rho, k, hi, full_table, partial_table)
    if not (f_lo < 0.0 and f_hi > 0.0):
        return math.nan, f_lo, f_hi, 0
    it = 0
    while hi - lo > tol and it < max_iter:
        mid = 0.5 * (lo + hi)
        f_mid = gap_np(pair, rho, k, mid, full_table, partial_table)
        if f_mid == 0.0:
            lo = hi = mid
            break
        if f_mid < 0.0:
            lo = mid
        else:
            hi = mid
        it += 1
    return 0.5 * (lo + hi), f_lo, f_hi, it


# --------------------------------------------------------------------------- simulation

# float state slots
T_NOW, T_ARR1, T_ARR2, T_DONE1, T_DONE2 = 0, 1, 2, 3, 4
# int state slots
S_SRV1, S_SRV2, S_ARRIVALS, S_ILLEGAL = 0, 1, 2, 3
# buffer order: type-1 arrivals, type-2 arrivals, server-1 service, server-2 service
N_STREAMS = 4


def _sim_advance(design, rho, k, gamma, warmup, batch_size, n_batches,
                 fstate, istate, buffers, ptrs,
                 batch_accepted, batch_time, offered, accepted, state_time):
    """Advance the event loop until the horizon or an exhausted buffer.

    Returns 0 when the last measured arrival has been processed, otherwise
    ``1 + stream`` for the unit-exponential buffer that needs refilling. Each
    event consumes at most one variate per stream, so stopping before an event
    whenever any buffer is empty keeps events atomic.
    """
    rate1 = rho
    rate2 = k * rho
    horizon = warmup + batch_size * n_batches
    chunk = buffers.shape[1]
    while True:
        if istate[S_ARRIVALS] >= horizon:
            return 0
        for s in range(N_STREAMS):
            if ptrs[s] >= chunk:
                return 1 + s
        now = fstate[T_NOW]
        t1 = fstate[T_ARR1]
        t2 = fstate[T_ARR2]
        d1 = fstate[T_DONE1]
        d2 = fstate[T_DONE2]
        t_next = min(min(t1, t2), min(d1, d2))
        s1 = istate[S_SRV1]
        s2 = istate[S_SRV2]
        n_seen = istate[S_ARRIVALS]
        if n_seen >= warmup:
            dt = t_next - now
            state_time[s1, s2] += dt
            batch_time[(n_seen - warmup) // batch_size] += dt
        fstate[T_NOW] = t_next
        if t_next == d1:
            istate[S_SRV1] = 0
            fstate[T_DONE1] = np.inf
        elif t_next == d2:
            istate[S_SRV2] = 0
            fstate[T_DONE2] = np.inf
        else:
            ctype = 1 if t_next == t1 else 2
            n_seen += 1
            istate[S_ARRIVALS] = n_seen
            measured = n_seen > warmup
            admitted = False
            if ctype == 1:
                if s1 == 0:
                    istate[S_SRV1] = 1
                    fstate[T_DONE1] = t_next + buffers[2, ptrs[2]]
                    ptrs[2] += 1
                    admitted = True
                elif design != INDEPENDENT and s2 == 0:
                    istate[S_SRV2] = 1
                    e = buffers[3, ptrs[3]]
                    ptrs[3] += 1
                    fstate[T_DONE2] = t_next + e / gamma if gamma > 0.0 else np.inf
                    admitted = True
                fstate[T_ARR1] = t_next + buffers[0, ptrs[0]] / rate1
                ptrs[0] += 1
            else:
                if s2 == 0:
                    istate[S_SRV2] = 2
                    fstate[T_DONE2] = t_next + buffers[3, ptrs[3]]
                    ptrs[3] += 1
                    admitted = True
                elif design == FULL and s1 == 0:
                    istate[S_SRV1] = 2
                    e = buffers[2, ptrs[2]]
                    ptrs[2] += 1
                    fstate[T_DONE1] = t_next + e / gamma if gamma > 0.0 else np.inf
                    admitted = True
                fstate[T_ARR2] = t_next + buffers[1, ptrs[1]] / rate2
                ptrs[1] += 1
            if measured:
                offered[ctype - 1] += 1
                if admitted:
                    accepted[ctype - 1] += 1
                    batch_accepted[(n_seen - warmup - 1) // batch_size] += 1
        if design == PARTIAL and istate[S_SRV1] == 2:
            istate[S_ILLEGAL] += 1


sim_advance_py = _sim_advance
sim_advance_nb = njit(_sim_advance)

# --------------------------------------------------------------------------- dispatch

if NUMBA_ENABLED:
    fill_generator = fill_generator_nb
    gth = gth_nb
    design_throughput = design_throughput_nb
    gap = gap_nb
    bisect_gap = bisect_gap_nb
    sim_advance = sim_advance_nb
else:
    fill_generator = fill_generator_np
    gth = gth_np
    design_throughput = design_throughput_np
    gap = gap_np
    bisect_gap = bisect_gap_np
    sim_advance = sim_advance_py
