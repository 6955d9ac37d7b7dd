# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled orbit kernels.

``fallback.py`` holds the reference semantics (map kind codes, degeneracy
guards, return conventions); every loop here mirrors it.  Scalar libm and
NumPy's SIMD transcendentals can disagree in the last ulps, so the two
implementations match statistically, not bit for bit.
"""

from libc.math cimport cos, fabs, log, pow

import numpy as np

IMPL_NAME = "compiled"

cdef double EDGE = 1.0 - 1e-15
cdef double HALF_PI = 1.5707963267948966


cdef inline double _step(int kind, double alpha, double eps, double t) nogil:
    cdef double out
    if kind == 2:
        out = 1.0 - 2.0 * fabs(t)
    elif kind == 1:
        if t >= 0.0:
            out = 1.0 - 2.0 * pow(t, alpha)
        else:
            out = 1.0 - 6.0 * pow(t, 4.0) + 4.0 * pow(t, 6.0)
    else:
        if t >= 0.0:
            out = 1.0 - 2.0 * pow(t * (2.0 - t), alpha)
        else:
            out = 1.0 - 2.0 * pow(-t, alpha)
        if kind == 3:
            out = (1.0 - eps) * out - eps
    if out > 1.0:
        out = 1.0
    elif out < -1.0:
        out = -1.0
    return out


cdef inline double _deriv(int kind, double alpha, double eps, double t) nogil:
    cdef double out
    if kind == 2:
        return 2.0
    if kind == 1:
        if t >= 0.0:
            return 2.0 * alpha * pow(t, alpha - 1.0)
        return 24.0 * pow(-t, 3.0) * (1.0 - t * t)
    if t >= 0.0:
        out = 4.0 * alpha * (1.0 - t) * pow(t * (2.0 - t), alpha - 1.0)
    else:
        out = 2.0 * alpha * pow(-t, alpha - 1.0)
    if kind == 3:
        out = (1.0 - eps) * out
    return out


def orbit_array(int kind, double alpha, double eps, double t0, long n):
    out_np = np.empty(n + 1, dtype=np.float64)
    cdef double[::1] out = out_np
    cdef double t = t0
    cdef long j
    out[0] = t
    with nogil:
        for j in range(1, n + 1):
            t = _step(kind, alpha, eps, t)
            out[j] = t
    return out_np


def orbit_factors(int kind, double alpha, double eps, double t0, long n):
    t_np = np.empty(n + 1, dtype=np.float64)
    mer_np = np.ones(n, dtype=np.float64)
    par_np = np.ones(n, dtype=np.float64)
    cdef double[::1] t_arr = t_np
    cdef double[::1] mer = mer_np
    cdef double[::1] par = par_np
    cdef long bad = -1
    cdef double t = t0
    cdef double tn
    cdef long j
    t_arr[0] = t
    with nogil:
        for j in range(n):
            if bad < 0 and (t == 0.0 or fabs(t) >= EDGE):
                bad = j
            if bad >= 0:
                t_arr[j + 1] = t
                continue
            tn = _step(kind, alpha, eps, t)
            mer[j] = _deriv(kind, alpha, eps, t)
            par[j] = 2.0 * fabs(cos(HALF_PI * tn) / cos(HALF_PI * t))
            t = tn
            t_arr[j + 1] = t
    return t_np, mer_np, par_np, int(bad)


def step_many(int kind, double alpha, double eps, t):
    a = np.ascontiguousarray(t, dtype=np.float64)
    flat = np.atleast_1d(a).ravel()
    out_np = np.empty(flat.size, dtype=np.float64)
    cdef double[::1] x = flat
    cdef double[::1] out = out_np
    cdef Py_ssize_t i
    cdef Py_ssize_t m = flat.size
    with nogil:
        for i in range(m):
            out[i] = _step(kind, alpha, eps, x[i])
    return out_np.reshape(a.shape)


def deriv_many(int kind, double alpha, double eps, t):
    a = np.ascontiguousarray(t, dtype=np.float64)
    flat = np.atleast_1d(a).ravel()
    out_np = np.empty(flat.size, dtype=np.float64)
    cdef double[::1] x = flat
    cdef double[::1] out = out_np
    cdef Py_ssize_t i
    cdef Py_ssize_t m = flat.size
    with nogil:
        for i in range(m):
            out[i] = _deriv(kind, alpha, eps, x[i])
    return out_np.reshape(a.shape)


def cocycle_sums(int kind, double alpha, double eps, t0s, long n):
    t0_np = np.ascontiguousarray(t0s, dtype=np.float64).ravel()
    cdef Py_ssize_t m = t0_np.size
    smer_np = np.zeros(m, dtype=np.float64)
    spar_np = np.zeros(m, dtype=np.float64)
    tend_np = np.empty(m, dtype=np.float64)
    bad_np = np.full(m, -1, dtype=np.int64)
    cdef double[::1] t0v = t0_np
    cdef double[::1] smer = smer_np
    cdef double[::1] spar = spar_np
    cdef double[::1] tend = tend_np
    cdef long[::1] bad = bad_np
    cdef Py_ssize_t i
    cdef long j
    cdef double t, tn, sm, sp
    with nogil:
        for i in range(m):
            t = t0v[i]
            sm = 0.0
            sp = 0.0
            for j in range(n):
                if t == 0.0 or fabs(t) >= EDGE:
                    bad[i] = j
                    break
                tn = _step(kind, alpha, eps, t)
                sm += log(_deriv(kind, alpha, eps, t))
                sp += log(2.0 * fabs(cos(HALF_PI * tn) / cos(HALF_PI * t)))
                t = tn
            smer[i] = sm
            spar[i] = sp
            tend[i] = t
    return smer_np, spar_np, tend_np, bad_np


def first_visit(int kind, double alpha, double eps, t0s, double lo, double hi,
                long n_max):
    t0_np = np.ascontiguousarray(t0s, dtype=np.float64).ravel()
    cdef Py_ssize_t m = t0_np.size
    steps_np = np.full(m, -1, dtype=np.int64)
    cdef double[::1] t0v = t0_np
    cdef long[::1] steps = steps_np
    cdef Py_ssize_t i
    cdef long j
    cdef double t
    with nogil:
        for i in range(m):
            t = t0v[i]
            if t > lo and t < hi:
                steps[i] = 0
                continue
            for j in range(1, n_max + 1):
                if fabs(t) >= EDGE:
                    break
                t = _step(kind, alpha, eps, t)
                if t > lo and t < hi:
                    steps[i] = j
                    break
    return steps_np


def basin_entry(int kind, double alpha, double eps, t0s, double lo, double hi,
                long n_max, long hold):
    t0_np = np.ascontiguousarray(t0s, dtype=np.float64).ravel()
    cdef Py_ssize_t m = t0_np.size
    entry_np = np.full(m, -1, dtype=np.int64)
    cdef double[::1] t0v = t0_np
    cdef long[::1] entry = entry_np
    cdef Py_ssize_t i
    cdef long j, run
    cdef double t
    with nogil:
        for i in range(m):
            t = t0v[i]
            run = 1 if (t >= lo and t <= hi) else 0
            if run >= hold + 1:
                entry[i] = 0
                continue
            for j in range(1, n_max + 1):
                t = _step(kind, alpha, eps, t)
                if t >= lo and t <= hi:
                    run = run + 1
                else:
                    run = 0
                if run >= hold + 1:
                    entry[i] = j - hold
                    break
    return entry_np


def neglog_sums(int kind, double alpha, double eps, t0s, checkpoints):
    t0_np = np.ascontiguousarray(t0s, dtype=np.float64).ravel()
    cps_np = np.ascontiguousarray(checkpoints, dtype=np.int64).ravel()
    cdef Py_ssize_t m = t0_np.size
    cdef Py_ssize_t q = cps_np.size
    cdef long n_max = 0 if q == 0 else int(cps_np.max())
    sums_np = np.zeros((m, q), dtype=np.float64)
    bad_np = np.full(m, -1, dtype=np.int64)
    cdef double[:, ::1] sums = sums_np
    cdef double[::1] t0v = t0_np
    cdef long[::1] cps = cps_np
    cdef long[::1] bad = bad_np
    cdef Py_ssize_t i, ci
    cdef long j
    cdef double t, acc
    cdef bint alive
    with nogil:
        for i in range(m):
            t = t0v[i]
            acc = 0.0
            ci = 0
            alive = True
            for j in range(n_max):
                if alive and (t == 0.0 or fabs(t) >= EDGE):
                    bad[i] = j
                    alive = False
                if alive:
                    acc -= log(fabs(t))
                    t = _step(kind, alpha, eps, t)
                while ci < q and j + 1 == cps[ci]:
                    sums[i, ci] = acc
                    ci = ci + 1
    return sums_np, bad_np
