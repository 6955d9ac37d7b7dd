"""Pure-Python/NumPy orbit kernels (used when the compiled core is absent).

Scalar orbits run as plain Python loops; ensemble operations vectorize across
the ensemble, so an orbit of length n over m seeds costs n vector operations
of width m.  Members that degenerate (land exactly on the critical point 0 or
within 1e-15 of an endpoint) freeze in place and are reported through the
``bad`` return values.

Semantics here are the reference; ``_core`` mirrors them loop for loop.  The
two implementations agree to floating-point noise but not bit for bit, since
NumPy may route ``pow``/``cos``/``log`` through SIMD variants of libm.

Map kinds share one integer coding with the compiled core:

====  =========  =============================================================
code  family     definition on [-1, 1]
====  =========  =============================================================
0     G0         1 - 2*(t*(2-t))**alpha  (t >= 0),   1 - 2*(-t)**alpha (t < 0)
1     F0         1 - 2*t**alpha (t >= 0),   1 - 6*t**4 + 4*t**6       (t < 0)
2     TENT       1 - 2*|t|
3     PERTURBED  (1-eps) * G0(t) - eps
====  =========  =============================================================

Every step output is clipped to [-1, 1]; the families map the interval into
itself exactly, and the clip only absorbs last-ulp rounding overshoot.
"""

from __future__ import annotations

import math

import numpy as np

IMPL_NAME = "fallback"

KIND_G0 = 0
KIND_F0 = 1
KIND_TENT = 2
KIND_PERTURBED = 3

EDGE = 1.0 - 1e-15
_HALF_PI = math.pi / 2.0


# ---------------------------------------------------------------------------
# scalar primitives
# ---------------------------------------------------------------------------

def _step_scalar(kind: int, alpha: float, eps: float, t: float) -> float:
    if kind == KIND_TENT:
        out = 1.0 - 2.0 * abs(t)
    elif kind == KIND_F0:
        if t >= 0.0:
            out = 1.0 - 2.0 * t ** alpha
        else:
            out = 1.0 - 6.0 * t ** 4.0 + 4.0 * t ** 6.0
    else:
        if t >= 0.0:
            out = 1.0 - 2.0 * (t * (2.0 - t)) ** alpha
        else:
            out = 1.0 - 2.0 * (-t) ** alpha
        if kind == KIND_PERTURBED:
            out = (1.0 - eps) * out - eps
    if out > 1.0:
        return 1.0
    if out < -1.0:
        return -1.0
    return out


def _deriv_scalar(kind: int, alpha: float, eps: float, t: float) -> float:
    """|d/dt| of the selected map, one-sided branch formulas at 0."""
    if kind == KIND_TENT:
        return 2.0
    if kind == KIND_F0:
        if t >= 0.0:
            return 2.0 * alpha * t ** (alpha - 1.0)
        return 24.0 * (-t) ** 3.0 * (1.0 - t * t)
    if t >= 0.0:
        out = 4.0 * alpha * (1.0 - t) * (t * (2.0 - t)) ** (alpha - 1.0)
    else:
        out = 2.0 * alpha * (-t) ** (alpha - 1.0)
    if kind == KIND_PERTURBED:
        out = (1.0 - eps) * out
    return out


# ---------------------------------------------------------------------------
# vector primitives
# ---------------------------------------------------------------------------

def step_many(kind: int, alpha: float, eps: float, t: np.ndarray) -> np.ndarray:
    """One map step applied elementwise to *t*."""
    t = np.asarray(t, dtype=np.float64)
    if kind == KIND_TENT:
        out = 1.0 - 2.0 * np.abs(t)
    elif kind == KIND_F0:
        tr = np.clip(t, 0.0, 1.0)
        tl = np.clip(t, -1.0, 0.0)
        out = np.where(t >= 0.0,
                       1.0 - 2.0 * tr ** alpha,
                       1.0 - 6.0 * tl ** 4.0 + 4.0 * tl ** 6.0)
    else:
        tr = np.clip(t, 0.0, 1.0)
        tl = np.clip(t, -1.0, 0.0)
        out = np.where(t >= 0.0,
                       1.0 - 2.0 * (tr * (2.0 - tr)) ** alpha,
                       1.0 - 2.0 * (-tl) ** alpha)
        if kind == KIND_PERTURBED:
            out = (1.0 - eps) * out - eps
    return np.clip(out, -1.0, 1.0)


def deriv_many(kind: int, alpha: float, eps: float, t: np.ndarray) -> np.ndarray:
    """|map'| elementwise, one-sided branch formulas at 0."""
    t = np.asarray(t, dtype=np.float64)
    if kind == KIND_TENT:
        return np.full(t.shape, 2.0)
    tr = np.clip(t, 0.0, 1.0)
    tl = np.clip(t, -1.0, 0.0)
    if kind == KIND_F0:
        return np.where(t >= 0.0,
                        2.0 * alpha * tr ** (alpha - 1.0),
                        24.0 * (-tl) ** 3.0 * (1.0 - tl * tl))
    out = np.where(t >= 0.0,
                   4.0 * alpha * (1.0 - tr) * (tr * (2.0 - tr)) ** (alpha - 1.0),
                   2.0 * alpha * (-tl) ** (alpha - 1.0))
    if kind == KIND_PERTURBED:
        out = (1.0 - eps) * out
    return out


# ---------------------------------------------------------------------------
# orbit kernels
# ---------------------------------------------------------------------------

def orbit_array(kind: int, alpha: float, eps: float, t0: float, n: int) -> np.ndarray:
    """Orbit t0, f(t0), ..., f^n(t0) as an (n+1,) array."""
    out = np.empty(n + 1, dtype=np.float64)
    t = float(t0)
    out[0] = t
    for j in range(1, n + 1):
        t = _step_scalar(kind, alpha, eps, t)
        out[j] = t
    return out


def orbit_factors(kind: int, alpha: float, eps: float, t0: float, n: int):
    """Orbit plus per-step meridian/parallel derivative factors.

    Returns ``(t, mer, par, bad)`` with ``t`` of shape (n+1,) and the factor
    arrays of shape (n,); ``mer[j]`` and ``par[j]`` belong to the step
    ``t[j] -> t[j+1]``.  ``bad`` is the first step index at which the orbit
    point was degenerate (exactly 0, or within 1e-15 of an endpoint), or -1.
    From ``bad`` on the orbit is frozen and the factors stay at 1.
    """
    t_arr = np.empty(n + 1, dtype=np.float64)
    mer = np.ones(n, dtype=np.float64)
    par = np.ones(n, dtype=np.float64)
    bad = -1
    t = float(t0)
    t_arr[0] = t
    for j in range(n):
        if bad < 0 and (t == 0.0 or abs(t) >= EDGE):
            bad = j
        if bad >= 0:
            t_arr[j + 1] = t
            continue
        tn = _step_scalar(kind, alpha, eps, t)
        mer[j] = _deriv_scalar(kind, alpha, eps, t)
        par[j] = 2.0 * abs(math.cos(_HALF_PI * tn) / math.cos(_HALF_PI * t))
        t = tn
        t_arr[j + 1] = t
    return t_arr, mer, par, bad


def cocycle_sums(kind: int, alpha: float, eps: float, t0s, n: int):
    """Summed log meridian/parallel factors over n steps for each seed.

    Returns ``(smer, spar, tend, bad)``; degenerate members freeze and stop
    accumulating, with ``bad[i]`` the step at which member i froze (-1 if it
    survived all n steps).
    """
    t = np.array(t0s, dtype=np.float64)
    m = t.size
    smer = np.zeros(m, dtype=np.float64)
    spar = np.zeros(m, dtype=np.float64)
    bad = np.full(m, -1, dtype=np.int64)
    alive = np.ones(m, dtype=bool)
    with np.errstate(divide="ignore", invalid="ignore"):
        for j in range(n):
            newbad = alive & ((t == 0.0) | (np.abs(t) >= EDGE))
            if newbad.any():
                bad[newbad] = j
                alive &= ~newbad
                if not alive.any():
                    break
            tn = step_many(kind, alpha, eps, t)
            lm = np.log(deriv_many(kind, alpha, eps, t))
            lp = np.log(2.0 * np.abs(np.cos(_HALF_PI * tn) / np.cos(_HALF_PI * t)))
            smer += np.where(alive, lm, 0.0)
            spar += np.where(alive, lp, 0.0)
            t = np.where(alive, tn, t)
    return smer, spar, t, bad


def first_visit(kind: int, alpha: float, eps: float, t0s, lo: float, hi: float,
                n_max: int) -> np.ndarray:
    """First step j in [0, n_max] with lo < t_j < hi, per seed (-1: never).

    Members parked within 1e-15 of an endpoint stop iterating (the endpoint
    is fixed and the target interval is interior in every use).
    """
    t = np.array(t0s, dtype=np.float64)
    m = t.size
    steps = np.full(m, -1, dtype=np.int64)
    hit = (t > lo) & (t < hi)
    steps[hit] = 0
    active = ~hit
    for j in range(1, n_max + 1):
        frozen = active & (np.abs(t) >= EDGE)
        if frozen.any():
            active &= ~frozen
        if not active.any():
            break
        tn = step_many(kind, alpha, eps, t)
        t = np.where(active, tn, t)
        hit = active & (t > lo) & (t < hi)
        if hit.any():
            steps[hit] = j
            active &= ~hit
    return steps


def basin_entry(kind: int, alpha: float, eps: float, t0s, lo: float, hi: float,
                n_max: int, hold: int) -> np.ndarray:
    """First step j with t_j..t_{j+hold} all inside [lo, hi], per seed.

    Returns -1 for members that never enter and stay within n_max total
    steps.  No degeneracy freeze: the sink interval may contain an endpoint.
    """
    t = np.array(t0s, dtype=np.float64)
    m = t.size
    entry = np.full(m, -1, dtype=np.int64)
    run = np.zeros(m, dtype=np.int64)
    inside = (t >= lo) & (t <= hi)
    run[inside] = 1
    done = run >= hold + 1
    entry[done] = 0
    active = ~done
    for j in range(1, n_max + 1):
        if not active.any():
            break
        tn = step_many(kind, alpha, eps, t)
        t = np.where(active, tn, t)
        inside = (t >= lo) & (t <= hi)
        run = np.where(active & inside, run + 1, np.where(active, 0, run))
        newdone = active & (run >= hold + 1)
        if newdone.any():
            entry[newdone] = j - hold
            active &= ~newdone
    return entry


def neglog_sums(kind: int, alpha: float, eps: float, t0s, checkpoints):
    """Partial sums of -log|t_j| over the first N orbit points, per seed.

    ``checkpoints`` is an ascending list of N values; returns ``(sums, bad)``
    with ``sums`` of shape (m, len(checkpoints)).  Degenerate members freeze
    their accumulator (``bad[i]`` records the step).
    """
    t = np.array(t0s, dtype=np.float64)
    m = t.size
    cps = np.array(checkpoints, dtype=np.int64)
    q = cps.size
    sums = np.zeros((m, q), dtype=np.float64)
    acc = np.zeros(m, dtype=np.float64)
    bad = np.full(m, -1, dtype=np.int64)
    alive = np.ones(m, dtype=bool)
    ci = 0
    n_max = int(cps.max()) if q else 0
    with np.errstate(divide="ignore", invalid="ignore"):
        for j in range(n_max):
            newbad = alive & ((t == 0.0) | (np.abs(t) >= EDGE))
            if newbad.any():
                bad[newbad] = j
                alive &= ~newbad
            acc = np.where(alive, acc - np.log(np.abs(t)), acc)
            tn = step_many(kind, alpha, eps, t)
            t = np.where(alive, tn, t)
            while ci < q and j + 1 == cps[ci]:
                sums[:, ci] = acc
                ci += 1
    return sums, bad
