"""Shared reference implementations used by the module tests.

Everything here is written for clarity, not speed: quadratic loops,
no early exits, no shared state with the library code.  When a test
compares library output against one of these, a disagreement means
the fast path broke, not the oracle.
"""

import numpy as np


def running_floor_times_ref(values, slope, offset, tol=1e-12):
    """Indices n >= 1 where every tail sum of ``values`` clears a linear floor.

    n qualifies when sum(values[k:n]) >= slope * (n - k) - offset for all
    0 <= k < n.  Direct O(N^2) evaluation via the prefix-sum matrix.
    """
    v = np.asarray(values, dtype=float)
    s = np.concatenate(([0.0], np.cumsum(v)))
    out = []
    for n in range(1, v.size + 1):
        ok = True
        for k in range(n):
            if s[n] - s[k] < slope * (n - k) - offset - tol:
                ok = False
                break
        if ok:
            out.append(n)
    return np.asarray(out, dtype=np.int64)


def pliss_times_ref(a, c1, cap, offset, tol=1e-12):
    """Pliss-style selection: times where trailing sums of ``a`` beat c1.

    ``cap`` and the classical frequency bound are checked by the caller;
    selection itself only depends on the slope.
    """
    return running_floor_times_ref(np.asarray(a, dtype=float), c1, offset, tol=tol)


def hyperbolic_times_ref(psi, log_dist, c, b, tol=1e-12):
    """Backward-scan definition of hyperbolic times.

    n is hyperbolic when every trailing window ending at n contracts and
    stays away from the singular set:
      sum(psi[k:n])      <= -c * (n - k)      for all 0 <= k < n
      sum(log_dist[k:n]) <= b * c * (n - k)   for all 0 <= k < n
    """
    psi = np.asarray(psi, dtype=float)
    d = np.asarray(log_dist, dtype=float)
    s = np.concatenate(([0.0], np.cumsum(psi)))
    sd = np.concatenate(([0.0], np.cumsum(d)))
    out = []
    for n in range(1, psi.size + 1):
        ok = True
        for k in range(n):
            if s[n] - s[k] > -c * (n - k) + tol:
                ok = False
                break
            if sd[n] - sd[k] > b * c * (n - k) + tol:
                ok = False
                break
        if ok:
            out.append(n)
    return np.asarray(out, dtype=np.int64)


def step_ref(kind, alpha, eps, t):
    """Plain-Python single step, kept deliberately branchy and slow."""
    if kind == 2:
        return 1.0 - 2.0 * abs(t)
    if t >= 0.0:
        if kind == 1:
            base = 1.0 - 2.0 * t ** alpha
        else:
            base = 1.0 - 2.0 * (t * (2.0 - t)) ** alpha
    else:
        if kind == 1:
            base = 1.0 - 6.0 * t ** 4 + 4.0 * t ** 6
        else:
            base = 1.0 - 2.0 * (-t) ** alpha
    if kind == 3:
        base = (1.0 - eps) * base - eps
    if base > 1.0:
        base = 1.0
    elif base < -1.0:
        base = -1.0
    return base


def deriv_ref(kind, alpha, eps, t):
    """Unsigned one-sided derivative magnitude matching ``step_ref``."""
    if kind == 2:
        return 2.0
    if t >= 0.0:
        if kind == 1:
            mag = 2.0 * alpha * t ** (alpha - 1.0)
        else:
            mag = 4.0 * alpha * (1.0 - t) * (t * (2.0 - t)) ** (alpha - 1.0)
    else:
        if kind == 1:
            mag = 24.0 * (-t) ** 3 * (1.0 - t * t)
        else:
            mag = 2.0 * alpha * (-t) ** (alpha - 1.0)
    if kind == 3:
        mag = (1.0 - eps) * mag
    return mag
