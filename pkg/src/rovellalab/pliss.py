"""Good-time selection in weight sequences: Pliss times, hyperbolic times,
and the two-stage positive-frequency pipeline.

Everything here works on finite sequences.  The shared primitive is a
running-floor scan: given weights a_1..a_N and a slope c, the selected times
are the n at which the cumulative sum of (a_j - c) touches its running
maximum, equivalently

    sum_{j=k+1}^{n} a_j >= c (n - k)   for every 0 <= k < n.

Classical counting: if a_j <= H for all j and the total sum is at least
c2 N, then the selected times for any slope c1 < c2 have frequency at least
zeta = (c2 - c1) / (H - c1).  The same scan run on negated weights selects
times whose trailing window sums stay *below* a slope, which is how the
recurrence conditions below are detected.

A hyperbolic time must win twice at once: trailing sums of the log
derivative weights psi drop at slope -c (uniform contraction backwards in
time) while trailing sums of the truncated log distances stay under slope
b c (the orbit did not linger near the singular set).  The
``abv0_pipeline`` automates the bookkeeping that makes both happen with
positive frequency: a cutoff H1 for the weights, a Pliss pass at slope
xi c, a recurrence radius r2 small enough that truncated distances average
below eps2, a second Pliss pass on those, and an intersection count that is
arithmetically forced to exceed theta N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    HypothesisViolationError,
    InputDomainError,
    SpecError,
    StructuralError,
)

__all__ = [
    "PlissReport",
    "HyperbolicTimeParams",
    "Abv0Constants",
    "Abv0Result",
    "InducedBoundReport",
    "pliss_times",
    "truncated_log_distance",
    "hyperbolic_times",
    "abv0_pipeline",
    "induced_time_bound",
]

_TOL = 1e-12


def _as_weights(a, name: str) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(a, dtype=np.float64))
    if arr.ndim != 1 or arr.size < 1:
        raise StructuralError(f"{name} must be a nonempty 1-d sequence")
    if not np.all(np.isfinite(arr)):
        raise InputDomainError(f"{name} must be finite")
    return arr


def _running_floor_times(a: np.ndarray, c: float) -> np.ndarray:
    """1-based times where cumsum(a - c) touches its running max (S_0 = 0).

    Equality counts as touching, up to an absolute slack of 1e-12.
    """
    s = np.cumsum(a - c)
    m = np.maximum(np.maximum.accumulate(s), 0.0)
    return np.nonzero(s >= m - _TOL)[0].astype(np.int64) + 1


@dataclass(frozen=True)
class PlissReport:
    times: np.ndarray = field(repr=False)
    count: int
    n: int
    zeta: float
    floor: float
    hypothesis_met: bool

    @property
    def frequency(self) -> float:
        return self.count / self.n


def pliss_times(a, c1: float, c2: float, H: float) -> PlissReport:
    """Times n with sum_{j=k+1}^{n} a_j >= c1 (n - k) for every k < n.

    Requires c1 < c2 <= H and every a_j <= H.  When the sequence averages at
    least c2 the count is guaranteed to reach the floor zeta * N with
    zeta = (c2 - c1)/(H - c1); ``hypothesis_met`` records whether that
    average held, and ``floor`` is only a promise when it did.
    """
    arr = _as_weights(a, "a")
    c1, c2, H = float(c1), float(c2), float(H)
    if not (math.isfinite(c1) and math.isfinite(c2) and math.isfinite(H)):
        raise SpecError("c1, c2, H must be finite")
    if not c1 < c2:
        raise SpecError(f"need c1 < c2, got c1={c1}, c2={c2}")
    if not c2 <= H:
        raise SpecError(f"need c2 <= H, got c2={c2}, H={H}")
    over = np.nonzero(arr > H)[0]
    if over.size:
        j = int(over[0])
        raise HypothesisViolationError(
            f"a[{j}]={arr[j]!r} exceeds the cap H={H}")
    times = _running_floor_times(arr, c1)
    n = arr.size
    zeta = (c2 - c1) / (H - c1)
    return PlissReport(times=times, count=int(times.size), n=int(n),
                       zeta=zeta, floor=zeta * n,
                       hypothesis_met=bool(np.sum(arr) >= c2 * n - _TOL))


def truncated_log_distance(dist: float, delta: float) -> float:
    """-log(dist) when dist <= delta, else 0; refuses dist <= 0."""
    dist = float(dist)
    delta = float(delta)
    if not 0.0 < delta:
        raise SpecError(f"delta must be positive, got {delta}")
    if not dist > 0.0:
        raise InputDomainError(
            f"distance must be positive, got {dist!r} (point on the "
            "singular set)")
    if dist > delta:
        return 0.0
    return -math.log(dist)


def _truncated_many(dist: np.ndarray, delta: float) -> np.ndarray:
    return np.where(dist <= delta, -np.log(dist), 0.0)


@dataclass(frozen=True)
class HyperbolicTimeParams:
    """Slope c, truncation radius delta, recurrence weight b, distance
    growth exponent beta.  b must stay below min(1/2, 1/(4 beta))."""

    c: float
    delta: float
    b: float
    beta: float = 1.0

    def __post_init__(self):
        for name in ("c", "delta", "b", "beta"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not (math.isfinite(self.c) and self.c > 0.0):
            raise SpecError(f"c must be positive, got {self.c}")
        if not 0.0 < self.delta < 1.0:
            raise SpecError(f"delta must lie in (0, 1), got {self.delta}")
        if not (math.isfinite(self.beta) and self.beta > 0.0):
            raise SpecError(f"beta must be positive, got {self.beta}")
        cap = min(0.5, 1.0 / (4.0 * self.beta))
        if not 0.0 < self.b < cap:
            raise SpecError(
                f"b must lie in (0, {cap}) for beta={self.beta}, got {self.b}")


def hyperbolic_times(psi, D, params: HyperbolicTimeParams,
                     verify: bool = True) -> np.ndarray:
    """1-based times h satisfying, for every 1 <= k <= h,

        sum_{i=h-k}^{h-1} psi_i <= -c k    and
        sum_{i=h-k}^{h-1} D_i   <= b c k.

    ``psi`` are log derivative weights, ``D`` truncated log distances at the
    same orbit positions.  Detection runs the running-floor scan on -psi and
    on -D; with ``verify`` each reported time is re-checked by a direct
    backward window scan (a detector bug raises StructuralError).
    """
    psi_arr = _as_weights(psi, "psi")
    d_arr = _as_weights(D, "D")
    if psi_arr.size != d_arr.size:
        raise StructuralError(
            f"psi and D must have equal length, got {psi_arr.size} "
            f"and {d_arr.size}")
    if np.any(d_arr < 0.0):
        raise InputDomainError("truncated log distances must be nonnegative")
    c = params.c
    bc = params.b * c
    times = np.intersect1d(_running_floor_times(-psi_arr, c),
                           _running_floor_times(-d_arr, -bc))
    if verify:
        for h in times.tolist():
            k = np.arange(1, h + 1, dtype=np.float64)
            back_psi = np.cumsum(psi_arr[h - 1::-1])
            back_d = np.cumsum(d_arr[h - 1::-1])
            if not (np.all(back_psi <= -c * k + _TOL)
                    and np.all(back_d <= bc * k + _TOL)):
                raise StructuralError(
                    f"detector reported h={h} but the backward scan "
                    "disagrees")
    return times


@dataclass(frozen=True)
class Abv0Constants:
    c: float
    xi: float
    zeta: float
    b: float
    beta: float
    rho: float
    r1: float
    r2: float
    gamma0: float
    gamma2: float
    gamma3: float
    H1: float
    theta1: float
    eps2: float
    theta2: float
    theta: float
    n: int


@dataclass(frozen=True)
class Abv0Result:
    times: np.ndarray = field(repr=False)
    count: int
    floor: float
    stage1_count: int
    stage2_count: int
    simultaneous_count: int
    constants: Abv0Constants
    failures: tuple[str, ...]

    @property
    def passed(self) -> bool:
        return not self.failures


def abv0_pipeline(psi, d_full, c: float, xi: float, zeta_target: float, *,
                  b: float | None = None, beta: float = 1.0,
                  rho: float | None = None, r1: float | None = None,
                  r2: float | None = None) -> Abv0Result:
    """Two-stage selection of simultaneous contraction/recurrence times.

    Inputs: ``psi`` of length N (log derivative weights, position j taken at
    the j-th orbit point) and ``d_full`` of length N+1 (raw distances to the
    singular set along the orbit, so position j+1 is the distance after j
    steps).  ``c`` is the target contraction slope, ``xi`` in (0, 1) the
    fraction of it demanded pointwise, ``zeta_target`` in (0, b c) the slope
    for the final forward-recurrence filter.

    Stages, with every constant recorded in the result:

    1. split c as gamma0 = (2+xi)/3, gamma2 = (1-xi)/3, gamma3 =
       gamma0 - gamma2; require the weights to average at least c
       ("liminf1") and, after cutting weights above H1 to zero, to average
       at least gamma3 c ("stage1-sum").  H1 is max of c, rho |log r1| and
       the largest weight observed at distance >= r1; the growth rate rho is
       estimated from the close approaches (floored at beta) unless given.
       A Pliss pass at slope xi c then yields times with frequency at least
       theta1 = gamma2 c / (H1 - xi c).
    2. pick eps2 = min(zeta, b c theta1)/2 and the largest dyadic radius
       r2 <= 2**-4 whose truncated log distances average at most eps2
       ("slow-recurrence" when even 2**-60 fails); a mirrored Pliss pass
       bounds trailing distance sums by slope b c with frequency at least
       theta2 = 1 - eps2/(b c).

    The intersection has frequency above theta = theta1 + theta2 - 1 >=
    theta1/2 by counting alone; times whose forward distance sums exceed
    slope zeta are then filtered out, and a final count below theta N is
    reported as "frequency-floor".  Hypothesis breakdowns are returned in
    ``failures``, never raised.
    """
    psi_arr = _as_weights(psi, "psi")
    d_arr = _as_weights(d_full, "d_full")
    n = psi_arr.size
    if d_arr.size != n + 1:
        raise StructuralError(
            f"d_full must have length len(psi)+1, got {d_arr.size} "
            f"for N={n}")
    if np.any(d_arr <= 0.0):
        raise InputDomainError(
            "distances must be positive (orbit touched the singular set)")
    c = float(c)
    xi = float(xi)
    zeta = float(zeta_target)
    beta = float(beta)
    if not (math.isfinite(c) and c > 0.0):
        raise SpecError(f"c must be positive, got {c}")
    if not 0.0 < xi < 1.0:
        raise SpecError(f"xi must lie in (0, 1), got {xi}")
    if not (math.isfinite(beta) and beta > 0.0):
        raise SpecError(f"beta must be positive, got {beta}")
    b_cap = min(0.5, 1.0 / (4.0 * beta))
    b = 0.5 * b_cap if b is None else float(b)
    if not 0.0 < b < b_cap:
        raise SpecError(f"b must lie in (0, {b_cap}) for beta={beta}, got {b}")
    if not 0.0 < zeta < b * c:
        raise SpecError(
            f"zeta_target must lie in (0, b*c)=(0, {b * c}), got {zeta}")
    r1 = 0.05 if r1 is None else float(r1)
    if not 0.0 < r1 < 1.0:
        raise SpecError(f"r1 must lie in (0, 1), got {r1}")

    gamma0 = (2.0 + xi) / 3.0
    gamma2 = (1.0 - xi) / 3.0
    gamma3 = gamma0 - gamma2

    failures: list[str] = []
    if not float(np.mean(psi_arr)) <= -c + _TOL:
        failures.append("liminf1")

    # weight cap from the close approaches: weights grow at most like
    # rho * (-log distance), so rho |log r1| caps everything closer than r1
    d_at = d_arr[:n]
    close = d_at < r1
    rho_est = beta
    if np.any(close):
        rho_est = max(rho_est,
                      float(np.max(np.abs(psi_arr[close])
                                   / (-np.log(d_at[close])))))
    rho_val = rho_est if rho is None else max(float(rho), beta)
    H1 = max(c, rho_val * abs(math.log(r1)))
    if not np.all(close):
        H1 = max(H1, float(np.max(np.abs(psi_arr[~close]))))

    neg = -psi_arr
    a1 = np.where(neg <= H1, neg, 0.0)
    if not float(np.sum(a1)) >= gamma3 * c * n - _TOL:
        failures.append("stage1-sum")
    times1 = _running_floor_times(a1, xi * c)
    theta1 = gamma2 * c / (H1 - xi * c)

    eps2 = 0.5 * min(zeta, b * c * theta1)
    theta2 = 1.0 - eps2 / (b * c)
    theta = theta1 + theta2 - 1.0

    d_tail = d_arr[1:]
    r2_val = math.nan
    if r2 is None:
        for k in range(4, 61):
            cand = 2.0 ** (-k)
            if float(np.mean(_truncated_many(d_tail, cand))) <= eps2:
                r2_val = cand
                break
        if math.isnan(r2_val):
            failures.append("slow-recurrence")
    else:
        r2_val = float(r2)
        if not 0.0 < r2_val < 1.0:
            raise SpecError(f"r2 must lie in (0, 1), got {r2_val}")
        if float(np.mean(_truncated_many(d_tail, r2_val))) > eps2:
            failures.append("slow-recurrence")
    if math.isnan(r2_val):
        times = np.empty(0, dtype=np.int64)
        times2 = times
        simultaneous = times
    else:
        d2 = _truncated_many(d_tail, r2_val)
        times2 = _running_floor_times(-d2, -b * c)
        simultaneous = np.intersect1d(times1, times2)
        fwd = np.cumsum(_truncated_many(d_arr[:n], r2_val))
        keep = fwd[simultaneous - 1] <= zeta * simultaneous + _TOL
        times = simultaneous[keep]

    count = int(times.size)
    if not failures and count < theta * n:
        failures.append("frequency-floor")

    constants = Abv0Constants(c=c, xi=xi, zeta=zeta, b=b, beta=beta,
                              rho=rho_val, r1=r1, r2=r2_val, gamma0=gamma0,
                              gamma2=gamma2, gamma3=gamma3, H1=H1,
                              theta1=theta1, eps2=eps2, theta2=theta2,
                              theta=theta, n=int(n))
    return Abv0Result(times=times, count=count, floor=theta * n,
                      stage1_count=int(times1.size),
                      stage2_count=int(times2.size),
                      simultaneous_count=int(simultaneous.size),
                      constants=constants, failures=tuple(failures))


@dataclass(frozen=True)
class InducedBoundReport:
    ok: bool
    first_violation: int | None
    bound_slope: float
    k_checked: int


def induced_time_bound(q, p, d_entries, n_cap: int, c_slope: float,
                       rho: float) -> InducedBoundReport:
    """Linear bound on accumulated induced return times.

    Block i spends q_i steps away from the singular set (q_i <= n_cap by
    hypothesis, violations raised with the offending index) and then p_i
    bound steps, controlled by the truncated log distance at the block entry
    through p_i <= c_slope * d_entries[i].  Under those hypotheses the
    partial sums of q_i + p_i stay below k * n_cap / (1 - rho * c_slope);
    the report records the first k where the data breaks that line, if any.
    """
    q_arr = _as_weights(q, "q")
    p_arr = _as_weights(p, "p")
    d_arr = _as_weights(d_entries, "d_entries")
    if not q_arr.size == p_arr.size == d_arr.size:
        raise StructuralError(
            f"q, p, d_entries must share a length, got {q_arr.size}, "
            f"{p_arr.size}, {d_arr.size}")
    n_cap = float(n_cap)
    c_slope = float(c_slope)
    rho = float(rho)
    if not n_cap >= 1.0:
        raise SpecError(f"n_cap must be at least 1, got {n_cap}")
    if not (c_slope > 0.0 and rho > 0.0):
        raise SpecError("c_slope and rho must be positive")
    if not rho * c_slope < 1.0:
        raise SpecError(
            f"need rho * c_slope < 1, got {rho * c_slope}")
    if np.any(q_arr < 0.0) or np.any(p_arr < 0.0) or np.any(d_arr < 0.0):
        raise InputDomainError("q, p, d_entries must be nonnegative")
    over_q = np.nonzero(q_arr > n_cap + _TOL)[0]
    if over_q.size:
        i = int(over_q[0])
        raise HypothesisViolationError(
            f"q[{i}]={q_arr[i]!r} exceeds the cap n_cap={n_cap}")
    over_p = np.nonzero(p_arr > c_slope * d_arr + _TOL)[0]
    if over_p.size:
        i = int(over_p[0])
        raise HypothesisViolationError(
            f"p[{i}]={p_arr[i]!r} exceeds c_slope * d_entries[{i}]="
            f"{c_slope * d_arr[i]!r}")
    bound_slope = n_cap / (1.0 - rho * c_slope)
    partial = np.cumsum(q_arr + p_arr)
    k = np.arange(1, q_arr.size + 1, dtype=np.float64)
    viol = np.nonzero(partial > bound_slope * k)[0]
    if viol.size:
        return InducedBoundReport(ok=False, first_violation=int(viol[0]) + 1,
                                  bound_slope=bound_slope,
                                  k_checked=int(q_arr.size))
    return InducedBoundReport(ok=True, first_violation=None,
                              bound_slope=bound_slope,
                              k_checked=int(q_arr.size))
