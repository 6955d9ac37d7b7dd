"""Statistical probes of the interval quotients: recurrence, densities,
expansion/recurrence conditions, basins, and return-time integrability.

Everything here is empirical: orbits are finite, estimators are frozen
(seeded), and each probe returns a report rather than raising when the
measured quantity merely fails the target.  Exceptions are reserved for
malformed inputs and degenerate orbits.

Throughout, distance to the singular set is |t| (the critical point sits at
0), the log-derivative weight is psi = -log|map'|, and truncated log
distances follow ``pliss.truncated_log_distance``.

One numerical trap is handled here rather than in the kernels: tent-map
orbits in floating point lose one significant bit per step and collapse
onto the fixed point -1 within about 55 steps.  ``density_histogram``
therefore iterates the tent map exactly on odd rationals p/q with a random
odd 128-bit denominator (the parity is preserved by p -> q - 2|p|, so the
orbit can never land on 0 or the endpoints, and its period is astronomically
long); the smooth families mix mantissa bits and are iterated in doubles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from . import _kernels
from ._kernels.fallback import _deriv_scalar, _step_scalar
from .errors import (
    DegeneracyError,
    HypothesisViolationError,
    InputDomainError,
    SpecError,
    StructuralError,
)
from .flow_model import SaddleSpec
from .interval_maps import ConjugacyTable, MapKind, MapSpec, find_fixed_points

__all__ = [
    "RecurrenceReport",
    "OrbitStats",
    "ConditionProbeReport",
    "BasinReport",
    "IntegrabilityReport",
    "EnsembleIntegrability",
    "InvarianceReport",
    "recurrence_fraction",
    "random_orbit",
    "density_histogram",
    "slow_recurrence_probe",
    "condition_A_probe",
    "condition_C_probe",
    "condition_D_probe",
    "nonflatness_probe",
    "abv0_orbit_driver",
    "basin_fraction",
    "log_dist_integrability",
    "integrability_ensemble",
    "conjugacy_sampler",
    "pushforward_invariance_check",
]


# ---------------------------------------------------------------------------
# recurrence to the critical neighborhood
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RecurrenceReport:
    delta: float
    n_max: int
    seeds: int
    seed: int
    fraction: float
    visited: int
    steps: np.ndarray = field(repr=False)


def recurrence_fraction(spec: MapSpec, delta: float, n_max: int, seeds: int,
                        seed: int = 0) -> RecurrenceReport:
    """Fraction of random starts whose orbit visits (-delta, delta).

    Starts are uniform on (-1, 1) from ``default_rng(seed)``; a visit at
    step 0 (the start itself) counts.  ``steps`` holds the first visit step
    per seed, -1 for never.
    """
    if not 0.0 < delta < 1.0:
        raise SpecError(f"delta must lie in (0, 1), got {delta}")
    if n_max < 1 or seeds < 1:
        raise InputDomainError("n_max and seeds must be positive")
    rng = np.random.default_rng(seed)
    t0s = rng.uniform(-1.0, 1.0, size=int(seeds))
    code, alpha, eps = spec.kernel_args
    steps = _kernels.first_visit(code, alpha, eps, t0s, -delta, delta,
                                 int(n_max))
    visited = int(np.count_nonzero(steps >= 0))
    return RecurrenceReport(delta=float(delta), n_max=int(n_max),
                            seeds=int(seeds), seed=int(seed),
                            fraction=visited / int(seeds), visited=visited,
                            steps=steps)


# ---------------------------------------------------------------------------
# orbit histograms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OrbitStats:
    n: int
    seed: int
    birkhoff: dict
    edges: np.ndarray = field(repr=False)
    masses: np.ndarray = field(repr=False)
    visits: dict
    tv_cauchy: float
    restarts: int


def _tent_exact_orbit(rng: np.random.Generator, n: int) -> np.ndarray:
    # odd/odd rational p/q: the parity survives p -> q - 2|p|, so the orbit
    # avoids 0 and the endpoints forever
    q = (1 << 127) | int(rng.integers(0, 1 << 63)) << 1 | 1
    p = (int(rng.integers(1, 1 << 62)) << 1 | 1) * (1 if rng.integers(2) else -1)
    qf = float(q)
    out = np.empty(n + 1, dtype=np.float64)
    for j in range(n + 1):
        out[j] = p / qf
        p = q - 2 * abs(p)
    return out


def random_orbit(spec: MapSpec, rng: np.random.Generator, n: int,
                 max_draws: int = 5):
    """A non-degenerate length-n orbit with factors, from a random start.

    Returns (t, meridian, parallel, redraws) with t of length n+1.  Starts
    are uniform on (-1, 1); for the smooth kinds an orbit that reaches the
    critical point or an endpoint is redrawn (at most ``max_draws`` times;
    deep critical visits park the next points within float resolution of
    the endpoints, so at length 1e6 roughly half of all starts degenerate).
    The tent map takes the exact odd-rational path instead, which cannot
    degenerate; its meridian factor is the constant branch slope 2 and the
    parallel factor follows from the angle-doubling ratio.
    """
    if n < 1:
        raise InputDomainError(f"need n >= 1, got {n}")
    if spec.kind is MapKind.TENT:
        t = _tent_exact_orbit(rng, int(n))
        mer = np.full(int(n), 2.0)
        par = 2.0 * np.abs(np.cos(0.5 * np.pi * t[1:])
                           / np.cos(0.5 * np.pi * t[:-1]))
        return t, mer, par, 0
    code, alpha, eps = spec.kernel_args
    redraws = 0
    while True:
        t0 = float(rng.uniform(-1.0, 1.0))
        t, mer, par, bad = _kernels.orbit_factors(code, alpha, eps, t0,
                                                  int(n))
        if bad < 0:
            return t, mer, par, redraws
        redraws += 1
        if redraws > max_draws:
            raise DegeneracyError(
                f"orbit degenerated on {max_draws} consecutive draws")


def density_histogram(spec: MapSpec, seed: int, n: int,
                      bins: int = 50) -> OrbitStats:
    """Histogram and Birkhoff statistics of one orbit of length n.

    The start is uniform on (-1, 1); an orbit that degenerates (exact 0 or
    an endpoint within 1e-15) is redrawn, at most 5 times, with the redraws
    counted in ``restarts``.  ``tv_cauchy`` is the total-variation distance
    between the histogram of the first n//10 points and the full one, a
    self-consistency proxy for the pair (n, 10n).
    """
    if n < 10:
        raise InputDomainError(f"need n >= 10, got {n}")
    if bins < 2:
        raise InputDomainError(f"need at least 2 bins, got {bins}")
    rng = np.random.default_rng(seed)
    t, _mer, _par, restarts = random_orbit(spec, rng, int(n))
    edges = np.linspace(-1.0, 1.0, int(bins) + 1)
    counts_full, _ = np.histogram(t, bins=edges)
    masses = counts_full / t.size
    head = t[: max(1, t.size // 10)]
    counts_head, _ = np.histogram(head, bins=edges)
    masses_head = counts_head / head.size
    tv = 0.5 * float(np.sum(np.abs(masses - masses_head)))
    birkhoff = {
        "t": float(np.mean(t)),
        "t2": float(np.mean(t * t)),
        "abs_t": float(np.mean(np.abs(t))),
    }
    visits = {
        "near_critical": int(np.count_nonzero(np.abs(t) < 0.05)),
        "left": int(np.count_nonzero(t < 0.0)),
        "right": int(np.count_nonzero(t > 0.0)),
    }
    return OrbitStats(n=int(n), seed=int(seed), birkhoff=birkhoff,
                      edges=edges, masses=masses, visits=visits,
                      tv_cauchy=tv, restarts=restarts)


# ---------------------------------------------------------------------------
# condition probes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConditionProbeReport:
    condition: str
    parameters: dict
    passed: bool
    worst_witness: float
    details: dict


def slow_recurrence_probe(orbit_t, delta_list, epsilon: float) -> ConditionProbeReport:
    """Check that truncated log distances average below epsilon.

    For each delta, the estimator is the largest running average of
    D_delta(t_j) = -log|t_j| 1{|t_j| <= delta} over the final decade of the
    orbit (m from N//10 to N), a finite-orbit stand-in for the limsup.  The
    probe passes if any delta in the list meets epsilon.
    """
    t = np.asarray(orbit_t, dtype=np.float64)
    if t.ndim != 1 or t.size < 10:
        raise StructuralError("orbit must be 1-d with at least 10 points")
    if np.any(t == 0.0):
        raise InputDomainError("orbit touches the critical point exactly")
    if not epsilon > 0.0:
        raise SpecError(f"epsilon must be positive, got {epsilon}")
    deltas = [float(d) for d in np.atleast_1d(delta_list)]
    if not deltas or any(not 0.0 < d < 1.0 for d in deltas):
        raise SpecError("every delta must lie in (0, 1)")
    dist = np.abs(t)
    n = t.size
    lo = max(1, n // 10)
    estimates = {}
    for d in deltas:
        vals = np.where(dist <= d, -np.log(dist), 0.0)
        running = np.cumsum(vals) / np.arange(1, n + 1)
        estimates[repr(d)] = float(np.max(running[lo - 1:]))
    best = min(estimates.values())
    return ConditionProbeReport(
        condition="slow-recurrence",
        parameters={"delta_list": deltas, "epsilon": float(epsilon),
                    "n": int(n)},
        passed=bool(best <= epsilon),
        worst_witness=best,
        details={"estimates": estimates})


def condition_A_probe(spec: MapSpec, n: int = 1000) -> ConditionProbeReport:
    """Contraction weights along the post-critical orbit decay linearly.

    Follows the orbit of the critical value and fits the Birkhoff sums of
    psi = -log|map'| with a line; the probe passes when the slope is
    negative (derivatives along the post-critical orbit grow
    exponentially).  For the sphere-quotient family the critical value is
    the flat endpoint +1 itself, so the first point is skipped (recorded in
    the parameters) and the fitted rate comes out as -log(2 alpha), the
    escape rate at the fixed endpoint.
    """
    if spec.kind is MapKind.F0:
        raise SpecError(
            "the post-critical orbit of the ball quotient lands on the "
            "superattracting endpoint; the probe targets the tent-conjugate "
            "kinds")
    if n < 10:
        raise InputDomainError(f"need n >= 10, got {n}")
    code, alpha, eps = spec.kernel_args
    # plain scalar iteration: the post-critical orbit is allowed to sit on
    # the repelling endpoint -1, which the array kernels treat as degenerate
    t = _step_scalar(code, alpha, eps, 0.0)
    skipped = False
    if _deriv_scalar(code, alpha, eps, t) < 1e-12:
        t = _step_scalar(code, alpha, eps, t)
        skipped = True
    sums = np.empty(int(n))
    acc = 0.0
    for j in range(int(n)):
        d = _deriv_scalar(code, alpha, eps, t)
        if d <= 0.0:
            raise DegeneracyError(
                f"flat derivative at step {j} of the post-critical orbit",
                index=j)
        acc -= math.log(d)
        sums[j] = acc
        t = _step_scalar(code, alpha, eps, t)
    m = np.arange(1, n + 1, dtype=np.float64)
    rate = float(np.polyfit(m, sums, 1)[0])
    return ConditionProbeReport(
        condition="A",
        parameters={"n": int(n), "skipped_flat_start": skipped},
        passed=bool(rate < 0.0),
        worst_witness=rate,
        details={"rate": rate, "final_sum": float(sums[-1])})


def condition_C_probe(spec: MapSpec, u_radius: float = 0.05, n: int = 40,
                      grid_size: int = 4096) -> ConditionProbeReport:
    """Uniform expansion off the critical neighborhood.

    Tracks a start grid, keeps at step m only the windows whose first m
    points all stayed outside (-u_radius, u_radius), and records M_m, the
    max Birkhoff sum of psi = -log|map'| among the survivors.  A line
    K - c m is fitted, K is lifted by the largest positive residual so the
    bound holds on all of the data, and the probe passes when c > 0.  For
    the tent map the fit is exact with c = log 2.
    """
    if not 0.0 < u_radius < 1.0:
        raise SpecError(f"u_radius must lie in (0, 1), got {u_radius}")
    if n < 3 or grid_size < 8:
        raise InputDomainError("need n >= 3 and grid_size >= 8")
    code, alpha, eps = spec.kernel_args
    t = np.linspace(-1.0, 1.0, int(grid_size) + 2)[1:-1]
    alive = np.abs(t) >= u_radius
    sums = np.zeros(t.size)
    peaks = []
    m_used = 0
    for _ in range(int(n)):
        if not alive.any():
            break
        with np.errstate(divide="ignore", invalid="ignore"):
            psi = -np.log(_kernels.deriv_many(code, alpha, eps, t))
        sums = np.where(alive, sums + psi, sums)
        peaks.append(float(np.max(sums[alive])))
        m_used += 1
        t = _kernels.step_many(code, alpha, eps, t)
        alive &= np.abs(t) >= u_radius
    if m_used < 3:
        raise DegeneracyError(
            f"only {m_used} window lengths had surviving starts; enlarge "
            "grid_size or shrink u_radius")
    m = np.arange(1, m_used + 1, dtype=np.float64)
    peaks_arr = np.asarray(peaks)
    slope, intercept = np.polyfit(m, peaks_arr, 1)
    c = -float(slope)
    resid = peaks_arr - (intercept - c * m)
    K = float(intercept + max(0.0, float(np.max(resid))))
    return ConditionProbeReport(
        condition="C",
        parameters={"u_radius": float(u_radius), "n": int(n),
                    "grid_size": int(grid_size)},
        passed=bool(c > 0.0),
        worst_witness=c,
        details={"c": c, "K": K, "m_used": int(m_used),
                 "final_survivors": int(np.count_nonzero(alive))})


def condition_D_probe(spec: MapSpec, delta: float = 0.05, n: int = 100_000,
                      seed: int = 0) -> ConditionProbeReport:
    """Bounded weight sums across excursions away from (-delta, delta).

    Splits one random orbit at its visits to the critical neighborhood,
    sums psi = -log|map'| over each excursion strictly between consecutive
    visits (back-to-back visits give the empty sum 0), and reports the
    largest as kappa.  The maximum is re-verified against an independent
    direct summation of the worst block.
    """
    if not 0.0 < delta < 1.0:
        raise SpecError(f"delta must lie in (0, 1), got {delta}")
    if n < 100:
        raise InputDomainError(f"need n >= 100, got {n}")
    rng = np.random.default_rng(seed)
    t, mer, _par, _redraws = random_orbit(spec, rng, int(n))
    psi = -np.log(mer)
    inside = np.nonzero(np.abs(t[:n]) < delta)[0]
    if inside.size < 2:
        return ConditionProbeReport(
            condition="D",
            parameters={"delta": float(delta), "n": int(n), "seed": int(seed)},
            passed=False, worst_witness=math.nan,
            details={"excursions": 0,
                     "note": "fewer than two visits; no excursion to bound"})
    cum = np.concatenate([[0.0], np.cumsum(psi)])
    starts = inside[:-1] + 1
    ends = inside[1:]
    sums = cum[ends] - cum[starts]
    worst = int(np.argmax(sums))
    kappa = float(sums[worst])
    check = float(np.sum(psi[starts[worst]:ends[worst]]))
    if abs(check - kappa) > 1e-9 * max(1.0, abs(kappa)):
        raise StructuralError("excursion bookkeeping disagrees with the "
                              "direct block sum")
    return ConditionProbeReport(
        condition="D",
        parameters={"delta": float(delta), "n": int(n), "seed": int(seed)},
        passed=True,
        worst_witness=kappa,
        details={"excursions": int(sums.size), "kappa": kappa,
                 "mean_excursion_sum": float(np.mean(sums)),
                 "mean_excursion_length": float(np.mean(ends - starts))})


def nonflatness_probe(spec: MapSpec) -> ConditionProbeReport:
    """Power-law behavior of the derivative at the critical point.

    Fits log|map'| against log|t| separately on each side over
    |t| in [1e-8, 1e-2]; both slopes should equal the critical order minus
    one, and the prefactors (the ratios |map'| / |t|**(alpha-1)) should be
    pinched between constants.  The tent map has order 1: flat slopes, both
    prefactors equal to 2.
    """
    code, alpha, eps = spec.kernel_args
    order = 1.0 if spec.kind is MapKind.TENT else spec.alpha
    grid = np.geomspace(1e-8, 1e-2, 50)
    out = {}
    ratios_bound = 0.0
    for label, side in (("right", grid), ("left", -grid)):
        d = _kernels.deriv_many(code, alpha, eps, side)
        slope, intercept = np.polyfit(np.log(np.abs(side)), np.log(d), 1)
        ratio = d / np.abs(side) ** (order - 1.0)
        out[f"{label}_slope"] = float(slope)
        out[f"{label}_const"] = float(np.exp(intercept))
        spread = float(np.max(ratio) / np.min(ratio))
        out[f"{label}_ratio_spread"] = spread
        ratios_bound = max(ratios_bound, spread)
    worst = max(abs(out["left_slope"] - (order - 1.0)),
                abs(out["right_slope"] - (order - 1.0)))
    passed = worst < 0.05 and ratios_bound < 1.1
    return ConditionProbeReport(
        condition="nonflatness",
        parameters={"alpha": order},
        passed=bool(passed),
        worst_witness=float(worst),
        details=out)


def abv0_orbit_driver(spec: MapSpec, seed: int, n: int, xi: float = 0.5,
                      b: float = 0.2, beta: float = 1.0,
                      r1: float = 0.05):
    """Two-stage time selection fed by one random orbit.

    Measures everything the pipeline needs from the orbit itself: weights
    psi = -log|map'|, raw distances |t_j|, the slope c as 90% of the
    observed mean expansion, and the recurrence target as half of b*c.  The
    remaining constants are left to the pipeline's own estimation.
    """
    from .pliss import abv0_pipeline

    if n < 100:
        raise InputDomainError(f"need n >= 100, got {n}")
    rng = np.random.default_rng(seed)
    t, mer, _par, _redraws = random_orbit(spec, rng, int(n))
    psi = -np.log(mer)
    c = 0.9 * float(np.mean(-psi))
    if not c > 0.0:
        raise HypothesisViolationError(
            f"orbit shows no mean expansion (c={c}); the pipeline "
            "hypotheses are empty here")
    return abv0_pipeline(psi, np.abs(t), c, xi, 0.5 * b * c,
                         b=b, beta=beta, rho=None, r1=r1, r2=None)


# ---------------------------------------------------------------------------
# basin of the attracting fixed point
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BasinReport:
    sink: float
    trap_lo: float
    trap_hi: float
    n_max: int
    hold: int
    grid_size: int
    fraction: float
    entered: int
    entry_steps: np.ndarray = field(repr=False)


def _trap_boundary(spec: MapSpec, start: float, direction: float) -> float:
    """March from the sink until |map'| reaches 1, then bisect the crossing."""
    code, alpha, eps = spec.kernel_args

    def excess(t: float) -> float:
        return _deriv_scalar(code, alpha, eps, t) - 1.0

    h = 1e-3 * direction
    t = start + h
    while -1.0 < t < 1.0 and excess(t) < 0.0:
        t += h
    if not -1.0 < t < 1.0:
        return max(-1.0, min(1.0, t))
    return float(brentq(excess, t - h, t, xtol=1e-12))


def basin_fraction(spec: MapSpec, sink: float, n_max: int, grid_size: int,
                   hold: int = 10) -> BasinReport:
    """Fraction of a uniform start grid absorbed by the sink.

    ``sink`` must match an attracting fixed point of the map (checked
    against :func:`find_fixed_points`).  The trapping window is grown from
    the sink to where |map'| reaches 1; a start counts once its orbit
    enters the window and stays for ``hold`` further steps.
    """
    if n_max < 1 or grid_size < 2 or hold < 0:
        raise InputDomainError("n_max, grid_size must be positive, hold >= 0")
    sink = float(sink)
    fps = find_fixed_points(spec)
    match = [fp for fp in fps if abs(fp.location - sink) < 1e-6]
    if not match:
        raise HypothesisViolationError(
            f"no fixed point within 1e-6 of sink={sink}")
    if match[0].stability != "attracting":
        raise HypothesisViolationError(
            f"fixed point at {match[0].location} is {match[0].stability}, "
            "not attracting")
    lo = _trap_boundary(spec, sink, -1.0)
    hi = _trap_boundary(spec, sink, +1.0)
    code, alpha, eps = spec.kernel_args
    grid = np.linspace(-1.0, 1.0, int(grid_size))
    entry = _kernels.basin_entry(code, alpha, eps, grid, lo, hi, int(n_max),
                                 int(hold))
    entered = int(np.count_nonzero(entry >= 0))
    return BasinReport(sink=sink, trap_lo=lo, trap_hi=hi, n_max=int(n_max),
                       hold=int(hold), grid_size=int(grid_size),
                       fraction=entered / int(grid_size), entered=entered,
                       entry_steps=entry)


# ---------------------------------------------------------------------------
# return-time integrability
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IntegrabilityReport:
    checkpoints: tuple
    averages: tuple
    rel_diffs: tuple
    diverged: bool
    tau0: float


def log_dist_integrability(orbit_t, s: SaddleSpec, tau0: float = 1.0,
                           checkpoints=(10_000, 100_000, 1_000_000)) -> IntegrabilityReport:
    """Running averages of the return time tau0 - log|t|/lambda1.

    Averages are taken over the first N orbit points for each checkpoint N;
    the report flags divergence when consecutive checkpoint averages differ
    by more than 5%.
    """
    t = np.asarray(orbit_t, dtype=np.float64)
    cps = tuple(int(c) for c in checkpoints)
    if len(cps) < 2 or any(c < 1 for c in cps) or list(cps) != sorted(set(cps)):
        raise StructuralError("checkpoints must be >= 2 distinct ascending "
                              "positive values")
    if t.ndim != 1 or t.size < cps[-1]:
        raise StructuralError(
            f"orbit of length {t.size} cannot cover checkpoint {cps[-1]}")
    if np.any(t == 0.0):
        raise InputDomainError("orbit touches the stable manifold exactly")
    if not float(tau0) > 0.0:
        raise SpecError(f"tau0 must be positive, got {tau0}")
    neglog = -np.log(np.abs(t))
    cums = np.cumsum(neglog)
    avgs = tuple(float(tau0) + float(cums[c - 1]) / c / s.lambda1 for c in cps)
    rels = tuple(abs(avgs[i + 1] - avgs[i]) / avgs[i]
                 for i in range(len(avgs) - 1))
    return IntegrabilityReport(checkpoints=cps, averages=avgs,
                               rel_diffs=rels,
                               diverged=bool(any(r > 0.05 for r in rels)),
                               tau0=float(tau0))


@dataclass(frozen=True)
class EnsembleIntegrability:
    checkpoints: tuple
    averages: np.ndarray = field(repr=False)
    rel_diffs: np.ndarray = field(repr=False)
    diverged: bool
    seeds: int
    seed: int
    tau0: float
    bad: np.ndarray = field(repr=False)


def integrability_ensemble(spec: MapSpec, s: SaddleSpec, seeds: int,
                           checkpoints=(10_000, 100_000, 1_000_000),
                           seed: int = 0,
                           tau0: float = 1.0) -> EnsembleIntegrability:
    """Checkpoint return-time averages across random starts, kernel-driven.

    ``rel_diffs`` holds, per seed, the relative change between the last two
    checkpoint averages; the ensemble counts as diverged when any seed moves
    more than 5%.
    """
    cps = tuple(int(c) for c in checkpoints)
    if len(cps) < 2 or any(c < 1 for c in cps) or list(cps) != sorted(set(cps)):
        raise StructuralError("checkpoints must be >= 2 distinct ascending "
                              "positive values")
    if seeds < 1:
        raise InputDomainError(f"seeds must be positive, got {seeds}")
    if not float(tau0) > 0.0:
        raise SpecError(f"tau0 must be positive, got {tau0}")
    rng = np.random.default_rng(seed)
    t0s = rng.uniform(-1.0, 1.0, size=int(seeds))
    code, alpha, eps = spec.kernel_args
    sums, bad = _kernels.neglog_sums(code, alpha, eps, t0s, np.asarray(cps))
    valid = bad < 0
    if not np.any(valid):
        raise DegeneracyError(
            "every member orbit degenerated before the last checkpoint")
    avgs = float(tau0) + sums / np.asarray(cps, dtype=np.float64) / s.lambda1
    # degenerate members stop accumulating mid-orbit; their checkpoint
    # averages say nothing about divergence, so they are masked out
    rels = np.where(valid,
                    np.abs(avgs[:, -1] - avgs[:, -2]) / avgs[:, -2],
                    np.nan)
    return EnsembleIntegrability(checkpoints=cps, averages=avgs,
                                 rel_diffs=rels,
                                 diverged=bool(np.any(rels[valid] > 0.05)),
                                 seeds=int(seeds), seed=int(seed),
                                 tau0=float(tau0), bad=bad)


# ---------------------------------------------------------------------------
# invariance of the pulled-back measure
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InvarianceReport:
    n_samples: int
    results: dict
    passed: bool


def conjugacy_sampler(table: ConjugacyTable) -> Callable:
    """Sampler for the invariant measure pulled back through a conjugacy.

    The tent map preserves the uniform distribution on (-1, 1); composing
    uniform samples with the inverse conjugacy therefore samples the
    absolutely continuous invariant measure of the conjugate map.
    """

    def sample(n: int, rng: np.random.Generator) -> np.ndarray:
        return table.invert(rng.uniform(-1.0, 1.0, size=int(n)))

    return sample


_DEFAULT_OBSERVABLES = {
    "x": lambda x: x,
    "x^2": lambda x: x * x,
    "cos_pi_x": lambda x: np.cos(np.pi * x),
}


def pushforward_invariance_check(step_fn: Callable, sampler: Callable,
                                 observables: dict | None = None,
                                 n_samples: int = 1_000_000,
                                 rng: np.random.Generator | None = None) -> InvarianceReport:
    """Paired test that a sampled measure is invariant under one map step.

    Draws samples X from ``sampler``, pushes them through ``step_fn`` and
    compares observable means before and after on the same draw: for an
    invariant measure each paired mean difference is 0 up to Monte Carlo
    noise, so a difference is accepted within 3 standard errors.
    """
    if n_samples < 100:
        raise InputDomainError(f"need n_samples >= 100, got {n_samples}")
    obs = _DEFAULT_OBSERVABLES if observables is None else observables
    if not obs:
        raise StructuralError("need at least one observable")
    rng = np.random.default_rng(0) if rng is None else rng
    x = np.asarray(sampler(int(n_samples), rng), dtype=np.float64)
    if x.shape != (int(n_samples),):
        raise StructuralError("sampler must return a 1-d array of n samples")
    y = np.asarray(step_fn(x), dtype=np.float64)
    results = {}
    passed = True
    for name, phi in obs.items():
        diff = np.asarray(phi(y), dtype=np.float64) - np.asarray(
            phi(x), dtype=np.float64)
        mean = float(np.mean(diff))
        stderr = float(np.std(diff) / math.sqrt(diff.size))
        ok = abs(mean) <= 3.0 * stderr + 1e-12
        passed = passed and ok
        results[name] = {"mean_diff": mean, "stderr": stderr, "ok": ok}
    return InvarianceReport(n_samples=int(n_samples), results=results,
                            passed=passed)
