"""Skew products over the interval quotient: torus angles doubled each step.

The state is (t, Theta) with t in [-1, 1] driving the interval quotient map
and Theta a vector of k torus angles that double (mod 2 pi) every step.  The
chart into R^(1+2k),

    (t, Theta) |-> (sin(pi t/2), cos(theta_1) c, sin(theta_1) c, ...),
    c = cos(pi t/2),

wraps the cylinder onto a sphere-like surface: the circle t = const has
radius |cos(pi t/2)| and collapses to the poles at t = +-1.  (For k >= 2 the
image lies on the unit sphere of the weighted norm sqrt(t^2 + |z|^2 / k);
nothing below depends on k.)

One step stretches tangent vectors by two factors, both functions of t only:

* meridian factor: |quotient'(t)|, the stretch along the t direction;
* parallel factor: 2 |cos(pi g(t)/2) / cos(pi t/2)|, the stretch of the
  angle circles (angle doubling times the radius ratio).

The parallel factors telescope: their log sum over n steps equals
n log 2 + log|cos(pi t_n/2)| - log|cos(pi t_0/2)| exactly, which pins the
parallel Lyapunov exponent at log 2 for any non-degenerate orbit.

``domination_ratio`` measures how far the splitting into those two
directions is from breaking down: distance of the image from the poles over
a weighted power of the stretch factors.  Near the critical point t = 0 it
scales like |t| to the power alpha/2 - (gamma+omega)(alpha-1), so the sign
of that exponent decides whether the ratio stays bounded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from ._kernels.fallback import _deriv_scalar, _step_scalar
from .errors import (
    DegeneracyError,
    InputDomainError,
    PoleError,
    SpecError,
    StructuralError,
)
from .interval_maps import MapSpec, _check_point

__all__ = [
    "CocycleFactors",
    "BirkhoffFactors",
    "LyapunovEstimate",
    "EnsembleLyapunov",
    "DominationProfile",
    "chart_embed",
    "step_g",
    "cocycle_factors",
    "birkhoff_log_factors",
    "lyapunov_estimate",
    "lyapunov_ensemble",
    "domination_ratio",
    "domination_profile",
]

_HALF_PI = math.pi / 2.0
_TWO_PI = 2.0 * math.pi


def _check_angles(theta) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(theta, dtype=np.float64))
    if arr.ndim != 1 or arr.size < 1:
        raise InputDomainError("Theta must be a nonempty 1-d angle vector")
    if not np.all(np.isfinite(arr)):
        raise InputDomainError("Theta must be finite")
    return arr


def chart_embed(t: float, theta) -> np.ndarray:
    """Chart point in R^(1+2k): polar height then interleaved circle pairs."""
    t = _check_point(t)
    ang = _check_angles(theta)
    c = math.cos(_HALF_PI * t)
    out = np.empty(1 + 2 * ang.size, dtype=np.float64)
    out[0] = math.sin(_HALF_PI * t)
    out[1::2] = np.cos(ang) * c
    out[2::2] = np.sin(ang) * c
    return out


def step_g(spec: MapSpec, t: float, theta):
    """One skew-product step: quotient map on t, angle doubling on Theta."""
    t = _check_point(t)
    ang = _check_angles(theta)
    code, alpha, eps = spec.kernel_args
    return _step_scalar(code, alpha, eps, t), np.mod(2.0 * ang, _TWO_PI)


@dataclass(frozen=True)
class CocycleFactors:
    meridian: float
    parallel: float
    conorm: float
    norm: float
    degenerate: bool = False


def cocycle_factors(spec: MapSpec, t: float) -> CocycleFactors:
    """Meridian and parallel stretch factors of one step at t.

    At the critical point both factors vanish; that is reported through the
    ``degenerate`` flag rather than an exception.  At t = +-1 the parallel
    factor has a 0/0 pole (the source circle is already a point), which is
    refused.
    """
    t = _check_point(t)
    if abs(t) == 1.0:
        raise PoleError(f"parallel factor is singular at the pole t={t}")
    if t == 0.0:
        return CocycleFactors(0.0, 0.0, 0.0, 0.0, True)
    code, alpha, eps = spec.kernel_args
    mer = _deriv_scalar(code, alpha, eps, t)
    image = _step_scalar(code, alpha, eps, t)
    par = 2.0 * abs(math.cos(_HALF_PI * image) / math.cos(_HALF_PI * t))
    return CocycleFactors(meridian=mer, parallel=par,
                          conorm=min(mer, par), norm=max(mer, par))


@dataclass(frozen=True)
class BirkhoffFactors:
    """Orbit with running log sums of the two stretch factors.

    ``log_meridian[m-1]`` and ``log_parallel[m-1]`` hold the sums over the
    first m steps, m = 1..n.
    """

    orbit: np.ndarray = field(repr=False)
    log_meridian: np.ndarray = field(repr=False)
    log_parallel: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.log_meridian.size


def birkhoff_log_factors(spec: MapSpec, t0: float, n: int) -> BirkhoffFactors:
    t0 = _check_point(t0)
    if n < 1:
        raise InputDomainError(f"need at least one step, got n={n}")
    code, alpha, eps = spec.kernel_args
    t_arr, mer, par, bad = _kernels.orbit_factors(code, alpha, eps, t0, int(n))
    if bad >= 0:
        raise DegeneracyError(
            f"orbit degenerated at step {bad} (t={t_arr[bad]!r})", index=bad)
    return BirkhoffFactors(orbit=t_arr,
                           log_meridian=np.cumsum(np.log(mer)),
                           log_parallel=np.cumsum(np.log(par)))


@dataclass(frozen=True)
class LyapunovEstimate:
    meridian_exponent: float
    parallel_exponent: float
    n: int


def lyapunov_estimate(spec: MapSpec, t0: float, n: int) -> LyapunovEstimate:
    """Time averages of the log stretch factors over one orbit of n steps.

    The parallel exponent uses the telescoped closed form, so its only error
    is the O(1/n) boundary term; the meridian exponent is the plain Birkhoff
    average.  Requires n >= 1000.
    """
    t0 = _check_point(t0)
    if n < 1000:
        raise InputDomainError(f"exponent estimate needs n >= 1000, got {n}")
    code, alpha, eps = spec.kernel_args
    t_arr, mer, _par, bad = _kernels.orbit_factors(code, alpha, eps, t0, int(n))
    if bad < 0 and abs(t_arr[-1]) >= _kernels.EDGE:
        bad = int(n)
    if bad >= 0:
        raise DegeneracyError(
            f"orbit degenerated at step {bad} (t={t_arr[min(bad, n)]!r})",
            index=bad)
    mer_exp = float(np.sum(np.log(mer)) / n)
    par_exp = math.log(2.0) + (math.log(abs(math.cos(_HALF_PI * t_arr[-1])))
                               - math.log(abs(math.cos(_HALF_PI * t0)))) / n
    return LyapunovEstimate(meridian_exponent=mer_exp,
                            parallel_exponent=par_exp, n=int(n))


@dataclass(frozen=True)
class EnsembleLyapunov:
    meridian_exponents: np.ndarray = field(repr=False)
    parallel_exponents: np.ndarray = field(repr=False)
    n: int
    bad: np.ndarray = field(repr=False)

    @property
    def meridian_mean(self) -> float:
        good = self.meridian_exponents[self.bad < 0]
        return float(np.mean(good)) if good.size else math.nan

    @property
    def parallel_mean(self) -> float:
        good = self.parallel_exponents[self.bad < 0]
        return float(np.mean(good)) if good.size else math.nan


def lyapunov_ensemble(spec: MapSpec, t0s, n: int) -> EnsembleLyapunov:
    """Per-seed exponent estimates over an ensemble of start points.

    Degenerate members keep their partial sums; ``bad`` marks them and the
    ``*_mean`` properties skip them.
    """
    t0s = np.atleast_1d(np.asarray(t0s, dtype=np.float64))
    if t0s.ndim != 1 or t0s.size < 1:
        raise InputDomainError("t0s must be a nonempty 1-d array")
    if np.any(np.abs(t0s) > 1.0) or not np.all(np.isfinite(t0s)):
        raise InputDomainError("start points must lie in [-1, 1]")
    if n < 1000:
        raise InputDomainError(f"exponent estimate needs n >= 1000, got {n}")
    code, alpha, eps = spec.kernel_args
    smer, spar, _tend, bad = _kernels.cocycle_sums(code, alpha, eps, t0s, int(n))
    return EnsembleLyapunov(meridian_exponents=smer / n,
                            parallel_exponents=spar / n,
                            n=int(n), bad=bad)


def _domination_values(spec: MapSpec, ts: np.ndarray, gamma: float,
                       omega: float) -> np.ndarray:
    code, alpha, eps = spec.kernel_args
    g = _kernels.step_many(code, alpha, eps, ts)
    mer = _kernels.deriv_many(code, alpha, eps, ts)
    par = 2.0 * np.abs(np.cos(_HALF_PI * g) / np.cos(_HALF_PI * ts))
    norm = np.maximum(mer, par)
    return np.sqrt((1.0 - g) * (1.0 + g)) / (norm ** gamma * mer ** omega)


def _check_weights(gamma: float, omega: float) -> tuple[float, float]:
    gamma = float(gamma)
    omega = float(omega)
    if not gamma > 1.0:
        raise SpecError(f"gamma must exceed 1, got {gamma}")
    if not 0.0 <= omega:
        raise SpecError(f"omega must be nonnegative, got {omega}")
    return gamma, omega


def domination_ratio(spec: MapSpec, t: float, gamma: float, omega: float) -> float:
    """Pole distance of the image over norm^gamma * meridian^omega.

    The norm factor is the larger of the two stretch factors; the extra
    omega weight rides on the meridian factor, which is the larger one near
    the critical point, so the small-|t| scaling exponent is
    alpha/2 - (gamma+omega)(alpha-1).  Refused at t = 0 and t = +-1 where
    the ratio is 0/0.
    """
    t = _check_point(t)
    gamma, omega = _check_weights(gamma, omega)
    if t == 0.0 or abs(t) == 1.0:
        raise PoleError(f"domination ratio is 0/0 at t={t}")
    return float(_domination_values(spec, np.array([t]), gamma, omega)[0])


@dataclass(frozen=True)
class DominationProfile:
    gamma: float
    omega: float
    t: np.ndarray = field(repr=False)
    d: np.ndarray = field(repr=False)
    sup_d: float
    fitted_exponent: float


def domination_profile(spec: MapSpec, gamma: float, omega: float,
                       points_per_side: int = 400, t_min: float = 1e-4,
                       t_max: float = 0.99) -> DominationProfile:
    """Domination ratio sampled on a symmetric log-spaced grid.

    ``fitted_exponent`` is the least-squares slope of log d against log |t|
    over the samples with |t| <= 1e-2 (both sides share the exponent, so
    mirrored sampling leaves the slope unbiased); at least 10 such samples
    are required, which bounds ``t_min`` away from 1e-2.
    """
    gamma, omega = _check_weights(gamma, omega)
    if not (0.0 < t_min < t_max < 1.0):
        raise InputDomainError(
            f"need 0 < t_min < t_max < 1, got t_min={t_min}, t_max={t_max}")
    if points_per_side < 2:
        raise InputDomainError("points_per_side must be at least 2")
    side = np.geomspace(t_min, t_max, int(points_per_side))
    ts = np.concatenate([-side[::-1], side])
    d = _domination_values(spec, ts, gamma, omega)
    small = np.abs(ts) <= 1e-2
    if np.count_nonzero(small) < 10:
        raise StructuralError(
            "fewer than 10 samples below |t|=1e-2; lower t_min or raise "
            "points_per_side to fit the critical exponent")
    slope = float(np.polyfit(np.log(np.abs(ts[small])), np.log(d[small]), 1)[0])
    return DominationProfile(gamma=gamma, omega=omega, t=ts, d=d,
                             sup_d=float(np.max(d)), fitted_exponent=slope)
