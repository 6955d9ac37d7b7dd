"""One-dimensional quotient maps on [-1, 1] and their tent-map conjugacy.

Four families share one interface, selected by :class:`MapKind`:

* ``g0`` -- the sphere-quotient family ``1 - 2*(t*(2-t))**alpha`` on [0, 1]
  and ``1 - 2*|t|**alpha`` on [-1, 0).  Lorenz-like with a critical point at
  0 of order ``alpha > 1``: both one-sided derivatives vanish at 0, the
  critical value is 1, and the fixed endpoint -1 repels with multiplier
  ``2*alpha``.
* ``f0`` -- the ball-quotient family ``1 - 2*t**alpha`` on (0, 1] with the
  fixed left branch ``1 - 6*t**4 + 4*t**6`` on [-1, 0); requires
  ``alpha >= 2``.  Here -1 is superattracting (multiplier 0) and the
  interesting dynamics is transient.
* ``tent`` -- the full tent map ``1 - 2*|t|``, the piecewise-linear model
  the smooth families are compared against.
* ``perturbed`` -- ``(1-eps)*g0 - eps``, a one-parameter family that keeps
  both endpoints at -1 and lowers the critical value to ``1 - 2*eps``.

All evaluation goes through the shared kernel primitives so scalar calls,
orbit kernels and grid sweeps agree on branch conventions (the ``t >= 0``
branch owns the point 0) and on the [-1, 1] output clip.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import brentq

from . import _kernels
from ._kernels.fallback import _deriv_scalar, _step_scalar
from .errors import (
    ConvergenceError,
    InputDomainError,
    NonDifferentiableError,
    SpecError,
    StructuralError,
)

__all__ = [
    "MapKind",
    "MapSpec",
    "FixedPointReport",
    "ConjugacyTable",
    "eval_map",
    "eval_derivative",
    "orbit",
    "itinerary",
    "find_fixed_points",
    "solve_conjugacy",
]


class MapKind(str, Enum):
    G0 = "g0"
    F0 = "f0"
    TENT = "tent"
    PERTURBED = "perturbed"


_KERNEL_CODE = {
    MapKind.G0: _kernels.KIND_G0,
    MapKind.F0: _kernels.KIND_F0,
    MapKind.TENT: _kernels.KIND_TENT,
    MapKind.PERTURBED: _kernels.KIND_PERTURBED,
}


@dataclass(frozen=True)
class MapSpec:
    """Parameter record for one interval map.

    ``alpha`` is the critical order for the smooth kinds and ignored by the
    tent map; ``eps`` must stay 0 except for the perturbed family, where it
    is capped at 0.25 so the critical value 1 - 2*eps stays above the fixed
    point region.
    """

    kind: MapKind
    alpha: float = 1.5
    eps: float = 0.0

    def __post_init__(self):
        kind = MapKind(self.kind)
        object.__setattr__(self, "kind", kind)
        alpha = float(self.alpha)
        eps = float(self.eps)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "eps", eps)
        if not math.isfinite(alpha) or not math.isfinite(eps):
            raise SpecError("alpha and eps must be finite")
        if kind in (MapKind.G0, MapKind.PERTURBED) and alpha <= 1.0:
            raise SpecError(f"{kind.value}: alpha must exceed 1, got {alpha}")
        if kind is MapKind.F0 and alpha < 2.0:
            raise SpecError(f"f0: alpha must be at least 2, got {alpha}")
        if kind is MapKind.PERTURBED:
            if not 0.0 <= eps <= 0.25:
                raise SpecError(f"perturbed: eps must lie in [0, 0.25], got {eps}")
        elif eps != 0.0:
            raise SpecError(f"{kind.value}: eps must be 0, got {eps}")

    @property
    def kernel_code(self) -> int:
        return _KERNEL_CODE[self.kind]

    @property
    def kernel_args(self) -> tuple[int, float, float]:
        return (self.kernel_code, self.alpha, self.eps)

    @classmethod
    def g0(cls, alpha: float = 1.5) -> "MapSpec":
        return cls(MapKind.G0, alpha)

    @classmethod
    def f0(cls, alpha: float = 2.0) -> "MapSpec":
        return cls(MapKind.F0, alpha)

    @classmethod
    def tent(cls) -> "MapSpec":
        return cls(MapKind.TENT)

    @classmethod
    def perturbed(cls, alpha: float = 1.5, eps: float = 0.0) -> "MapSpec":
        return cls(MapKind.PERTURBED, alpha, eps)


@dataclass(frozen=True)
class FixedPointReport:
    location: float
    multiplier: float
    stability: str


@dataclass(frozen=True)
class ConjugacyTable:
    """Sampled conjugacy h with h(map(x)) = 1 - 2|h(x)| on a uniform grid.

    ``values`` is strictly increasing with h(-1) = -1, h(0) = 0, h(1) = 1, so
    the table is invertible by linear interpolation in either direction.
    ``deltas`` records the sup-norm change of every sweep (each at most half
    the previous one); ``residual`` is the sup-norm defect of the functional
    equation over the grid.
    """

    grid: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    residual: float
    sweeps: int
    deltas: np.ndarray = field(repr=False)

    def evaluate(self, x) -> np.ndarray:
        return np.interp(x, self.grid, self.values)

    def invert(self, y) -> np.ndarray:
        return np.interp(y, self.values, self.grid)


def _check_point(t: float) -> float:
    t = float(t)
    if not math.isfinite(t) or abs(t) > 1.0:
        raise InputDomainError(f"t={t!r} lies outside [-1, 1]")
    return t


def eval_map(spec: MapSpec, t: float) -> float:
    """One application of the map at a point of [-1, 1]."""
    t = _check_point(t)
    return _step_scalar(spec.kernel_code, spec.alpha, spec.eps, t)


def eval_derivative(spec: MapSpec, t: float) -> float:
    """Signed derivative; endpoints use the one-sided branch value.

    The tent map is refused at 0 and at +-1 (corner, and the endpoint slopes
    are reported by :func:`find_fixed_points` instead).  The smooth kinds are
    differentiable everywhere, with derivative 0 at the critical point.
    """
    t = _check_point(t)
    if spec.kind is MapKind.TENT:
        if t == 0.0 or abs(t) == 1.0:
            raise NonDifferentiableError(
                f"tent map has no two-sided derivative at t={t}")
        return -2.0 if t > 0.0 else 2.0
    mag = _deriv_scalar(spec.kernel_code, spec.alpha, spec.eps, t)
    if t > 0.0:
        return -mag
    if t < 0.0:
        return mag
    return 0.0


def orbit(spec: MapSpec, t0: float, n: int) -> np.ndarray:
    """The points t0, map(t0), ..., map^n(t0) as an (n+1,) array."""
    t0 = _check_point(t0)
    if n < 0:
        raise InputDomainError(f"orbit length must be nonnegative, got {n}")
    return _kernels.orbit_array(spec.kernel_code, spec.alpha, spec.eps, t0, int(n))


def itinerary(spec: MapSpec, t: float, n: int) -> str:
    """Symbol string over L/C/R for the first n orbit points.

    C marks an exact hit of the critical point 0; L and R are the open
    half-intervals.
    """
    t = _check_point(t)
    if n < 1:
        raise InputDomainError(f"itinerary length must be positive, got {n}")
    code, alpha, eps = spec.kernel_args
    symbols = []
    for _ in range(int(n)):
        if t == 0.0:
            symbols.append("C")
        elif t < 0.0:
            symbols.append("L")
        else:
            symbols.append("R")
        t = _step_scalar(code, alpha, eps, t)
    return "".join(symbols)


def _stability(multiplier: float) -> str:
    if abs(multiplier) < 1.0:
        return "attracting"
    if abs(multiplier) > 1.0:
        return "repelling"
    return "neutral"


def _endpoint_multiplier(spec: MapSpec, t: float) -> float:
    # one-sided branch slope; positive at -1 for every family here
    if spec.kind is MapKind.TENT:
        return 2.0 if t < 0.0 else -2.0
    return eval_derivative(spec, t)


def find_fixed_points(spec: MapSpec, scan_points: int = 4097) -> list[FixedPointReport]:
    """All fixed points with multipliers, sorted by location.

    Endpoint fixed points are detected exactly; interior ones come from a
    sign-change scan of map(t) - t refined by Brent's method.  Multipliers at
    the endpoints are the one-sided branch slopes (the tent map's corner
    points are the one place :func:`eval_derivative` refuses).
    """
    if scan_points < 3:
        raise InputDomainError("scan_points must be at least 3")
    code, alpha, eps = spec.kernel_args
    found: list[tuple[float, float]] = []

    for endpoint in (-1.0, 1.0):
        if eval_map(spec, endpoint) == endpoint:
            found.append((endpoint, _endpoint_multiplier(spec, endpoint)))

    grid = np.linspace(-1.0, 1.0, int(scan_points))
    resid = _kernels.step_many(code, alpha, eps, grid) - grid

    def gap(t: float) -> float:
        return eval_map(spec, t) - t

    for i in range(1, len(grid) - 1):
        a, b = grid[i], grid[i + 1]
        ra, rb = resid[i], resid[i + 1]
        root = None
        if ra == 0.0:
            root = float(a)
        elif ra * rb < 0.0:
            root = float(brentq(gap, a, b, xtol=1e-14, rtol=8.9e-16))
        if root is None:
            continue
        if any(abs(root - loc) < 1e-9 for loc, _ in found):
            continue
        found.append((root, eval_derivative(spec, root)))

    found.sort(key=lambda pair: pair[0])
    return [FixedPointReport(loc, mult, _stability(mult)) for loc, mult in found]


def solve_conjugacy(spec: MapSpec, grid_size: int = 10001,
                    tol: float = 1e-6) -> ConjugacyTable:
    """Solve h(map(x)) = 1 - 2|h(x)| for increasing h on a uniform grid.

    Each sweep replaces h by sign(x) * (1 - h(map(x))) / 2 with h read off by
    linear interpolation; since interpolation averages, the sweep contracts
    sup-norm differences by a factor of at most 1/2.  Iteration stops once a
    sweep moves the table by less than tol/4, which pins the functional
    equation residual below tol (one extra half-sweep bounds the defect by
    the last recorded move).

    Defined for the tent-conjugate kinds (g0, perturbed, tent itself); the
    ball-quotient family has an attracting fixed point and admits no such
    conjugacy.
    """
    if spec.kind is MapKind.F0:
        raise SpecError("f0 is not conjugate to the tent map (it has an "
                        "attracting fixed point)")
    if grid_size < 3:
        raise InputDomainError("grid_size must be at least 3")
    if not tol > 0.0:
        raise InputDomainError("tol must be positive")
    code, alpha, eps = spec.kernel_args

    grid = np.linspace(-1.0, 1.0, int(grid_size))
    images = _kernels.step_many(code, alpha, eps, grid)
    sgn = np.sign(grid)
    h = grid.copy()

    max_sweeps = max(80, int(math.ceil(math.log2(4.0 / tol))) + 20)
    deltas: list[float] = []
    converged = False
    for _ in range(max_sweeps):
        h_new = sgn * 0.5 * (1.0 - np.interp(images, grid, h))
        delta = float(np.max(np.abs(h_new - h)))
        deltas.append(delta)
        h = h_new
        if delta < 0.25 * tol:
            converged = True
            break
    if not converged:
        raise ConvergenceError(
            f"conjugacy sweep did not reach tol={tol} in {max_sweeps} sweeps "
            f"(last move {deltas[-1]:.3e})")

    residual = float(np.max(np.abs(np.interp(images, grid, h)
                                   - (1.0 - 2.0 * np.abs(h)))))
    if residual >= tol:
        raise ConvergenceError(
            f"conjugacy residual {residual:.3e} did not fall below tol={tol}")
    if not np.all(np.diff(h) > 0.0):
        raise StructuralError("conjugacy table failed the strict "
                              "monotonicity check")
    return ConjugacyTable(grid=grid, values=h, residual=residual,
                          sweeps=len(deltas), deltas=np.asarray(deltas))
