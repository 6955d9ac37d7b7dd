"""Geometric flow model: saddle passage, cross-section return map, and the
projections that tie it to the interval quotient and the solenoid.

The model flow has a saddle at the origin with one expanding rate lambda1
and contracting rates lambda2 < lambda3 < 0.  A flow box around the saddle
is left through the faces x1 = +-1; the passage from the entry section to an
exit face is the rescaling map L.  Two saddle exponents run everything:

    alpha = -lambda3 / lambda1   (ball contraction per passage),
    beta  = -lambda2 / lambda1   (x2 flattening per passage),

with alpha > 1 (dissipativity) and beta > alpha + 2 (the x2 direction is
dominated).  From the exit face a diffeomorphism T glues back onto the entry
section, producing the first-return map R0 on cross-section points
(x1, x2, Theta, z):

    x1 |-> f0(x1),
    x2 |-> sign(x1)/2 + x2 |x1|**beta / C,
    (Theta, z) |-> solenoid step.

The ball coordinate on the section is the implicit vector
W = sqrt(1 - x1**2) * e(Theta, z), where e places (Theta, z) on a solid
torus of ring radius 1/2 and tube radius 1/4.  The branch factor Psi that T
applies to W is built exactly so that the radial scale accumulated through
L and T collapses back to sqrt(1 - f0(x1)**2): the composition through the
flow box agrees with the closed form above to rounding, and the projections

    pi3 (keep (x1, Theta))  and  pi2 (map to the sphere chart
    [x1, sqrt(1-x1**2) * (cos theta_i, sin theta_i)...])

intertwine R0 with the quotient dynamics exactly.

Return times diverge logarithmically near the stable manifold x1 = 0:
tau(x1) = tau0 - log|x1| / lambda1.  ``suspension_exponent`` converts a
per-return Lyapunov exponent into a per-unit-time one by dividing by the
mean return time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InputDomainError,
    ProjectionUndefinedError,
    SpecError,
    StableManifoldError,
    StructuralError,
)
from .interval_maps import MapKind, MapSpec, eval_map
from .solenoid import SolenoidSpec, step_S

__all__ = [
    "SaddleSpec",
    "CrossSectionPoint",
    "ReturnDiagnostics",
    "SuspensionStats",
    "TORUS_RING_RADIUS",
    "TORUS_TUBE_RADIUS",
    "solid_torus_embed",
    "solid_torus_norm",
    "section_w_norm",
    "pi1",
    "L_pm",
    "psi_pm",
    "Psi_pm",
    "T_pm",
    "return_map_R0",
    "return_map_composed",
    "return_orbit",
    "pi2",
    "pi3",
    "induced_sphere_map",
    "return_time",
    "suspension_exponent",
    "sink_leaf",
    "x2_contraction_factor",
]

TORUS_RING_RADIUS = 0.5
TORUS_TUBE_RADIUS = 0.25

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class SaddleSpec:
    """Saddle rates and the gluing contraction C of the return map."""

    lambda1: float = 1.0
    lambda2: float = -4.0
    lambda3: float = -1.5
    C: float = 4.0

    def __post_init__(self):
        for name in ("lambda1", "lambda2", "lambda3", "C"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not self.lambda1 > 0.0:
            raise SpecError(f"lambda1 must be positive, got {self.lambda1}")
        if not (self.lambda2 < 0.0 and self.lambda3 < 0.0):
            raise SpecError("lambda2 and lambda3 must be negative")
        if not self.lambda1 + self.lambda3 < 0.0:
            raise SpecError(
                "need lambda1 + lambda3 < 0 (contraction wins the saddle)")
        if not self.beta > self.alpha + 2.0:
            raise SpecError(
                f"need beta > alpha + 2, got beta={self.beta}, "
                f"alpha={self.alpha}")
        if not self.C > 1.0:
            raise SpecError(f"C must exceed 1, got {self.C}")

    @property
    def alpha(self) -> float:
        return -self.lambda3 / self.lambda1

    @property
    def beta(self) -> float:
        return -self.lambda2 / self.lambda1


@dataclass(frozen=True, eq=False)
class CrossSectionPoint:
    """Point of the return section: (x1, x2) in the square, k torus angles,
    z in the unit disk.  The ball vector W = sqrt(1-x1^2) e(Theta, z) is
    implicit in (x1, Theta, z)."""

    x1: float
    x2: float
    theta: np.ndarray = field(repr=False)
    z: complex

    def __post_init__(self):
        object.__setattr__(self, "x1", float(self.x1))
        object.__setattr__(self, "x2", float(self.x2))
        object.__setattr__(self, "z", complex(self.z))
        ang = np.atleast_1d(np.asarray(self.theta, dtype=np.float64)).copy()
        object.__setattr__(self, "theta", ang)
        if abs(self.x1) > 1.0 or not math.isfinite(self.x1):
            raise InputDomainError(f"x1 must lie in [-1, 1], got {self.x1}")
        if abs(self.x2) > 1.0 or not math.isfinite(self.x2):
            raise InputDomainError(f"x2 must lie in [-1, 1], got {self.x2}")
        if ang.ndim != 1 or ang.size < 1 or not np.all(np.isfinite(ang)):
            raise InputDomainError("theta must be a finite angle vector")
        if abs(self.z) > 1.0 + 1e-12:
            raise InputDomainError(
                f"z must lie in the closed unit disk, |z|={abs(self.z)}")

    @property
    def k(self) -> int:
        return self.theta.size


def solid_torus_embed(theta1: float, z: complex) -> np.ndarray:
    """Solid torus point in R^3 for one angle: ring 1/2, tube 1/4."""
    z = complex(z)
    ring = TORUS_RING_RADIUS + TORUS_TUBE_RADIUS * z.real
    return np.array([ring * math.cos(theta1), ring * math.sin(theta1),
                     TORUS_TUBE_RADIUS * z.imag])


def solid_torus_norm(z: complex) -> float:
    """Norm of the embedded point; by symmetry it depends on z only."""
    z = complex(z)
    return math.hypot(TORUS_RING_RADIUS + TORUS_TUBE_RADIUS * z.real,
                      TORUS_TUBE_RADIUS * z.imag)


def section_w_norm(p: CrossSectionPoint) -> float:
    """Norm of the implicit ball vector W at a section point."""
    return math.sqrt((1.0 - p.x1) * (1.0 + p.x1)) * solid_torus_norm(p.z)


def pi1(x1: float, x2: float, x3: float, W) -> np.ndarray:
    """Entry-section projection to the ball: scales W by sqrt(1 - x1^2)."""
    x1 = float(x1)
    if abs(x1) > 1.0 or not math.isfinite(x1):
        raise InputDomainError(f"x1 must lie in [-1, 1], got {x1}")
    W = np.asarray(W, dtype=np.float64)
    return math.sqrt((1.0 - x1) * (1.0 + x1)) * W


def L_pm(x1: float, x2: float, W, s: SaddleSpec):
    """Saddle passage from the entry section to the exit face sign(x1).

    Returns (sign(x1), x2 |x1|**beta, |x1|**alpha, |x1|**alpha * W): the
    exit face, the flattened x2, the x3 height at exit, and the contracted
    ball vector.  The stable manifold x1 = 0 never exits.
    """
    x1 = float(x1)
    if not math.isfinite(x1) or abs(x1) > 1.0:
        raise InputDomainError(f"x1 must lie in [-1, 1], got {x1}")
    if x1 == 0.0:
        raise StableManifoldError("x1=0 lies on the stable manifold of the "
                                  "saddle and never reaches an exit face")
    a = abs(x1)
    W = np.asarray(W, dtype=np.float64)
    return (math.copysign(1.0, x1), float(x2) * a ** s.beta, a ** s.alpha,
            a ** s.alpha * W)


def _check_sign(sign: int) -> float:
    if sign not in (1, -1, 1.0, -1.0):
        raise InputDomainError(f"sign must be +1 or -1, got {sign!r}")
    return float(sign)


def _check_f0(f0_spec: MapSpec):
    if f0_spec.kind is not MapKind.F0:
        raise SpecError(
            f"the gluing branch functions are defined by the ball-quotient "
            f"family, got kind={f0_spec.kind.value}")


def psi_pm(z3: float, f0_spec: MapSpec, sign: int) -> float:
    """Branch function psi_sign(z3) = f0(sign * z3**(1/alpha)), z3 in [0, 1]."""
    _check_f0(f0_spec)
    sgn = _check_sign(sign)
    z3 = float(z3)
    if not 0.0 <= z3 <= 1.0:
        raise InputDomainError(f"z3 must lie in [0, 1], got {z3}")
    return eval_map(f0_spec, sgn * z3 ** (1.0 / f0_spec.alpha))


def Psi_pm(z3: float, f0_spec: MapSpec, sign: int) -> float:
    """Radial gluing factor applied to the ball vector at the exit face.

    Interior formula (1/z3) sqrt((1 - psi^2) / (1 - z3**(2/alpha))); the
    endpoint values are declared as Psi(0) = -sign and Psi(1) = +sign (the
    interior formula does not extend continuously: it grows like
    z3**(-1/2) near 0 for the alpha=2 default, which the near-zero probe in
    the tests records).
    """
    _check_f0(f0_spec)
    sgn = _check_sign(sign)
    z3 = float(z3)
    if not 0.0 <= z3 <= 1.0:
        raise InputDomainError(f"z3 must lie in [0, 1], got {z3}")
    if z3 == 0.0:
        return -sgn
    if z3 == 1.0:
        return sgn
    psi = psi_pm(z3, f0_spec, sign)
    return (1.0 / z3) * math.sqrt((1.0 - psi) * (1.0 + psi)
                                  / (1.0 - z3 ** (2.0 / f0_spec.alpha)))


def _check_alpha_match(s: SaddleSpec, f0_spec: MapSpec):
    if abs(s.alpha - f0_spec.alpha) > 1e-12:
        raise StructuralError(
            f"saddle alpha {s.alpha} and ball-quotient alpha "
            f"{f0_spec.alpha} must match for the flow-box composition")


def T_pm(z2: float, z3: float, V, f0_spec: MapSpec, s: SaddleSpec,
         sign: int):
    """Gluing from the exit face sign back to the entry section.

    Returns (psi_sign(z3), sign/2 + z2/C, 2.0, Psi_sign(z3) * V); the
    constant third slot is the flow-box height label of the target section.
    """
    _check_alpha_match(s, f0_spec)
    sgn = _check_sign(sign)
    V = np.asarray(V, dtype=np.float64)
    return (psi_pm(z3, f0_spec, sign), sgn * 0.5 + float(z2) / s.C, 2.0,
            Psi_pm(z3, f0_spec, sign) * V)


def return_map_R0(s: SaddleSpec, f0_spec: MapSpec, sol: SolenoidSpec,
                  p: CrossSectionPoint) -> CrossSectionPoint:
    """First-return map in closed form.

    x1 follows the ball quotient, x2 lands in the sign(x1) half and
    flattens by |x1|**beta / C, and (Theta, z) take one solenoid step.
    """
    _check_f0(f0_spec)
    if p.x1 == 0.0:
        raise StableManifoldError("x1=0 lies on the stable manifold and "
                                  "never returns to the section")
    a = abs(p.x1)
    x2_new = math.copysign(0.5, p.x1) + p.x2 * a ** s.beta / s.C
    theta_new, z_new = step_S(sol, p.theta, p.z)
    return CrossSectionPoint(x1=eval_map(f0_spec, p.x1), x2=x2_new,
                             theta=theta_new, z=z_new)


@dataclass(frozen=True)
class ReturnDiagnostics:
    """Cross-checks of one composed passage against the closed form.

    ``scale_product`` is the radial W-scale accumulated through pi1, L and
    T; ``scale_expected`` is sqrt(1 - x1'^2) at the image point.  The two
    agree identically in exact arithmetic (the Psi factor is built for it).
    """

    scale_product: float
    scale_expected: float
    scale_error: float
    x1_roundtrip_error: float


def return_map_composed(s: SaddleSpec, f0_spec: MapSpec, sol: SolenoidSpec,
                        p: CrossSectionPoint):
    """First-return map computed through the flow box: pi1, then L at the
    sign(x1) face, then T back to the section.

    Returns (image point, diagnostics).  Requires the saddle alpha to equal
    the ball-quotient alpha, otherwise the z3 produced by the passage feeds
    the wrong branch function.
    """
    _check_f0(f0_spec)
    _check_alpha_match(s, f0_spec)
    if p.x1 == 0.0:
        raise StableManifoldError("x1=0 lies on the stable manifold and "
                                  "never returns to the section")
    sign = 1 if p.x1 > 0.0 else -1
    scale0 = math.sqrt((1.0 - p.x1) * (1.0 + p.x1))

    _exit_face, z2, z3, scale_l = L_pm(p.x1, p.x2, np.array([scale0]), s)
    y1, y2, _x3_label, scale_t = T_pm(z2, z3, scale_l, f0_spec, s, sign)
    scale_product = float(abs(scale_t[0]))

    x1_back = z3 ** (1.0 / s.alpha)
    theta_new, z_new = step_S(sol, p.theta, p.z)
    image = CrossSectionPoint(x1=y1, x2=y2, theta=theta_new, z=z_new)
    expected = math.sqrt((1.0 - y1) * (1.0 + y1))
    diag = ReturnDiagnostics(
        scale_product=scale_product,
        scale_expected=expected,
        scale_error=abs(scale_product - expected),
        x1_roundtrip_error=abs(x1_back - abs(p.x1)))
    return image, diag


def return_orbit(s: SaddleSpec, f0_spec: MapSpec, sol: SolenoidSpec,
                 p0: CrossSectionPoint, n: int, tau0: float = 1.0):
    """n-step section orbit with per-visit return times and W norms.

    Returns (points, w_norms, times): a list of n+1 section points, the
    implicit ball-vector norms at each, and the n+1 return durations
    tau0 - log|x1|/lambda1 started at each visit.
    """
    if n < 0:
        raise InputDomainError(f"n must be nonnegative, got {n}")
    points = [p0]
    w_norms = [section_w_norm(p0)]
    times = [return_time(p0.x1, s, tau0)]
    p = p0
    for _ in range(int(n)):
        p = return_map_R0(s, f0_spec, sol, p)
        points.append(p)
        w_norms.append(section_w_norm(p))
        times.append(return_time(p.x1, s, tau0))
    return points, np.asarray(w_norms), np.asarray(times)


def pi2(p: CrossSectionPoint) -> np.ndarray:
    """Sphere-chart projection [x1, sqrt(1-x1^2)(cos theta_i, sin theta_i)...]."""
    c = math.sqrt((1.0 - p.x1) * (1.0 + p.x1))
    out = np.empty(1 + 2 * p.k, dtype=np.float64)
    out[0] = p.x1
    out[1::2] = c * np.cos(p.theta)
    out[2::2] = c * np.sin(p.theta)
    return out


def pi3(p: CrossSectionPoint):
    """Quotient projection keeping (x1, Theta)."""
    return p.x1, p.theta.copy()


def induced_sphere_map(v, f0_spec: MapSpec) -> np.ndarray:
    """The sphere-chart dynamics pi2 intertwines: x1 through the ball
    quotient, angles doubled.

    Angles are recovered by atan2 from the interleaved pairs, which is
    undefined at the poles |x1| = 1.
    """
    _check_f0(f0_spec)
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1 or v.size < 3 or v.size % 2 == 0:
        raise StructuralError(
            f"sphere-chart vectors have odd length 1+2k, got shape {v.shape}")
    x1 = float(v[0])
    if abs(x1) >= 1.0:
        raise ProjectionUndefinedError(
            f"angles are undefined at the poles, |x1|={abs(x1)}")
    theta = np.arctan2(v[2::2], v[1::2])
    x1_new = eval_map(f0_spec, x1)
    c = math.sqrt((1.0 - x1_new) * (1.0 + x1_new))
    out = np.empty_like(v)
    out[0] = x1_new
    out[1::2] = c * np.cos(2.0 * theta)
    out[2::2] = c * np.sin(2.0 * theta)
    return out


def return_time(x1: float, s: SaddleSpec, tau0: float = 1.0) -> float:
    """Time of one return: tau0 plus the saddle passage -log|x1|/lambda1."""
    x1 = float(x1)
    tau0 = float(tau0)
    if not math.isfinite(x1) or abs(x1) > 1.0:
        raise InputDomainError(f"x1 must lie in [-1, 1], got {x1}")
    if not tau0 > 0.0:
        raise SpecError(f"tau0 must be positive, got {tau0}")
    if x1 == 0.0:
        raise StableManifoldError("return time diverges on the stable "
                                  "manifold x1=0")
    return tau0 + (-math.log(abs(x1))) / s.lambda1


@dataclass(frozen=True)
class SuspensionStats:
    map_exponent: float
    mean_return_time: float
    flow_exponent: float


def suspension_exponent(map_exponent: float, return_times,
                        tau0: float | None = None) -> SuspensionStats:
    """Per-unit-time exponent: per-return exponent over mean return time.

    ``return_times`` must hold at least 1000 samples; when ``tau0`` is
    given, every sample is checked against that lower bound.
    """
    times = np.atleast_1d(np.asarray(return_times, dtype=np.float64))
    if times.ndim != 1 or times.size < 1000:
        raise InputDomainError(
            f"need at least 1000 return-time samples, got {times.size}")
    if not np.all(np.isfinite(times)) or np.any(times <= 0.0):
        raise InputDomainError("return times must be finite and positive")
    if tau0 is not None and bool(np.any(times < float(tau0) - 1e-12)):
        raise InputDomainError(
            f"return times fall below the floor tau0={tau0}")
    mean_rt = float(np.mean(times))
    return SuspensionStats(map_exponent=float(map_exponent),
                           mean_return_time=mean_rt,
                           flow_exponent=float(map_exponent) / mean_rt)


def sink_leaf(s: SaddleSpec) -> float:
    """x2 of the invariant leaf over the sink x1 = -1: -C/(2(C-1))."""
    return -0.5 * s.C / (s.C - 1.0)


def x2_contraction_factor(s: SaddleSpec, x1: float) -> float:
    """|d x2' / d x2| of the return map at x1: |x1|**beta / C."""
    x1 = float(x1)
    if not math.isfinite(x1) or abs(x1) > 1.0:
        raise InputDomainError(f"x1 must lie in [-1, 1], got {x1}")
    return abs(x1) ** s.beta / s.C
