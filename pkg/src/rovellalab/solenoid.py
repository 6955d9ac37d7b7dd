"""Solid-torus solenoid: angle doubling crossed with affine disk contractions.

State (Theta, z) with Theta a vector of k angles and z in the closed unit
disk.  One step doubles every angle (mod 2 pi) and moves the disk point by

    z  |->  lam * z + c * exp(i theta_1),

so each angle fiber carries a contraction by lam centered at a point that
rotates with the first angle.  Invariance of the disk needs lam + c < 1;
disjointness of the two half-images over a common doubled angle needs
lam < c.  The angle marginal is exactly the doubling map: the z coordinate
never feeds back.

After n steps the image of a full fiber disk is a disk of radius lam**n, so
fiber slices decompose into 2**n clusters of diameter 2 lam**n whose
centers, over the angle-0 fiber, are separated by at least 2 c lam**(n-1).
``fiber_cluster_count`` verifies that picture by brute enumeration of the
2**n centers and single-linkage clustering at threshold 3 lam**n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegeneracyError, InputDomainError, SpecError

__all__ = [
    "SolenoidSpec",
    "FiberClusterReport",
    "step_S",
    "fiber_diameter_bound",
    "empirical_fiber_diameter",
    "fiber_cluster_count",
    "attractor_sample",
]

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class SolenoidSpec:
    k: int = 1
    lam: float = 0.1
    c: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "lam", float(self.lam))
        object.__setattr__(self, "c", float(self.c))
        if self.k < 1:
            raise SpecError(f"k must be at least 1, got {self.k}")
        if not 0.0 < self.lam < 1.0:
            raise SpecError(f"lam must lie in (0, 1), got {self.lam}")
        if not 0.0 < self.c < 1.0:
            raise SpecError(f"c must lie in (0, 1), got {self.c}")
        if not self.lam + self.c < 1.0:
            raise SpecError(
                f"lam + c must stay below 1 to keep the disk invariant, "
                f"got {self.lam + self.c}")
        if not self.lam < self.c:
            raise SpecError(
                f"lam < c is required for injectivity, got lam={self.lam}, "
                f"c={self.c}")


def _check_state(spec: SolenoidSpec, theta, z: complex):
    ang = np.atleast_1d(np.asarray(theta, dtype=np.float64))
    if ang.ndim != 1 or ang.size != spec.k:
        raise InputDomainError(
            f"Theta must be a vector of {spec.k} angles, got shape {ang.shape}")
    if not np.all(np.isfinite(ang)):
        raise InputDomainError("Theta must be finite")
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise InputDomainError("z must be finite")
    if abs(z) > 1.0 + 1e-12:
        raise InputDomainError(f"z must lie in the closed unit disk, |z|={abs(z)}")
    return ang, z


def step_S(spec: SolenoidSpec, theta, z: complex):
    """One solenoid step: all angles double, z contracts toward c e^(i theta_1)."""
    ang, z = _check_state(spec, theta, z)
    return np.mod(2.0 * ang, _TWO_PI), spec.lam * z + spec.c * complex(
        math.cos(ang[0]), math.sin(ang[0]))


def fiber_diameter_bound(spec: SolenoidSpec, n: int) -> float:
    """Diameter bound 2 lam**n for any component of an n-step fiber image."""
    if n < 0:
        raise InputDomainError(f"n must be nonnegative, got {n}")
    return 2.0 * spec.lam ** n


def empirical_fiber_diameter(spec: SolenoidSpec, n: int,
                             boundary_points: int = 20,
                             theta0: float = 0.0) -> float:
    """Measured diameter of one n-step image of a fiber disk.

    Pushes ``boundary_points`` equally spaced points of the unit circle over
    the angle orbit of ``theta0`` and takes the max pairwise distance.  The
    affine steps keep circles circular, so with an even point count this
    equals 2 lam**n to rounding.
    """
    if n < 0:
        raise InputDomainError(f"n must be nonnegative, got {n}")
    if boundary_points < 2:
        raise InputDomainError("need at least 2 boundary points")
    angles = _TWO_PI * np.arange(boundary_points) / boundary_points
    z = np.exp(1j * angles)
    theta = float(theta0)
    for _ in range(n):
        z = spec.lam * z + spec.c * complex(math.cos(theta), math.sin(theta))
        theta = math.fmod(2.0 * theta, _TWO_PI)
    diff = z[:, None] - z[None, :]
    return float(np.max(np.abs(diff)))


def _union_find_clusters(points: np.ndarray, threshold: float) -> int:
    """Single-linkage cluster count via a bucket grid of cell size threshold."""
    m = points.shape[0]
    parent = list(range(m))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    buckets: dict[tuple[int, int], list[int]] = {}
    keys = np.floor(points / threshold).astype(np.int64)
    thr2 = threshold * threshold
    for i in range(m):
        kx, ky = int(keys[i, 0]), int(keys[i, 1])
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                cell = buckets.get((kx + dx, ky + dy))
                if not cell:
                    continue
                xi, yi = points[i, 0], points[i, 1]
                for j in cell:
                    ddx = xi - points[j, 0]
                    ddy = yi - points[j, 1]
                    if ddx * ddx + ddy * ddy <= thr2:
                        ri, rj = find(i), find(j)
                        if ri != rj:
                            parent[ri] = rj
        buckets.setdefault((kx, ky), []).append(i)
    return len({find(i) for i in range(m)})


@dataclass(frozen=True)
class FiberClusterReport:
    n: int
    cluster_count: int
    expected: int
    threshold: float
    diameter_bound: float
    min_separation: float
    centers: np.ndarray = field(repr=False)


def fiber_cluster_count(spec: SolenoidSpec, n: int) -> FiberClusterReport:
    """Count level-n components of the angle-0 fiber slice.

    Enumerates the 2**n doubling preimages of angle 0, pushes the fiber disk
    center (z = 0) forward n steps along each, and clusters the resulting
    centers at threshold 3 lam**n: wider than a component (2 lam**n), much
    narrower than the separation 2 c lam**(n-1).  Raises DegeneracyError
    once the threshold falls within 64 ulps of the attractor radius scale
    c/(1-lam), where clustering would measure rounding, not geometry.
    Supports k = 1 and n <= 20; ``min_separation`` is only measured (by
    brute force) up to 4096 centers, else reported as nan.
    """
    if spec.k != 1:
        raise InputDomainError(
            f"fiber enumeration is implemented for k=1, got k={spec.k}")
    if not 1 <= n <= 20:
        raise InputDomainError(f"n must lie in 1..20, got {n}")
    threshold = 3.0 * spec.lam ** n
    scale = spec.c / (1.0 - spec.lam)
    if threshold < 64.0 * np.finfo(np.float64).eps * scale:
        raise DegeneracyError(
            f"cluster threshold {threshold:.3e} is below float resolution "
            f"at attractor scale {scale:.3e}; reduce n")
    m = 2 ** n
    theta = _TWO_PI * np.arange(m) / m
    z = np.zeros(m, dtype=np.complex128)
    for _ in range(n):
        z = spec.lam * z + spec.c * np.exp(1j * theta)
        theta = np.mod(2.0 * theta, _TWO_PI)
    points = np.column_stack([z.real, z.imag])
    clusters = _union_find_clusters(points, threshold)
    if m <= 4096:
        diff = np.abs(z[:, None] - z[None, :])
        np.fill_diagonal(diff, np.inf)
        min_sep = float(np.min(diff))
    else:
        min_sep = math.nan
    return FiberClusterReport(n=int(n), cluster_count=int(clusters),
                              expected=int(m), threshold=threshold,
                              diameter_bound=2.0 * spec.lam ** n,
                              min_separation=min_sep, centers=z)


def attractor_sample(spec: SolenoidSpec, n_points: int, seed: int = 0,
                     burn_in: int = 100):
    """Orbit sample on the attractor: (n_points, k) angles and n_points z's.

    Starts from uniformly random angles and z = 0, discards ``burn_in``
    steps (after 100 steps the z distance to the attractor is below
    lam**100), then records.
    """
    if n_points < 1:
        raise InputDomainError(f"n_points must be positive, got {n_points}")
    if burn_in < 0:
        raise InputDomainError(f"burn_in must be nonnegative, got {burn_in}")
    rng = np.random.default_rng(seed)
    theta = rng.uniform(0.0, _TWO_PI, size=spec.k)
    z = 0.0 + 0.0j
    for _ in range(burn_in):
        theta, z = step_S(spec, theta, z)
    thetas = np.empty((n_points, spec.k), dtype=np.float64)
    zs = np.empty(n_points, dtype=np.complex128)
    for i in range(n_points):
        thetas[i] = theta
        zs[i] = z
        theta, z = step_S(spec, theta, z)
    return thetas, zs
