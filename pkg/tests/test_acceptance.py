"""Acceptance suite: thirteen end-to-end checks, one test per criterion.

Each test prints a single ``[criterion NN] title: PASS`` line when it
succeeds (pytest reports the failure line otherwise) and enforces the
runtime budget it was given alongside its numerical tolerances.
"""

import math
import time

import numpy as np
import pytest

from rovellalab import measures
from rovellalab.flow_model import (
    CrossSectionPoint,
    SaddleSpec,
    induced_sphere_map,
    pi2,
    pi3,
    return_map_R0,
)
from rovellalab.errors import HypothesisViolationError
from rovellalab.interval_maps import MapSpec, eval_map, solve_conjugacy
from rovellalab.pliss import (
    HyperbolicTimeParams,
    hyperbolic_times,
    induced_time_bound,
    pliss_times,
)
from rovellalab.solenoid import (
    SolenoidSpec,
    empirical_fiber_diameter,
    fiber_cluster_count,
    step_S,
)
from rovellalab.torusphere import domination_profile, lyapunov_ensemble

G0 = MapSpec.g0(1.5)
F0 = MapSpec.f0(2.0)
MATCHED = SaddleSpec(1.0, -4.5, -2.0, 4.0)
SOL = SolenoidSpec()


def _report(capsys, num, title):
    with capsys.disabled():
        print(f"[criterion {num:02d}] {title}: PASS", flush=True)


def _tail_sum_times(a, slope, sign, tol=1e-12):
    """Brute-force running-floor definition via the full prefix-sum matrix.

    With sign=+1: times n whose every tail sum(a[k:n]) >= slope*(n-k) - tol.
    With sign=-1: times n whose every tail sum(a[k:n]) <= slope*(n-k) + tol.
    """
    a = np.asarray(a, dtype=float)
    s = np.concatenate(([0.0], np.cumsum(a)))
    n = np.arange(1, a.size + 1)
    k = np.arange(0, a.size)
    win = s[n][:, None] - s[k][None, :]
    length = n[:, None] - k[None, :]
    if sign > 0:
        cond = win >= slope * length - tol
    else:
        cond = win <= slope * length + tol
    cond |= length <= 0
    return np.nonzero(cond.all(axis=1))[0] + 1


def test_criterion_01_pliss_oracle_equivalence(capsys):
    rng = np.random.default_rng(101)
    start = time.monotonic()
    for _ in range(1000):
        n = int(rng.integers(5, 101))
        H = float(rng.uniform(0.5, 3.0))
        c1 = float(rng.uniform(0.02, 0.6) * H)
        c2 = float(c1 + rng.uniform(0.05, 0.95) * (H - c1))
        a = rng.uniform(0.0, H, size=n)
        rep = pliss_times(a, c1, c2, H)
        np.testing.assert_array_equal(rep.times, _tail_sum_times(a, c1, +1))
        if a.mean() >= c2:
            zeta = (c2 - c1) / (H - c1)
            assert rep.count >= zeta * n - 1e-9
    elapsed = time.monotonic() - start
    assert elapsed < 5.0
    _report(capsys, 1, "Pliss oracle equivalence")


def test_criterion_02_hyperbolic_times_oracle_equivalence(capsys):
    rng = np.random.default_rng(202)
    start = time.monotonic()
    for _ in range(1000):
        n = int(rng.integers(5, 101))
        psi = rng.uniform(-2.0, 0.3, size=n)
        d = rng.uniform(0.0, 1.0, size=n) * (rng.uniform(size=n) < 0.3)
        c = float(rng.uniform(0.2, 0.9))
        b = float(rng.uniform(0.05, 0.24))
        params = HyperbolicTimeParams(c, 0.05, b, 1.0)
        got = hyperbolic_times(psi, d, params)
        want = np.intersect1d(_tail_sum_times(psi, -c, -1),
                              _tail_sum_times(d, b * c, -1))
        np.testing.assert_array_equal(got, want)
    elapsed = time.monotonic() - start
    assert elapsed < 10.0
    _report(capsys, 2, "hyperbolic-times oracle equivalence")


def test_criterion_03_telescoping_exactness(capsys):
    n = 10_000
    start = time.monotonic()
    for seed in range(100):
        rng = np.random.default_rng(seed)
        t, _mer, par, _redraws = measures.random_orbit(G0, rng, n)
        direct = np.log(par).sum()
        closed = (n * math.log(2.0)
                  + math.log(abs(math.cos(math.pi * t[-1] / 2)))
                  - math.log(abs(math.cos(math.pi * t[0] / 2))))
        assert abs(direct - closed) < 1e-8 * n
    elapsed = time.monotonic() - start
    assert elapsed < 5.0
    _report(capsys, 3, "parallel Birkhoff telescoping")


def test_criterion_04_conjugacy_residual_and_contraction(capsys):
    start = time.monotonic()
    table = solve_conjugacy(G0, 10_001, 1e-6)
    elapsed = time.monotonic() - start
    assert table.residual < 1e-6
    assert np.all(np.diff(table.values) > 0)
    deltas = np.asarray(table.deltas)
    live = deltas[:-1] > 0
    ratios = deltas[1:][live] / deltas[:-1][live]
    assert np.all(ratios <= 0.5 + 1e-3)
    assert elapsed < 10.0
    _report(capsys, 4, "tent conjugacy residual and sweep contraction")


def test_criterion_05_semiconjugacy_exactness(capsys):
    rng = np.random.default_rng(505)
    start = time.monotonic()
    worst = 0.0
    for _ in range(1000):
        x1 = float(rng.uniform(1e-3, 0.999) * rng.choice([-1.0, 1.0]))
        x2 = float(rng.uniform(-1.0, 1.0))
        th = float(rng.uniform(0.0, 2.0 * math.pi))
        zr = float(rng.uniform(0.0, 0.95))
        za = float(rng.uniform(0.0, 2.0 * math.pi))
        p = CrossSectionPoint(x1=x1, x2=x2, theta=[th],
                              z=zr * complex(math.cos(za), math.sin(za)))
        image = return_map_R0(MATCHED, F0, SOL, p)
        lhs2 = pi2(image)
        rhs2 = induced_sphere_map(pi2(p), F0)
        worst = max(worst, float(np.max(np.abs(np.subtract(lhs2, rhs2)))))
        x1_new, th_new = pi3(image)
        worst = max(worst, abs(x1_new - eval_map(F0, x1)))
        worst = max(worst, float(np.max(np.abs(
            th_new - np.mod(2.0 * np.asarray(p.theta), 2.0 * math.pi)))))
    elapsed = time.monotonic() - start
    assert worst < 1e-10
    assert elapsed < 1.0
    _report(capsys, 5, "projection semiconjugacies")


def test_criterion_06_critical_neighborhood_recurrence(capsys):
    start = time.monotonic()
    rep = measures.recurrence_fraction(G0, 0.05, 100_000, 1000, 0)
    elapsed = time.monotonic() - start
    assert rep.fraction >= 0.99
    assert elapsed < 30.0
    _report(capsys, 6, "critical neighborhood recurrence")


def test_criterion_07_domination_dichotomy(capsys):
    start = time.monotonic()
    prof = domination_profile(G0, 1.2, 0.1, 400, 1e-4, 0.99)
    prof_fine = domination_profile(G0, 1.2, 0.1, 800, 1e-4, 0.99)
    assert prof.fitted_exponent == pytest.approx(0.10, abs=0.02)
    assert abs(prof.sup_d - prof_fine.sup_d) / prof.sup_d < 0.05
    steep = domination_profile(MapSpec.g0(2.5), 1.2, 0.1, 400, 1e-4, 0.99)
    assert steep.fitted_exponent == pytest.approx(-0.70, abs=0.07)
    elapsed = time.monotonic() - start
    assert elapsed < 5.0
    _report(capsys, 7, "domination dichotomy at the critical point")


def test_criterion_08_two_stage_frequency_floor(capsys):
    start = time.monotonic()
    for seed in range(10):
        res = measures.abv0_orbit_driver(G0, seed, 100_000)
        assert res.passed, f"seed {seed} failed: {res.failures}"
        assert res.simultaneous_count >= res.floor
    elapsed = time.monotonic() - start
    assert elapsed < 60.0
    _report(capsys, 8, "two-stage selection frequency floor")


def test_criterion_09_solenoid_geometry(capsys):
    start = time.monotonic()
    # fiber diameter bound at depth 10 (tiny relative slack for the float
    # product of contractions)
    diam = empirical_fiber_diameter(SOL, 10)
    assert diam <= 2.0 * SOL.lam ** 10 * (1.0 + 1e-6)
    # dyadic cluster counts
    for n in range(1, 9):
        rep = fiber_cluster_count(SOL, n)
        assert rep.cluster_count == 2 ** n
        assert rep.expected == 2 ** n
    # the angle coordinate quotients exactly onto doubling
    rng = np.random.default_rng(909)
    for _ in range(100):
        theta = rng.uniform(0.0, 2.0 * math.pi, size=1)
        z = complex(*rng.uniform(-0.5, 0.5, size=2))
        out, _z = step_S(SOL, theta, z)
        assert np.array_equal(out, np.mod(2.0 * theta, 2.0 * math.pi))
    elapsed = time.monotonic() - start
    assert elapsed < 5.0
    _report(capsys, 9, "solenoid fiber geometry and angle quotient")


def test_criterion_10_return_time_integrability(capsys):
    start = time.monotonic()
    ens = measures.integrability_ensemble(G0, SaddleSpec(), 10,
                                          (100_000, 1_000_000), 0)
    elapsed = time.monotonic() - start
    valid = ens.bad < 0
    assert valid.sum() >= 2
    assert not ens.diverged
    assert np.nanmax(np.abs(ens.rel_diffs[valid])) < 0.05
    assert elapsed < 60.0
    _report(capsys, 10, "return-time average stability")


def test_criterion_11_basin_filling(capsys):
    start = time.monotonic()
    rep = measures.basin_fraction(F0, -1.0, 10_000, 10_000)
    elapsed = time.monotonic() - start
    assert rep.fraction >= 0.999
    assert elapsed < 30.0
    _report(capsys, 11, "sink basin filling")


def test_criterion_12_induced_time_bound(capsys):
    rng = np.random.default_rng(1212)
    start = time.monotonic()
    for _ in range(1000):
        m = int(rng.integers(3, 51))
        n_cap = float(rng.uniform(1.0, 20.0))
        c_slope = float(rng.uniform(0.5, 5.0))
        rho = float(rng.uniform(0.05, 0.95)) / c_slope
        q = rng.uniform(0.0, n_cap, size=m)
        # recurrence controlled by rho makes the linear bound provable
        d = rng.uniform(0.0, 1.0, size=m) * rho * q
        p = rng.uniform(0.0, 1.0, size=m) * c_slope * d
        rep = induced_time_bound(q, p, d, n_cap, c_slope, rho)
        assert rep.ok
        assert rep.first_violation is None
        assert rep.k_checked == m
    # a block that spends far too long near the singular set breaks the
    # line immediately ...
    d_big = np.full(20, 10.0)
    rep = induced_time_bound(np.ones(20), 1.0 * d_big, d_big, 1.0, 1.0, 0.5)
    assert not rep.ok
    assert rep.first_violation == 1
    # ... and a late burst breaks it at an interior index
    q = np.concatenate([np.full(5, 0.1), np.full(20, 1.0)])
    d = np.concatenate([np.zeros(5), np.full(20, 4.0)])
    rep = induced_time_bound(q, 1.0 * d, d, 1.0, 1.0, 0.5)
    assert not rep.ok
    assert rep.first_violation is not None and rep.first_violation > 1
    # hypothesis violations are raised, not silently scored
    with pytest.raises(HypothesisViolationError):
        induced_time_bound([5.0], [0.0], [0.0], 2.0, 1.0, 0.5)
    with pytest.raises(HypothesisViolationError):
        induced_time_bound([1.0], [3.0], [1.0], 2.0, 1.0, 0.5)
    elapsed = time.monotonic() - start
    assert elapsed < 5.0
    _report(capsys, 12, "induced return-time bound")


def test_criterion_13_lyapunov_positivity(capsys):
    start = time.monotonic()
    t0s = np.random.default_rng(0).uniform(-1.0, 1.0, size=100)
    ens = lyapunov_ensemble(G0, t0s, 1_000_000)
    elapsed = time.monotonic() - start
    assert ens.meridian_mean > 0.1
    assert ens.parallel_mean > 0.5
    assert abs(ens.parallel_mean - math.log(2.0)) <= 0.05
    assert elapsed < 120.0
    _report(capsys, 13, "Lyapunov exponent positivity")
