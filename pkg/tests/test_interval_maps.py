import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rovellalab.errors import (
    ConvergenceError,
    InputDomainError,
    NonDifferentiableError,
    SpecError,
)
from rovellalab.interval_maps import (
    MapKind,
    MapSpec,
    eval_derivative,
    eval_map,
    find_fixed_points,
    itinerary,
    orbit,
    solve_conjugacy,
)

G0 = MapSpec.g0(1.5)
F0 = MapSpec.f0(2.0)
TENT = MapSpec.tent()
PERT = MapSpec.perturbed(1.5, 0.1)


# ---------------------------------------------------------------------------
# parameter validation
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("bad", [
    lambda: MapSpec.g0(1.0),
    lambda: MapSpec.g0(0.5),
    lambda: MapSpec.f0(1.9),
    lambda: MapSpec.perturbed(1.5, 0.3),
    lambda: MapSpec.perturbed(1.5, -0.01),
    lambda: MapSpec(MapKind.G0, 1.5, 0.1),
    lambda: MapSpec(MapKind.TENT, 1.0, 0.2),
    lambda: MapSpec(MapKind.G0, math.inf),
    lambda: MapSpec(MapKind.G0, math.nan),
])
def test_spec_validation_rejects(bad):
    with pytest.raises(SpecError):
        bad()


def test_spec_accepts_string_kind():
    sp = MapSpec("g0", 1.5)
    assert sp.kind is MapKind.G0
    assert sp.kernel_args == (0, 1.5, 0.0)


def test_spec_kernel_codes():
    assert G0.kernel_code == 0
    assert F0.kernel_code == 1
    assert TENT.kernel_code == 2
    assert PERT.kernel_code == 3


def test_perturbed_eps_zero_reduces_to_g0():
    sp = MapSpec.perturbed(1.5, 0.0)
    for t in (-0.7, -0.2, 0.31, 0.9):
        assert eval_map(sp, t) == eval_map(G0, t)


# ---------------------------------------------------------------------------
# pointwise evaluation
# ---------------------------------------------------------------------------

def test_eval_map_frozen_values():
    assert eval_map(G0, 0.5) == pytest.approx(-0.299038105676658, rel=1e-15)
    assert eval_map(G0, -0.5) == pytest.approx(0.2928932188134524, rel=1e-15)
    assert eval_map(F0, 0.5) == 0.5
    assert eval_map(F0, -0.5) == 0.6875
    assert eval_map(TENT, 0.3) == pytest.approx(0.4, rel=1e-15)
    assert eval_map(PERT, 0.5) == pytest.approx(-0.3691342951089922, rel=1e-15)


def test_eval_map_critical_point_and_endpoints():
    for sp in (G0, F0, TENT):
        assert eval_map(sp, 0.0) == 1.0
        assert eval_map(sp, -1.0) == -1.0
    assert eval_map(PERT, 0.0) == pytest.approx(0.8, rel=1e-15)
    assert eval_map(G0, 1.0) == -1.0


def test_eval_map_rejects_out_of_domain():
    for t in (1.0000001, -2.0, math.nan, math.inf):
        with pytest.raises(InputDomainError):
            eval_map(G0, t)


def test_eval_derivative_is_signed():
    # decreasing on the right branch, increasing on the left
    assert eval_derivative(G0, 0.5) == pytest.approx(-2.598076211353316, rel=1e-15)
    assert eval_derivative(G0, -0.5) == pytest.approx(2.121320343559643, rel=1e-15)
    assert eval_derivative(F0, 0.5) == -2.0
    assert eval_derivative(F0, -0.5) == 2.25
    assert eval_derivative(G0, 0.0) == 0.0
    assert eval_derivative(TENT, 0.4) == -2.0
    assert eval_derivative(TENT, -0.4) == 2.0


def test_tent_derivative_refused_at_corners():
    for t in (0.0, 1.0, -1.0):
        with pytest.raises(NonDifferentiableError):
            eval_derivative(TENT, t)


# ---------------------------------------------------------------------------
# orbits and itineraries
# ---------------------------------------------------------------------------

def test_orbit_shape_and_range():
    o = orbit(G0, 0.3123, 500)
    assert o.shape == (501,)
    assert o[0] == 0.3123
    assert np.all(o >= -1.0) and np.all(o <= 1.0)
    assert o[1] == eval_map(G0, 0.3123)


def test_orbit_rejects_negative_length():
    with pytest.raises(InputDomainError):
        orbit(G0, 0.5, -1)


def test_itinerary_frozen_tent_word():
    # 0.5 -> 0 -> 1 -> -1 -> -1 -> -1
    assert itinerary(TENT, 0.5, 6) == "RCRLLL"


def test_itinerary_validates():
    with pytest.raises(InputDomainError):
        itinerary(TENT, 0.5, 0)
    assert itinerary(G0, -0.5, 1) == "L"


@settings(max_examples=120, deadline=None)
@given(t0=st.floats(min_value=-1.0, max_value=1.0))
def test_orbit_confined_for_any_start(t0):
    for sp in (G0, F0, TENT, PERT):
        o = orbit(sp, t0, 64)
        assert np.all(np.abs(o) <= 1.0)


# ---------------------------------------------------------------------------
# fixed points (locations and multipliers pinned from the closed forms)
# ---------------------------------------------------------------------------

def test_fixed_points_g0():
    fps = find_fixed_points(G0)
    assert [f.location for f in fps] == pytest.approx(
        [-1.0, 1.0 - 1.0 / math.sqrt(2.0)], abs=1e-12)
    assert [f.multiplier for f in fps] == pytest.approx([3.0, -3.0], rel=1e-10)
    assert all(f.stability == "repelling" for f in fps)


def test_fixed_points_f0():
    fps = find_fixed_points(F0)
    assert [f.location for f in fps] == pytest.approx(
        [-1.0, -0.9535121291857054, 0.5], abs=1e-10)
    assert [f.multiplier for f in fps] == pytest.approx(
        [0.0, 1.8894946865340718, -2.0], rel=1e-9, abs=1e-12)
    assert [f.stability for f in fps] == ["attracting", "repelling", "repelling"]


def test_fixed_points_tent():
    fps = find_fixed_points(TENT)
    assert [f.location for f in fps] == pytest.approx([-1.0, 1.0 / 3.0], abs=1e-12)
    assert [f.multiplier for f in fps] == pytest.approx([2.0, -2.0], rel=1e-12)


def test_fixed_points_perturbed():
    fps = find_fixed_points(PERT)
    assert [f.location for f in fps] == pytest.approx(
        [-1.0, 0.25790686321739326], abs=1e-10)
    assert fps[0].multiplier == pytest.approx(2.7, rel=1e-12)
    assert fps[1].multiplier == pytest.approx(-2.686082265397879, rel=1e-9)


def test_fixed_points_are_actually_fixed():
    for sp in (G0, F0, TENT, PERT):
        for f in find_fixed_points(sp):
            assert eval_map(sp, f.location) == pytest.approx(f.location, abs=5e-13)


def test_fixed_points_scan_validation():
    with pytest.raises(InputDomainError):
        find_fixed_points(G0, scan_points=2)


# ---------------------------------------------------------------------------
# conjugacy to the tent map
# ---------------------------------------------------------------------------

def test_conjugacy_tent_is_identity():
    tab = solve_conjugacy(TENT, grid_size=501, tol=1e-6)
    assert tab.sweeps == 1
    assert tab.residual == 0.0
    np.testing.assert_array_equal(tab.values, tab.grid)


def test_conjugacy_g0_table():
    tab = solve_conjugacy(G0, grid_size=2001, tol=1e-6)
    assert tab.residual < 1e-6
    assert np.all(np.diff(tab.values) > 0.0)
    assert tab.values[0] == -1.0 and tab.values[-1] == 1.0
    assert tab.values[1000] == 0.0
    # each sweep contracts the sup-norm move by at least 1/2
    assert np.all(tab.deltas[1:] <= 0.5 * tab.deltas[:-1] + 1e-15)
    # the interior fixed point must land on the tent map's fixed point 1/3
    p = 1.0 - 1.0 / math.sqrt(2.0)
    assert float(tab.evaluate(p)) == pytest.approx(1.0 / 3.0, abs=2e-3)
    # conjugacy identity spot-checked through the table itself
    for x in (-0.8, -0.3, 0.2, 0.7):
        lhs = float(tab.evaluate(eval_map(G0, x)))
        rhs = 1.0 - 2.0 * abs(float(tab.evaluate(x)))
        assert lhs == pytest.approx(rhs, abs=5e-4)


def test_conjugacy_invert_roundtrip():
    tab = solve_conjugacy(G0, grid_size=2001, tol=1e-6)
    xs = np.linspace(-0.99, 0.99, 37)
    back = tab.invert(tab.evaluate(xs))
    np.testing.assert_allclose(back, xs, atol=1e-10)


def test_conjugacy_rejects_f0():
    with pytest.raises(SpecError):
        solve_conjugacy(F0)


def test_conjugacy_validates_inputs():
    with pytest.raises(InputDomainError):
        solve_conjugacy(G0, grid_size=2)
    with pytest.raises(InputDomainError):
        solve_conjugacy(G0, tol=0.0)


def test_conjugacy_unreachable_tolerance():
    with pytest.raises(ConvergenceError):
        solve_conjugacy(G0, grid_size=51, tol=1e-30)
