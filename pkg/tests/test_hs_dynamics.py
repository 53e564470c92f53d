"""Tests for the hs_dynamics module."""

import math

import numpy as np
import pytest

from sigma_lagrangian.exceptions import (
    BranchResolutionError,
    DomainError,
    NoFixedPointError,
    ValidationError,
)
from sigma_lagrangian.hs_dynamics import (
    classify,
    classify_state,
    count_inflections,
    energy,
    energy_level_radius,
    fixed_points,
    hs_rhs,
    inflection_locus,
    integrate,
    integrate_symmetric,
)
from sigma_lagrangian.models import EnergyTag, HSParams, HSState


@pytest.mark.parametrize(
    "n, C, r_bar, E0",
    [(3, 3.0, 1.0, -1.0), (4, 3.0, math.sqrt(0.75), -9.0 / 8.0), (4, 4.0, 1.0, -2.0)],
)
def test_fixed_points(n: int, C: float, r_bar: float, E0: float) -> None:
    """Test the fixed point and its energy."""
    point, level = fixed_points(HSParams(n=n, C=C))
    assert point.alpha == pytest.approx(math.pi / 2)
    assert point.r == pytest.approx(r_bar)
    assert level == pytest.approx(E0)
    assert hs_rhs(point, HSParams(n=n, C=C)) == pytest.approx((0.0, 0.0), abs=1e-12)


def test_fixed_points_need_flux() -> None:
    """Test that C = 0 has no fixed point."""
    with pytest.raises(NoFixedPointError):
        fixed_points(HSParams(n=3, C=0.0))


def test_vector_field_and_energy(hs_params: HSParams) -> None:
    """Test the vector field and first integral at a sample state."""
    state = HSState(math.pi / 2, 2.0)
    alpha_dot, r_dot = hs_rhs(state, hs_params)
    assert alpha_dot == pytest.approx(-0.75)
    assert r_dot == pytest.approx(0.0, abs=1e-15)
    assert energy(state, hs_params) == pytest.approx(4.0)


def test_classify(hs_params: HSParams) -> None:
    """Test the classification of energy levels."""
    assert classify(hs_params, 1.0).tag is EnergyTag.TYPE_I
    assert classify(hs_params, 0.0).tag is EnergyTag.TYPE_I
    assert classify(hs_params, -2.0).tag is EnergyTag.TYPE_II
    assert classify(hs_params, -1.0).tag is EnergyTag.CRITICAL

    middle = classify(hs_params, -0.5)
    assert middle.tag is EnergyTag.TYPE_III
    assert middle.components == (EnergyTag.TYPE_III, EnergyTag.TYPE_I)


def test_classify_state(hs_params: HSParams) -> None:
    """Test that a state pins the component of its level."""
    assert classify_state(hs_params, HSState(math.pi / 2, 1.0)).tag is (
        EnergyTag.FIXED_POINT
    )
    inner = classify_state(hs_params, HSState(math.pi / 2, 0.5))
    assert inner.tag is EnergyTag.TYPE_III
    assert inner.piece == "bounded"
    assert classify_state(hs_params, HSState(math.pi / 2, 2.0)).tag is (
        EnergyTag.TYPE_I
    )

    flipped = classify_state(HSParams(n=3, C=-3.0), HSState(-math.pi / 2, 0.5))
    assert flipped.tag is EnergyTag.TYPE_III


def test_energy_level_radius(hs_params: HSParams) -> None:
    """Test both branches of the level E = -1/2 at alpha = pi/2."""
    smaller = energy_level_radius(hs_params, math.pi / 2, -0.5, "smaller")
    larger = energy_level_radius(hs_params, math.pi / 2, -0.5, "larger")
    assert smaller == pytest.approx(0.5, abs=1e-12)
    assert larger == pytest.approx((1.0 + math.sqrt(3.0)) / 2.0, abs=1e-12)

    with pytest.raises(BranchResolutionError):
        energy_level_radius(hs_params, 1.5 * math.pi, 0.5)
    with pytest.raises(BranchResolutionError):
        energy_level_radius(hs_params, math.pi / 2, -2.0)


def test_fixed_point_is_stationary(hs_params: HSParams) -> None:
    """Test that integration from the fixed point stays there."""
    trajectory = integrate(hs_params, HSState(math.pi / 2, 1.0), (0.0, 10.0))
    assert trajectory.termination == "span"
    assert np.max(np.abs(trajectory.r - 1.0)) < 1e-10
    assert np.max(np.abs(trajectory.alpha - math.pi / 2)) < 1e-10


@pytest.mark.parametrize(
    "alpha0, r0, smax",
    [
        (math.pi / 2, 0.3, 50.0),
        (math.pi / 2, 0.5, 50.0),
        (math.pi / 2, 0.8, 50.0),
        (math.pi / 2, 0.95, 50.0),
        (0.3, 0.6, 50.0),
        (4.0, 0.5, 50.0),
        (0.0, 0.5, 50.0),
        (math.pi, 0.4, 50.0),
        (5.0, 0.4, 50.0),
        (2.0, 0.7, 50.0),
        (math.pi / 2, 2.0, 10.0),
        (math.pi / 2, 1.5, 10.0),
        (1.5 * math.pi, 0.8, 10.0),
        (math.pi / 2, (1.0 + math.sqrt(3.0)) / 2.0, 10.0),
    ],
)
def test_energy_is_conserved(
    hs_params: HSParams, alpha0: float, r0: float, smax: float
) -> None:
    """Test the first integral along bounded and unbounded orbits."""
    trajectory = integrate(hs_params, HSState(alpha0, r0), (0.0, smax))
    assert trajectory.termination == "span"
    assert trajectory.energy_drift() < 1e-8
    assert (float(np.max(trajectory.r)) < 1.0) is (smax == 50.0)


def test_reversal_symmetry(hs_params: HSParams) -> None:
    """Test that integrating forward and then back returns to the start."""
    forward = integrate(hs_params, HSState(math.pi / 2, 0.5), (0.0, 10.0))
    alpha, r, _ = forward.state_at(10.0)
    backward = integrate(hs_params, HSState(alpha, r), (10.0, 0.0))
    assert backward.termination == "span"
    alpha_back, r_back, _ = backward.state_at(0.0)
    assert alpha_back == pytest.approx(math.pi / 2, abs=1e-9)
    assert r_back == pytest.approx(0.5, abs=1e-9)


def test_mirror_symmetry(hs_params: HSParams) -> None:
    """Test that (pi - alpha(-s), r(-s)) solves the ODE from the mirrored state."""
    orbit = integrate(hs_params, HSState(1.0, 0.6), (0.0, 5.0))
    mirror = integrate(hs_params, HSState(math.pi - 1.0, 0.6), (0.0, -5.0))
    for s in np.linspace(0.0, 5.0, 21):
        alpha, r, _ = orbit.state_at(float(s))
        alpha_m, r_m, _ = mirror.state_at(-float(s))
        assert alpha_m == pytest.approx(math.pi - alpha, abs=1e-8)
        assert r_m == pytest.approx(r, abs=1e-8)


def test_angle_periodicity(hs_params: HSParams) -> None:
    """Test that shifting alpha by 2 pi shifts the whole orbit by 2 pi."""
    orbit = integrate(hs_params, HSState(math.pi / 2, 0.5), (0.0, 20.0))
    shifted = integrate(hs_params, HSState(2.5 * math.pi, 0.5), (0.0, 20.0))
    for s in np.linspace(0.0, 20.0, 41):
        alpha, r, _ = orbit.state_at(float(s))
        alpha_p, r_p, _ = shifted.state_at(float(s))
        assert alpha_p - alpha == pytest.approx(2 * math.pi, abs=1e-9)
        assert r_p == pytest.approx(r, abs=1e-9)


def test_catenoid_orbit() -> None:
    """Test the explicit solution r = sqrt(1 + s^2) for C = 2 in C^3."""
    neck = HSState(math.pi / 2, 1.0)
    trajectory = integrate_symmetric(HSParams(n=3, C=2.0), neck, 5.0)
    for s in (-4.0, -1.0, 0.0, 2.5, 5.0):
        alpha, r, _ = trajectory.state_at(s)
        assert r == pytest.approx(math.sqrt(1.0 + s * s), abs=1e-9)
        assert math.cos(alpha) == pytest.approx(s / math.sqrt(1.0 + s * s), abs=1e-9)
    with pytest.raises(DomainError):
        trajectory.state_at(6.0)


def test_negative_flux_is_normalised() -> None:
    """Test the s-reversal applied to a negative flux."""
    trajectory = integrate(HSParams(n=3, C=-3.0), HSState(math.pi / 2, 0.5), (0.0, 5.0))
    assert trajectory.reversed
    assert trajectory.params.C == 3.0
    assert trajectory.alpha[0] == pytest.approx(1.5 * math.pi)
    assert trajectory.s[-1] == pytest.approx(-5.0)


def test_integrate_validation(hs_params: HSParams) -> None:
    """Test rejected tolerances and radii."""
    with pytest.raises(ValidationError):
        integrate(hs_params, HSState(1.0, 1.0), (0.0, 1.0), tol=1e-13)
    with pytest.raises(ValidationError):
        integrate(hs_params, HSState(1.0, 0.0), (0.0, 1.0))

    empty = integrate(hs_params, HSState(1.0, 1.0), (2.0, 2.0))
    assert empty.termination == "empty"
    assert empty.sol is None


def test_trajectory_table(hs_params: HSParams) -> None:
    """Test the (s, alpha, r, E, k) rows of a trajectory."""
    trajectory = integrate(hs_params, HSState(math.pi / 2, 0.5), (0.0, 3.0))
    rows = trajectory.table()
    assert len(rows) == len(trajectory.s)
    assert all(row[3] == pytest.approx(-0.5, abs=1e-9) for row in rows)


def test_inflection_locus() -> None:
    """Test the apex of the inflection locus."""
    locus = inflection_locus(HSParams(n=4, C=3.0))
    assert locus.r1 == pytest.approx(1.0)
    assert locus.E1 == pytest.approx(-1.0)
    assert locus.E0 == pytest.approx(-9.0 / 8.0)

    flat = inflection_locus(HSParams(n=3, C=3.0))
    assert flat.E1 == pytest.approx(0.0, abs=1e-12)
    assert flat.radius(math.pi / 6) == pytest.approx(3.0)


def test_count_inflections(hs_params: HSParams) -> None:
    """Test a flat profile and a bounded orbit without inflections."""
    catenoid = integrate_symmetric(HSParams(n=3, C=2.0), HSState(math.pi / 2, 1.0), 3.0)
    assert count_inflections(catenoid).identically_zero

    bounded = integrate(hs_params, HSState(math.pi / 2, 0.5), (0.0, 20.0))
    report = count_inflections(bounded)
    assert not report.identically_zero
    assert report.s_values == []


@pytest.mark.parametrize("E", [-2.0, -4.0])
def test_type2_orbit_has_two_inflections(E: float) -> None:
    """Test one inflection on each arm of a symmetric n = 4 type II orbit."""
    params = HSParams(n=4, C=3.0)
    bottom = energy_level_radius(params, 1.5 * math.pi, E)
    trajectory = integrate_symmetric(params, HSState(1.5 * math.pi, bottom), 10.0)
    report = count_inflections(trajectory)
    assert len(report.s_values) == 2
    assert report.s_values[0] == pytest.approx(-report.s_values[1], abs=1e-8)
    for s in report.s_values:
        _, r, _ = trajectory.state_at(s)
        assert r == pytest.approx(math.sqrt(-E), abs=1e-6)


def test_type1_orbit_has_no_inflection(hs_params: HSParams) -> None:
    """Test that the n = 3 type I orbit through (pi/2, 2) never changes convexity."""
    trajectory = integrate_symmetric(hs_params, HSState(math.pi / 2, 2.0), 10.0)
    report = count_inflections(trajectory)
    assert report.s_values == []
    assert not report.identically_zero
    assert trajectory.energy_drift() < 1e-8
