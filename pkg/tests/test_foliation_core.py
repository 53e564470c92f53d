"""Tests for the foliation_core module."""

import math
from typing import List

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sigma_lagrangian.exceptions import SingularityError, UndefinedAngleError
from sigma_lagrangian.foliation_core import (
    coefficient_check_acceleration,
    coefficient_check_leading_term,
    curvature_scalar_B,
    delta_beta_poly_f,
    eval_immersion,
    induced_metric,
    lagrangian_angle,
    mean_curvature_coeffs,
    mean_curvature_vector,
    orthonormal_frame,
    tangent_frame,
)
from sigma_lagrangian.models import SamplePlan
from sigma_lagrangian.oracle_verify import centered_laplacian_beta, sample_points
from sigma_lagrangian.profile_curves import FoliatedSpec, eval_profile, make_preset


def _assert_oriented_frame(vector: np.ndarray) -> None:
    basis = tangent_frame(vector).basis()
    size = vector.size
    assert np.allclose(basis @ basis.T, np.eye(size), atol=1e-12)
    assert np.linalg.det(basis) == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(basis[0], vector / np.linalg.norm(vector))


@settings(max_examples=100, deadline=None)
@given(
    st.integers(3, 6).flatmap(
        lambda n: st.lists(st.floats(-10.0, 10.0), min_size=n, max_size=n)
    ).filter(lambda v: float(np.linalg.norm(v)) > 1e-3)
)
def test_tangent_frame_is_positively_oriented(vector: List[float]) -> None:
    """Test orthonormality and orientation of the frame at random points."""
    _assert_oriented_frame(np.array(vector))


def test_tangent_frame_near_antipode() -> None:
    """Test the antipodal branch of the frame construction."""
    _assert_oriented_frame(np.array([-1.0, 1e-9, 0.0, 0.0]))


def test_standard_circle_closed_forms(standard_circle: FoliatedSpec) -> None:
    """Test position, angle and mean curvature of the standard embedding."""
    x = [1.0, 0.0, 0.0]
    point = eval_immersion(standard_circle, 0.0, x)
    assert np.allclose(point.re, [1.0, 0.0, 0.0])
    assert np.allclose(point.im, 0.0)
    assert lagrangian_angle(standard_circle, 0.0, x) == pytest.approx(math.pi / 2)

    frame = tangent_frame(x)
    coeffs = mean_curvature_coeffs(standard_circle, 0.0, frame)
    assert coeffs.a == pytest.approx(-3.0)
    assert coeffs.aj is not None
    assert np.allclose(coeffs.aj, 0.0)
    assert coeffs.A == pytest.approx(1.0)

    H = mean_curvature_vector(standard_circle, 0.0, frame)
    assert np.allclose(H.as_real(), -point.as_real(), atol=1e-12)


def test_lagrangian_angle_grows_with_phase(standard_circle: FoliatedSpec) -> None:
    """Test beta = pi/2 + n phi on the standard embedding."""
    beta = lagrangian_angle(standard_circle, 0.7, [0.0, 0.6, 0.8])
    assert beta == pytest.approx(math.pi / 2 + 2.1)


def test_metric_and_frame(drifting: FoliatedSpec) -> None:
    """Test the induced metric and the orthonormal frame with W != 0."""
    for s, x in ((0.4, [0.6, 0.0, 0.8]), (-2.0, [0.0, -1.0, 0.0])):
        frame = tangent_frame(x)
        data = orthonormal_frame(drifting, s, frame)
        assert data.orthonormality_defect() < 1e-12

        metric = induced_metric(drifting, s, frame).metric_matrix()
        state = eval_profile(drifting.curve, s)
        W = drifting.center(s)[0]
        wx = float(W @ frame.x.x)
        expected = 1.0 + 2.0 * math.cos(state.alpha) * wx + float(W @ W)
        assert metric[0, 0] == pytest.approx(expected)
        assert np.allclose(metric[1:, 1:], state.r**2 * np.eye(2))


def test_curvature_scalar_is_k_when_centered(off_center_circle: FoliatedSpec) -> None:
    """Test that B reduces to the profile curvature for W = 0."""
    assert curvature_scalar_B(off_center_circle, 0.9, [0.0, 0.0, 1.0]) == (
        pytest.approx(1.0)
    )


def test_standard_circle_laplacian_vanishes(standard_circle: FoliatedSpec) -> None:
    """Test that beta is harmonic on the standard embedding."""
    data = delta_beta_poly_f(standard_circle, 0.5, [0.0, 1.0, 0.0])
    assert data.f == pytest.approx(0.0, abs=1e-12)
    assert data.blocks is not None
    assert sum(data.blocks) == pytest.approx(data.f)


def test_catenoid_is_hamiltonian_stationary(catenoid: FoliatedSpec) -> None:
    """Test that the Laplacian polynomial vanishes on the catenoid."""
    for s, x in ((-2.0, [1.0, 0.0, 0.0]), (0.5, [0.0, 0.6, 0.8]), (3.0, [0, 0, 1])):
        assert delta_beta_poly_f(catenoid, s, x).delta_beta == pytest.approx(
            0.0, abs=1e-9
        )


def test_centered_laplacian_matches_closed_form(
    off_center_circle: FoliatedSpec,
) -> None:
    """Test the closed form against the five-point stencil when W = 0."""
    for s in (-2.0, 0.3, 1.9):
        closed = delta_beta_poly_f(off_center_circle, s, [1.0, 0.0, 0.0]).delta_beta
        stencil = centered_laplacian_beta(off_center_circle, s)
        assert closed == pytest.approx(stencil, abs=1e-9)
        assert abs(closed) > 1e-3


def test_acceleration_coefficient(drifting: FoliatedSpec) -> None:
    """Test the <W'', x> coefficient of the Laplacian polynomial at 100 points."""
    points = sample_points(drifting, SamplePlan(count=100, seed=5))
    for s, x in points:
        assert coefficient_check_acceleration(drifting, s, x) < 1e-12


@pytest.mark.parametrize("n, leading", [(3, -4.0), (4, -10.0), (5, -18.0)])
def test_leading_term(n: int, leading: float) -> None:
    """Test the t^5 coefficient along a ladder of center velocities."""
    w = [0.4] + [0.1 * (j + 1) for j in range(n - 1)]
    x = [1.0] + [0.0] * (n - 1)
    fit = coefficient_check_leading_term(n, 1.3, 1.1, w, x)
    assert fit.expected == pytest.approx(leading * math.sin(1.1) * 0.4**5 / 1.3**2)
    assert fit.relative_error < 1e-6


def test_singular_and_undefined_points() -> None:
    """Test SingularityError at r = 0 and UndefinedAngleError at a zero factor."""
    line = make_preset("line", {"n": 3})
    with pytest.raises(SingularityError):
        mean_curvature_coeffs(line, 0.0, tangent_frame([1.0, 0.0, 0.0]))

    opposed = make_preset("line", {"n": 3, "w": [-1.0, 0.0, 0.0]})
    with pytest.raises(UndefinedAngleError):
        lagrangian_angle(opposed, 2.0, [1.0, 0.0, 0.0])
