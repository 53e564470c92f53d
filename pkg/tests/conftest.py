"""Shared fixtures for the sigma-lagrangian tests."""

import pytest

from sigma_lagrangian.models import HSParams
from sigma_lagrangian.profile_curves import (
    CenterVelocity,
    FoliatedSpec,
    ProfileCurve,
    make_preset,
)


@pytest.fixture
def standard_circle() -> FoliatedSpec:
    """Standard embedding of S^2 x R in C^3."""
    return make_preset("standard_circle", {"n": 3})


@pytest.fixture
def catenoid() -> FoliatedSpec:
    """Three dimensional Lagrangian catenoid with unit neck."""
    return make_preset("catenoid3")


@pytest.fixture
def off_center_circle() -> FoliatedSpec:
    """Centered spec whose profile is a unit circle around 3 (not HS)."""
    curve = ProfileCurve.circle(3.0, 1.0)
    return FoliatedSpec(3, curve, CenterVelocity.zero(3), 0.0, "off_center")


@pytest.fixture
def drifting() -> FoliatedSpec:
    """Off-center circle profile with a varying center velocity ``W = phi' b``."""
    return make_preset(
        "epicycloid",
        {"n": 3, "b": [0.3, 0.2, -0.1], "curve": ProfileCurve.circle(3.0, 1.0)},
    )


@pytest.fixture
def hs_params() -> HSParams:
    """Profile ODE parameters with fixed point (pi/2, 1) and E0 = -1."""
    return HSParams(n=3, C=3.0)
