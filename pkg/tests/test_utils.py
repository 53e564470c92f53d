"""Tests for the `utils` module."""

import logging
import math

import pytest

from sigma_lagrangian.exceptions import ValidationError
from sigma_lagrangian.utils import (
    angle_difference,
    configure_logging,
    format_float,
    parse_float_list,
    parse_key_values,
    parse_range,
    range_values,
    wrap_angle,
)


def test_wrap_angle() -> None:
    """Test reduction of angles to [0, 2 pi)."""
    assert wrap_angle(-math.pi / 2) == pytest.approx(1.5 * math.pi)
    assert wrap_angle(5 * math.pi) == pytest.approx(math.pi)
    assert 0.0 <= wrap_angle(-1e-18) < 2 * math.pi


def test_angle_difference() -> None:
    """Test that differences are wrapped into (-pi, pi]."""
    assert angle_difference(0.1, 2 * math.pi - 0.1) == pytest.approx(0.2)
    assert angle_difference(0.0, math.pi) == pytest.approx(math.pi)


def test_format_float_round_trips() -> None:
    """Test that formatted floats parse back to the same value."""
    for value in (0.1, 1 / 3, -2.5e-300, math.pi * 1e20):
        assert float(format_float(value)) == value


def test_parsers() -> None:
    """Test the command line value parsers."""
    assert parse_float_list("1, 0,0") == [1.0, 0.0, 0.0]
    assert parse_key_values(["rho=2", "phi0 = 0.5"]) == {"rho": 2.0, "phi0": 0.5}
    assert parse_range("-3:1:5") == (-3.0, 1.0, 5)
    assert list(range_values("0:1:3")) == [0.0, 0.5, 1.0]

    with pytest.raises(ValidationError):
        parse_float_list("1,a")
    with pytest.raises(ValidationError):
        parse_key_values(["rho"])
    with pytest.raises(ValidationError):
        parse_range("0:1")
    with pytest.raises(ValidationError):
        parse_range("0:1:0")


def test_configure_logging(monkeypatch: pytest.MonkeyPatch) -> None:
    """Test level selection from the argument and the environment."""
    configure_logging("debug")
    assert logging.getLogger("sigma_lagrangian").level == logging.DEBUG

    monkeypatch.setenv("SIGMA_LOG", "INFO")
    configure_logging()
    assert logging.getLogger("sigma_lagrangian").level == logging.INFO

    configure_logging("not-a-level")
    assert logging.getLogger("sigma_lagrangian").level == logging.WARNING
