"""Tests for the models module."""

import math
from pathlib import Path

import numpy as np
import pytest

from sigma_lagrangian.exceptions import ArtifactIOError, ValidationError
from sigma_lagrangian.models import (
    CatalogEntry,
    CheckResult,
    ComplexPoint,
    EnergyClass,
    EnergyTag,
    Family,
    FDConfig,
    HSParams,
    HSState,
    Mesh,
    PhaseResult,
    ResidualReport,
    RunConfig,
    SamplePlan,
    SphereDirection,
    StarInstance,
)


def test_hs_params_validation() -> None:
    """Test that HSParams rejects small n and non-finite flux."""
    with pytest.raises(ValidationError):
        HSParams(n=2, C=1.0)
    with pytest.raises(ValidationError):
        HSParams(n=3, C=math.nan)

    params = HSParams.from_dict({"n": 4, "C": "2.5"})
    assert params == HSParams(n=4, C=2.5)
    with pytest.raises(ValueError):
        HSParams.from_dict(None)


def test_hs_params_normalized() -> None:
    """Test the s-reversal normalisation of a negative flux."""
    normal, flipped = HSParams(n=3, C=-2.0).normalized()
    assert normal.C == 2.0
    assert flipped

    same, flipped = HSParams(n=3, C=2.0).normalized()
    assert same.C == 2.0
    assert not flipped


def test_hs_state_from_dict() -> None:
    """Test HSState parsing."""
    state = HSState.from_dict({"alpha": "1.5", "r": 2})
    assert state.alpha == 1.5
    assert state.r == 2.0


def test_complex_point_structure() -> None:
    """Test J, the inner product and the symplectic pairing."""
    u = ComplexPoint.from_complex(np.array([1 + 2j, -0.5j, 3.0]))
    assert np.allclose(u.J().J().as_complex(), -u.as_complex())
    assert u.omega(u.J()) == pytest.approx(u.inner(u))
    assert u.omega(u) == pytest.approx(0.0)
    assert ComplexPoint.from_real(u.as_real()).n == 3


def test_sphere_direction_requires_unit_length() -> None:
    """Test that SphereDirection rejects non-unit vectors."""
    assert SphereDirection(np.array([0.0, 1.0, 0.0])).n == 3
    with pytest.raises(ValidationError):
        SphereDirection(np.array([1.0, 1.0, 0.0]))


def test_residual_report_from_values() -> None:
    """Test the supremum, rms and witness of a residual report."""
    points = [(0.0, np.array([1.0, 0.0])), (1.0, np.array([0.0, 1.0]))]
    report = ResidualReport.from_values([0.5, -2.0], points, skipped=1)

    assert report.sup_norm == 2.0
    assert report.rms == pytest.approx(math.sqrt((0.25 + 4.0) / 2))
    assert report.witness == (1.0, (0.0, 1.0))
    assert report.to_dict()["skipped"] == 1

    empty = ResidualReport.from_values([], [])
    assert empty.sup_norm == 0.0
    assert empty.witness is None


def test_sample_plan_and_fd_config_validation() -> None:
    """Test range checks of the sampling and step configuration."""
    with pytest.raises(ValidationError):
        SamplePlan(count=0)
    with pytest.raises(ValidationError):
        SamplePlan(margin=0.5)
    with pytest.raises(ValidationError):
        FDConfig(h_first=0.1)
    assert FDConfig.from_dict({"h_second": 2e-3}).h_second == 2e-3
    assert SamplePlan.from_dict({"count": "5", "seed": 3}) == SamplePlan(5, 3)


def test_star_instance_requires_symmetry() -> None:
    """Test that StarInstance rejects a non-symmetric matrix."""
    with pytest.raises(ValidationError):
        StarInstance(b=np.zeros(2), bmat=np.array([[1.0, 2.0], [0.0, 1.0]]))
    instance = StarInstance.from_dict({"b": [0, 0], "bmat": [[1, 0], [0, 1]]})
    assert instance.n == 2


def test_mesh_rejects_bad_faces() -> None:
    """Test that Mesh validates face indices."""
    with pytest.raises(ValueError):
        Mesh(
            vertices=np.zeros((3, 6)),
            faces=np.array([[0, 1, 3]]),
            s=np.zeros(3),
            beta=np.zeros(3),
        )
    assert Mesh.empty(3).dimension == 6


def test_report_serialisation() -> None:
    """Test the field names used in written reports."""
    check = CheckResult(check="metric", passed=True, sup=1e-9, rms=1e-10, tol=1e-6)
    assert check.to_dict()["pass"] is True

    level = EnergyClass(EnergyTag.TYPE_I, 1.0, -1.0, (EnergyTag.TYPE_I,))
    entry = CatalogEntry(
        family=Family.CATENOID_TYPE,
        energy=1.0,
        embedded=True,
        phi=PhaseResult(value=1.0, error_estimate=1e-12),
        energy_class=level,
    )
    data = entry.to_dict()
    assert data["family"] == "CatenoidType"
    assert data["class"]["tag"] == "TypeI"

    divergent = PhaseResult.divergence("test", minus=-0.5)
    assert divergent.divergent
    assert math.isinf(divergent.value)
    assert divergent.minus == -0.5


def test_run_config_from_dict() -> None:
    """Test coercion and key checking of the run configuration."""
    cfg = RunConfig.from_dict({"s-steps": "8", "x": "0,1,0", "tol": "1e-10"})
    assert cfg.s_steps == 8
    assert cfg.x == [0.0, 1.0, 0.0]
    assert cfg.tol == 1e-10

    with pytest.raises(ValidationError):
        RunConfig.from_dict({"colour": "red"})
    with pytest.raises(ValidationError):
        RunConfig.from_dict({"samples": "many"})


def test_run_config_validate() -> None:
    """Test that validation names the offending field."""
    with pytest.raises(ValidationError, match="n: must be >= 3"):
        RunConfig(n=2).validate()
    with pytest.raises(ValidationError, match="tol"):
        RunConfig(tol=1e-14).validate()
    with pytest.raises(ValidationError, match="x"):
        RunConfig(n=3, x=[1.0, 0.0]).validate()
    assert RunConfig().validate().preset == "standard_circle"


def test_run_config_file_and_merge(tmp_path: Path) -> None:
    """Test reading a key=value file and merging command line overrides."""
    path = tmp_path / "run.cfg"
    path.write_text(
        "# example\npreset=line\nn=4\nparam=phi0=0.25\nparam=w=0.5\ns=2.5\n",
        encoding="utf-8",
    )
    cfg = RunConfig.from_file(path)
    assert cfg.preset == "line"
    assert cfg.n == 4
    assert cfg.params == {"phi0": 0.25, "w": 0.5}

    merged = cfg.merged({"s": 3.0, "params": {"w": 1.0}, "seed": None})
    assert merged.s == 3.0
    assert merged.params == {"phi0": 0.25, "w": 1.0}
    assert merged.seed == 0

    with pytest.raises(ArtifactIOError):
        RunConfig.from_file(tmp_path / "missing.cfg")
    (tmp_path / "bad.cfg").write_text("preset\n", encoding="utf-8")
    with pytest.raises(ValidationError):
        RunConfig.from_file(tmp_path / "bad.cfg")
