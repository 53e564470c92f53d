"""End-to-end tests of the command line front end."""

import csv
import io
import json
import math
from pathlib import Path
from typing import List

import pytest

from sigma_lagrangian.cli import cli_main

pytestmark = pytest.mark.integration


def _rows(text: str) -> List[List[str]]:
    return list(csv.reader(io.StringIO(text)))


def test_eval_standard_circle(capsys: pytest.CaptureFixture) -> None:
    """Test the JSON report of the standard embedding at s = 0."""
    assert cli_main(["eval", "--preset", "standard_circle", "--n", "3"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["preset"] == "standard_circle"
    assert report["beta"] == pytest.approx(math.pi / 2)
    assert report["a"] == pytest.approx(-3.0)
    assert report["re"] == pytest.approx([1.0, 0.0, 0.0])
    assert report["im"] == pytest.approx([0.0, 0.0, 0.0], abs=1e-12)
    assert report["delta_beta"] == pytest.approx(0.0, abs=1e-12)


def test_invalid_input_exits_with_one(capsys: pytest.CaptureFixture) -> None:
    """Test rejected dimensions, unknown flags and a missing command."""
    assert cli_main(["eval", "--n", "2"]) == 1
    assert "n: must be >= 3" in capsys.readouterr().err

    assert cli_main(["eval", "--bogus"]) == 1
    assert cli_main([]) == 1
    assert cli_main(["eval", "--preset", "torus"]) == 1
    assert cli_main(["hs"]) == 1


def test_hs_solve_conserves_energy(capsys: pytest.CaptureFixture) -> None:
    """Test the trajectory table of a bounded orbit."""
    assert cli_main(["hs", "solve", "--n", "3", "--C", "3", "--r0", "0.5"]) == 0
    rows = _rows(capsys.readouterr().out)
    assert rows[0] == ["s", "alpha", "r", "E", "k"]
    assert len(rows) > 10
    for row in rows[1:]:
        assert float(row[3]) == pytest.approx(-0.5, abs=1e-8)


def test_phase_table(capsys: pytest.CaptureFixture) -> None:
    """Test the columns of an energy sweep through E0."""
    assert cli_main(["phase", "--n", "3", "--C", "3", "--table=-3:1:5"]) == 0
    rows = _rows(capsys.readouterr().out)
    assert rows[0] == [
        "E",
        "class",
        "phi_total",
        "phi_plus",
        "phi_minus",
        "divergent_flag",
        "self_intersections",
    ]
    assert [row[1] for row in rows[1:]] == [
        "TypeII",
        "TypeII",
        "Critical",
        "TypeI",
        "TypeI",
    ]
    assert rows[3][5] == "true"
    assert rows[3][6] == "0"
    assert int(rows[1][6]) >= 1
    assert float(rows[1][3]) > abs(float(rows[1][4]))


def test_phase_needs_energy(capsys: pytest.CaptureFixture) -> None:
    """Test that phase without --E or --table is invalid."""
    assert cli_main(["phase", "--C", "3"]) == 1
    assert "E:" in capsys.readouterr().err


def test_mesh_csv(capsys: pytest.CaptureFixture) -> None:
    """Test the CSV vertex table of a small mesh."""
    args = ["mesh", "--format", "csv", "--s-steps", "2", "--sphere-steps", "4"]
    assert cli_main(args) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "x1,x2,x3,x4,x5,x6,s,beta"
    assert len(lines) == 29


def test_mesh_dimension_rules(capsys: pytest.CaptureFixture) -> None:
    """Test the n = 4 refusal and the point-table alternative."""
    assert cli_main(["mesh", "--n", "4"]) == 1
    capsys.readouterr()

    args = ["mesh", "--n", "4", "--points", "--samples", "5", "--format", "csv"]
    assert cli_main(args) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 6
    assert lines[0].split(",")[-3:] == ["x8", "s", "beta"]


def test_config_file_and_out(tmp_path: Path) -> None:
    """Test a configuration file combined with an output path."""
    config = tmp_path / "run.cfg"
    config.write_text(
        "# standard embedding\npreset=standard_circle\ns=0.5\nx=0,1,0\n",
        encoding="utf-8",
    )
    out = tmp_path / "eval.json"
    assert cli_main(["eval", "--config", str(config), "--out", str(out)]) == 0
    report = json.loads(out.read_text(encoding="utf-8"))
    assert report["s"] == 0.5
    assert report["beta"] == pytest.approx(math.pi / 2 + 1.5)


def test_curve_table(capsys: pytest.CaptureFixture) -> None:
    """Test the profile samples of the catenoid."""
    assert cli_main(["curve", "--preset", "catenoid3", "--samples", "5"]) == 0
    rows = _rows(capsys.readouterr().out)
    assert rows[0] == ["s", "r", "phi", "alpha", "k"]
    assert len(rows) == 6
    assert float(rows[3][1]) == pytest.approx(1.0)


@pytest.mark.slow
def test_verify_catenoid(capsys: pytest.CaptureFixture) -> None:
    """Test that the catenoid passes every oracle."""
    assert cli_main(["verify", "--preset", "catenoid3", "--samples", "3"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["pass"] is True
    assert {row["check"] for row in report["checks"]} >= {"lagrangian", "metric"}


@pytest.mark.slow
def test_catalog(capsys: pytest.CaptureFixture) -> None:
    """Test one row per family for n = 3, C = 3."""
    assert cli_main(["catalog", "--n", "3", "--C", "3"]) == 0
    rows = _rows(capsys.readouterr().out)
    assert len(rows) == 6
    assert rows[1][2] == "StandardEmbedding"
