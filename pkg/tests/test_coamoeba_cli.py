"""
Tests for coamoeba_cli module.

Runs main() in-process on problem files under tmp_path and checks the JSON
report, the exit codes and the files written.
"""

from __future__ import annotations

import csv
import json
from fractions import Fraction
from pathlib import Path

import pytest
from conftest import HYPOCYCLOID, PLANAR_SIMPLEX, QUADRATIC, UNIT_SQUARE, write_problem

from coamoeba_cli import (
    build_parser,
    main,
    parse_coefficient,
    parse_coefficients,
    parse_grid,
    parse_system,
)
from coamoeba_config import CoamoebaConfig
from coamoeba_utils import InvalidProblemSpec


def _points(points: tuple[tuple[int, ...], ...]) -> dict[str, object]:
    return {"points": [list(p) for p in points]}


def _run(capsys: pytest.CaptureFixture[str], argv: list[str]) -> dict[str, object]:
    assert main(argv) == CoamoebaConfig.EXIT_OK
    return json.loads(capsys.readouterr().out)


class TestParsing:
    """Tests for the problem-file parsers."""

    def test_bare_integer_is_exact(self) -> None:
        """Signed integers carry exact arguments 0 and 1."""
        assert parse_coefficient(-3) == (-3 + 0j, Fraction(1))

    def test_polar_entry(self) -> None:
        """modulus / argument_over_pi keeps the exact argument."""
        value, argument = parse_coefficient({"modulus": 2, "argument_over_pi": "1/2"})
        assert value == pytest.approx(2j)
        assert argument == Fraction(1, 2)

    def test_cartesian_entry_is_inexact(self) -> None:
        """re / im entries carry no exact argument."""
        assert parse_coefficient({"re": 1.5, "im": -2})[1] is None

    @pytest.mark.parametrize("entry", [True, "1", {"foo": 1}, {"re": "x"}])
    def test_invalid_entries(self, entry: object) -> None:
        """Anything else is rejected as an invalid problem file."""
        with pytest.raises(InvalidProblemSpec):
            parse_coefficient(entry)

    def test_mixed_vector_detects_axes(self) -> None:
        """Without an exact argument everywhere, arguments are detected from values."""
        coeffs = parse_coefficients([1, {"re": -2, "im": 0}])
        assert coeffs.arguments_over_pi == (Fraction(0), Fraction(1))

    def test_grid(self) -> None:
        """Moduli may be p/q strings; arguments stay exact."""
        index, moduli, arguments = parse_grid({"index": 2, "moduli": ["1/4", 2], "arguments_over_pi": ["0", 0.5]})
        assert index == 2
        assert moduli == [0.25, 2.0]
        assert arguments == [Fraction(0), 0.5]

    def test_grid_needs_index(self) -> None:
        """The varied coefficient index is required."""
        with pytest.raises(InvalidProblemSpec):
            parse_grid({"moduli": [1], "arguments_over_pi": [0]})

    def test_reduced_system(self) -> None:
        """A 'reduced' system is taken as given."""
        system = parse_system({**_points(((1, 0), (0, 1), (0, 0), (-1, -1))), "reduced": [1, 2, 3, 4]})
        assert system.coefficients == (1, 2, 3, 4)

    def test_system_needs_polynomials(self) -> None:
        """Points alone are not a system."""
        with pytest.raises(InvalidProblemSpec):
            parse_system(_points(PLANAR_SIMPLEX))


class TestParser:
    """Tests for build_parser."""

    def test_defaults(self) -> None:
        """Resolution, seed and trials fall back to the configured defaults."""
        args = build_parser().parse_args(["profile"])
        assert args.resolution == CoamoebaConfig.DEFAULT_RESOLUTION
        assert args.seed == CoamoebaConfig.DEFAULT_SEED
        assert args.trials == CoamoebaConfig.DEFAULT_TRIALS
        assert not args.lopsided

    def test_unknown_command(self) -> None:
        """argparse rejects unknown subcommands."""
        with pytest.raises(SystemExit):
            build_parser().parse_args(["bogus"])


@pytest.mark.integration
class TestCommands:
    """End-to-end runs of main()."""

    def test_profile(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        """profile reports the Gale vector and discriminant of {0, 1, 2}."""
        config = write_problem(tmp_path, "c.json", _points(QUADRATIC))
        report = _run(capsys, ["profile", "--config", str(config)])
        assert report["tool"] == "coamoeba"
        assert report["command"] == "profile"
        result = report["result"]
        assert result["raw_gale"] == [1, -2, 1]  # type: ignore[index]
        assert result["discriminant"]["reduced_form"] == "1 - 4*xi"  # type: ignore[index]
        assert report["configuration"]["config"] == _points(QUADRATIC)  # type: ignore[index]

    def test_index_set(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        """Positive coefficients on the hypocycloid: orders -2, 0, 2."""
        config = write_problem(tmp_path, "c.json", _points(HYPOCYCLOID))
        coeffs = write_problem(tmp_path, "f.json", [1, 1, 1, 1])
        report = _run(capsys, ["index-set", "--config", str(config), "--coeffs", str(coeffs)])
        assert report["result"]["order_values_over_pi"] == ["-2", "0", "2"]  # type: ignore[index]

    def test_classify(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        """1 + z + z^2/10 is U1 and both sign conventions are echoed."""
        config = write_problem(tmp_path, "c.json", _points(QUADRATIC))
        coeffs = write_problem(tmp_path, "f.json", [1, 1, {"modulus": 0.1, "argument_over_pi": 0}])
        result = _run(capsys, ["classify", "--config", str(config), "--coeffs", str(coeffs)])["result"]
        assert result["class"] == "U1"  # type: ignore[index]
        assert result["discriminant_coamoeba"]["member"] is True  # type: ignore[index]
        assert set(result["closed_form_u1"]) == {"calibrated", "printed"}  # type: ignore[index, arg-type]

    def test_sweep_csv(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        """sweep writes one CSV row per grid point."""
        config = write_problem(tmp_path, "c.json", _points(QUADRATIC))
        coeffs = write_problem(tmp_path, "f.json", [1, 1, 1])
        grid = write_problem(tmp_path, "g.json", {"index": 2, "moduli": [0.1, 2.0], "arguments_over_pi": ["0", "1"]})
        out = tmp_path / "sweep.csv"
        argv = ["sweep", "--config", str(config), "--coeffs", str(coeffs), "--grid", str(grid), "--out", str(out)]
        result = _run(capsys, argv)["result"]
        assert result["counts"] == {"U0": 3, "U1": 1}  # type: ignore[index]
        with out.open() as f:
            rows = list(csv.reader(f))
        assert rows[0] == ["modulus", "argument_over_pi", "class"]
        assert len(rows) == 5

    def test_render(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        """render writes a P6 image of the requested size."""
        config = write_problem(tmp_path, "c.json", _points(((0, 0), (1, 0), (0, 1))))
        coeffs = write_problem(tmp_path, "f.json", [1, 1, 1])
        out = tmp_path / "img.ppm"
        argv = ["render", "--config", str(config), "--coeffs", str(coeffs), "--resolution", "32", "--out", str(out)]
        result = _run(capsys, argv)["result"]
        assert out.read_bytes().startswith(b"P6\n32 32\n255\n")
        assert result["resolution"] == 32  # type: ignore[index]

    def test_area_lopsided(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        """--lopsided rasterizes L_f: half the torus for the unit square."""
        config = write_problem(tmp_path, "c.json", _points(UNIT_SQUARE))
        coeffs = write_problem(tmp_path, "f.json", [1, 1, 1, 1])
        argv = ["area", "--config", str(config), "--coeffs", str(coeffs), "--resolution", "128", "--lopsided"]
        result = _run(capsys, argv)["result"]
        assert result["area_over_pi_squared"] == pytest.approx(2.0, abs=0.08)  # type: ignore[index]

    def test_critical(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        """critical moves {0, 1, 2} to special form before solving."""
        config = write_problem(tmp_path, "c.json", _points(QUADRATIC))
        coeffs = write_problem(tmp_path, "f.json", [1, 1, -1])
        result = _run(capsys, ["critical", "--config", str(config), "--coeffs", str(coeffs)])["result"]
        assert result["special_form"][1] == [0]  # type: ignore[index]
        assert result["consistent"] is True  # type: ignore[index]

    def test_solve_system(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        """Two generic polynomials on the planar simplex have three roots."""
        system = write_problem(
            tmp_path,
            "s.json",
            {**_points(PLANAR_SIMPLEX), "polynomials": [[1, 2, {"re": 0.5, "im": 1}, -1], [3, -1, 1, {"re": 0, "im": 2}]]},
        )
        result = _run(capsys, ["solve-system", "--system", str(system)])["result"]
        assert result["volume"] == 3  # type: ignore[index]
        assert len(result["roots"]) == 3  # type: ignore[index, arg-type]
        assert result["max_cluster"] <= 2  # type: ignore[index, operator]

    def test_tolerance_override(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        """--tolerance NAME=VALUE shows up in the report envelope."""
        config = write_problem(tmp_path, "c.json", _points(QUADRATIC))
        argv = ["profile", "--config", str(config), "--tolerance", "sector_tolerance=1e-4"]
        assert _run(capsys, argv)["tolerances"]["sector_tolerance"] == 1e-4  # type: ignore[index]

    def test_tolerance_override_changes_result(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        """An echoed angle_tolerance is the one the raster used."""
        config = write_problem(tmp_path, "c.json", _points(UNIT_SQUARE))
        coeffs = write_problem(tmp_path, "f.json", [1, 1, 1, 1])
        argv = ["area", "--config", str(config), "--coeffs", str(coeffs), "--resolution", "64", "--lopsided"]
        default = _run(capsys, argv)["result"]["area_over_pi_squared"]  # type: ignore[index]
        loose = _run(capsys, [*argv, "--tolerance", "angle_tolerance=3.0"])
        assert loose["tolerances"]["angle_tolerance"] == 3.0  # type: ignore[index]
        assert default == pytest.approx(2.0, abs=0.1)
        assert loose["result"]["area_over_pi_squared"] > 3.8  # type: ignore[index]
        assert CoamoebaConfig.ANGLE_TOLERANCE == 1e-12

    def test_campaign(self, capsys: pytest.CaptureFixture[str]) -> None:
        """A tiny campaign reports its trial count and seed."""
        report = _run(capsys, ["fewnomial-campaign", "--trials", "2", "--seed", "11"])
        assert report["seed"] == 11
        assert report["result"]["trials"] == 2  # type: ignore[index]


@pytest.mark.integration
class TestExitCodes:
    """Errors map to exit codes with a message on stderr."""

    def test_wrong_cardinality(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        """Three planar points are not a circuit."""
        config = write_problem(tmp_path, "c.json", {"points": [[0, 0], [1, 0], [0, 1]]})
        assert main(["profile", "--config", str(config)]) == CoamoebaConfig.EXIT_VALIDATION
        assert "Error:" in capsys.readouterr().err

    def test_missing_file(self, tmp_path: Path) -> None:
        """A missing problem file is a validation error."""
        assert main(["profile", "--config", str(tmp_path / "absent.json")]) == CoamoebaConfig.EXIT_VALIDATION

    def test_missing_coefficients(self, tmp_path: Path) -> None:
        """Commands needing --coeffs say so."""
        config = write_problem(tmp_path, "c.json", _points(QUADRATIC))
        assert main(["classify", "--config", str(config)]) == CoamoebaConfig.EXIT_VALIDATION

    def test_pyramid_is_degenerate(self, tmp_path: Path) -> None:
        """index-set on a pyramid exits with the degeneracy code."""
        config = write_problem(tmp_path, "c.json", {"points": [[0, 0], [1, 0], [2, 0], [0, 1]]})
        coeffs = write_problem(tmp_path, "f.json", [1, 1, 1, 1])
        argv = ["index-set", "--config", str(config), "--coeffs", str(coeffs)]
        assert main(argv) == CoamoebaConfig.EXIT_DEGENERACY

    def test_bad_tolerance_name(self, tmp_path: Path) -> None:
        """Unknown tolerance names are rejected."""
        config = write_problem(tmp_path, "c.json", _points(QUADRATIC))
        assert main(["profile", "--config", str(config), "--tolerance", "nope=1"]) == CoamoebaConfig.EXIT_VALIDATION

    def test_structure_check_margin_is_not_a_setting(self, tmp_path: Path) -> None:
        """h_margin only feeds the sampled checks, so the CLI rejects it."""
        config = write_problem(tmp_path, "c.json", _points(QUADRATIC))
        assert main(["profile", "--config", str(config), "--tolerance", "h_margin=0.5"]) == CoamoebaConfig.EXIT_VALIDATION
