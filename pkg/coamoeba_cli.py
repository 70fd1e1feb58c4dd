#!/usr/bin/env python3
"""
coamoeba_cli.py

Command-line front end for the coamoeba toolkit.

Reads JSON problem files, runs one computation and prints a deterministic JSON
report on stdout. Images (render) and CSV tables (sweep --out) are written to
files. Logging goes to stderr and is silent below WARNING unless -v is given.

Usage:
    coamoeba profile --config c.json
    coamoeba classify --config c.json --coeffs f.json
    coamoeba render --config c.json --coeffs f.json --resolution 512 --out img.ppm
    coamoeba fewnomial-campaign --trials 200 --seed 7

Problem files:
    configuration  {"points": [[0, 0], [1, 0], [0, 1], [1, 1]]}
    coefficients   [{"re": 1, "im": 0}, {"modulus": 2, "argument_over_pi": "1/3"}, ...]
    system         {"points": [...4 points...], "polynomials": [[4 coeffs], [4 coeffs]]}
                   or {"points": [...], "reduced": [f1, f2, f3, f4]}
    sweep grid     {"index": 2, "moduli": [0.5, 1.0], "arguments_over_pi": ["0", "1/5"]}
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from collections.abc import Callable, Sequence
from fractions import Fraction
from pathlib import Path
from typing import cast

from coamoeba_config import CoamoebaConfig, ToleranceSettings, applied_settings, load_settings
from coamoeba_utils import (
    CoamoebaError,
    DegenerateCircuit,
    InvalidProblemSpec,
    fail,
    format_over_pi,
    integer_vectors,
    parse_angle_over_pi,
    parse_exact,
)
from critical_arguments import to_special_form, verify_index_set
from discriminant_classifier import (
    SignConvention,
    classify_space,
    discriminant,
    in_discriminant_coamoeba,
    space_inequality,
    sweep,
)
from integer_geometry import (
    CircuitKind,
    PointConfiguration,
    Support,
    equimodular_check,
    profile,
    special_blocks,
    validate,
)
from phase_engine import CoefficientVector, OverPi, complement_index_set, shell
from planar_raster import RasterImage, complement_components, raster_coamoeba, raster_lopsided, write_ppm
from system_solver import CircuitSystem, fewnomial_campaign, reduce_to_trinomials, sector_census, solve_system

logger = logging.getLogger(__name__)

COMMANDS = (
    "profile",
    "index-set",
    "shell",
    "classify",
    "sweep",
    "area",
    "render",
    "critical",
    "solve-system",
    "fewnomial-campaign",
)


# ============================================================================
# PROBLEM FILES
# ============================================================================


def _read_json(path: str | Path) -> object:
    target = Path(path)
    try:
        with target.open() as f:
            return cast("object", json.load(f))
    except FileNotFoundError as e:
        raise InvalidProblemSpec(f"Problem file not found: {target}") from e
    except json.JSONDecodeError as e:
        raise InvalidProblemSpec(f"Invalid JSON in {target}:\n  {e}") from e


def parse_points(data: object) -> tuple[tuple[int, ...], ...]:
    """Points from {"points": [...]} or a bare list."""
    if isinstance(data, dict):
        data = cast("dict[str, object]", data).get("points")
    if not isinstance(data, list) or not all(isinstance(p, list) for p in data):
        fail(InvalidProblemSpec, f"Expected a list of integer points, got {data!r}")
    return integer_vectors(cast("list[list[object]]", data))


def parse_coefficient(entry: object) -> tuple[complex, Fraction | None]:
    """
    One coefficient and, when given exactly, its argument over pi.

    Accepts {"re", "im"}, {"modulus", "argument_over_pi"} or a bare number.
    """
    if isinstance(entry, int | float) and not isinstance(entry, bool):
        value = complex(entry)
        exact = None
        if isinstance(entry, int) and entry != 0:
            exact = Fraction(0) if entry > 0 else Fraction(1)
        return value, exact
    if not isinstance(entry, dict):
        fail(InvalidProblemSpec, f"Expected a coefficient object, got {entry!r}")
    fields = cast("dict[str, object]", entry)
    if "modulus" in fields:
        modulus = fields["modulus"]
        if isinstance(modulus, bool) or not isinstance(modulus, int | float | str):
            fail(InvalidProblemSpec, f"Invalid modulus {modulus!r}")
        argument = parse_angle_over_pi(fields.get("argument_over_pi", 0))
        value = CoefficientVector.from_polar([float(Fraction(modulus))], [argument]).values[0]
        return value, argument if isinstance(argument, Fraction) else None
    if "re" in fields or "im" in fields:
        try:
            re = float(cast("float", fields.get("re", 0)))
            im = float(cast("float", fields.get("im", 0)))
        except (TypeError, ValueError) as e:
            raise InvalidProblemSpec(f"Invalid coefficient {entry!r}: {e}") from e
        return complex(re, im), None
    fail(InvalidProblemSpec, f"Coefficient needs re/im or modulus/argument_over_pi, got {entry!r}")


def parse_coefficients(data: object) -> CoefficientVector:
    """
    Coefficient vector from a JSON list.

    Exact arguments are kept only when every entry supplies one; otherwise
    they are detected from the values.
    """
    if isinstance(data, dict):
        data = cast("dict[str, object]", data).get("coefficients")
    if not isinstance(data, list):
        fail(InvalidProblemSpec, f"Expected a list of coefficients, got {data!r}")
    parsed = [parse_coefficient(entry) for entry in cast("list[object]", data)]
    values = tuple(v for v, _ in parsed)
    if all(a is not None for _, a in parsed):
        return CoefficientVector(values=values, arguments_over_pi=tuple(a for _, a in parsed if a is not None))
    return CoefficientVector(values=values)


def parse_system(data: object) -> CircuitSystem:
    """
    A two-polynomial system, reduced to its trinomial pair.

    Raises:
        InvalidProblemSpec: If neither "polynomials" nor "reduced" is usable
        SingularElimination: If the polynomials are proportional
    """
    if not isinstance(data, dict):
        fail(InvalidProblemSpec, f"Expected a system object, got {data!r}")
    fields = cast("dict[str, object]", data)
    points = parse_points(fields)
    if len(points) != 4:
        fail(InvalidProblemSpec, f"A planar circuit system has 4 points, got {len(points)}")

    if "reduced" in fields:
        reduced = parse_coefficients(fields["reduced"]).values
        if len(reduced) != 4:
            fail(InvalidProblemSpec, f"'reduced' needs f1..f4, got {len(reduced)} values")
        validate(points)
        return CircuitSystem(points=cast("tuple", points), coefficients=cast("tuple", reduced))

    polynomials = fields.get("polynomials")
    if not isinstance(polynomials, list) or len(cast("list[object]", polynomials)) != 2:
        fail(InvalidProblemSpec, "System needs 'polynomials' (two coefficient lists) or 'reduced'")
    first, second = (parse_coefficients(p).values for p in cast("list[object]", polynomials))
    return reduce_to_trinomials(points, first, second)


def parse_grid(data: object) -> tuple[int, list[float], list[OverPi]]:
    """(index, moduli, arguments over pi) of a sweep grid."""
    if not isinstance(data, dict):
        fail(InvalidProblemSpec, f"Expected a sweep grid object, got {data!r}")
    fields = cast("dict[str, object]", data)
    index = fields.get("index")
    moduli = fields.get("moduli")
    arguments = fields.get("arguments_over_pi")
    if isinstance(index, bool) or not isinstance(index, int):
        fail(InvalidProblemSpec, f"Sweep grid 'index' must be an integer, got {index!r}")
    if not isinstance(moduli, list) or not isinstance(arguments, list):
        fail(InvalidProblemSpec, "Sweep grid needs 'moduli' and 'arguments_over_pi' lists")
    return (
        index,
        [float(parse_exact(m)) if isinstance(m, str) else float(cast("float", m)) for m in cast("list[object]", moduli)],
        [parse_angle_over_pi(a) for a in cast("list[object]", arguments)],
    )


# ============================================================================
# COMMANDS
# ============================================================================


def _configuration(args: argparse.Namespace) -> PointConfiguration:
    path = cast("str | None", args.config)
    if path is None:
        fail(InvalidProblemSpec, f"'{cast('str', args.command)}' needs --config")
    return validate(parse_points(_read_json(path)))


def _support(args: argparse.Namespace) -> Support:
    """Any planar support; rasters do not need a circuit."""
    path = cast("str | None", args.config)
    if path is None:
        fail(InvalidProblemSpec, f"'{cast('str', args.command)}' needs --config")
    points = parse_points(_read_json(path))
    if len(points) < 2 or any(len(p) != 2 for p in points):
        fail(InvalidProblemSpec, f"Rasters need at least two planar points, got {list(points)}")
    return Support(n=2, points=points)


def _coefficients(args: argparse.Namespace, size: int) -> CoefficientVector:
    path = cast("str | None", args.coeffs)
    if path is None:
        fail(InvalidProblemSpec, f"'{cast('str', args.command)}' needs --coeffs")
    coeffs = parse_coefficients(_read_json(path))
    if coeffs.size != size:
        fail(InvalidProblemSpec, f"{coeffs.size} coefficients given for {size} points")
    return coeffs


def _resolution(args: argparse.Namespace) -> int:
    resolution = cast("int", args.resolution)
    if resolution <= 0:
        fail(InvalidProblemSpec, f"--resolution must be positive, got {resolution}")
    return resolution


def cmd_profile(args: argparse.Namespace, _settings: ToleranceSettings) -> dict[str, object]:
    config = _configuration(args)
    prof = profile(config)
    result: dict[str, object] = {
        "raw_gale": list(prof.raw_gale),
        "primitive_gale": list(prof.primitive_gale),
        "signs": list(prof.signs),
        "volumes": list(prof.volumes),
        "total_volume": prof.total_volume,
        "normalized_volume": prof.normalized_volume,
        "lattice_index": prof.lattice_index,
        "kind": prof.kind.value,
    }
    if prof.kind is CircuitKind.DEGENERATE:
        return result
    verdict = equimodular_check(prof)
    result.update(
        {
            "triangulations": {
                "plus": [list(s) for s in prof.triangulations[0]],
                "minus": [list(s) for s in prof.triangulations[1]],
            },
            "equimodular": verdict.equimodular,
            "discriminant": discriminant(config).to_json(),
            "special_orthogonal_form": special_blocks(config) is not None,
        }
    )
    return result


def cmd_index_set(args: argparse.Namespace, _settings: ToleranceSettings) -> dict[str, object]:
    config = _configuration(args)
    return complement_index_set(config, _coefficients(args, config.size)).to_json()


def cmd_shell(args: argparse.Namespace, _settings: ToleranceSettings) -> dict[str, object]:
    config = _configuration(args)
    families = shell(config, _coefficients(args, config.size))
    return {"families": [f.to_json() for f in families]}


def cmd_classify(args: argparse.Namespace, settings: ToleranceSettings) -> dict[str, object]:
    config = _configuration(args)
    coeffs = _coefficients(args, config.size)
    tolerance = CoamoebaConfig.get_tolerance("indeterminacy_tolerance", settings)
    space = classify_space(config, coeffs, tolerance=tolerance)
    membership = in_discriminant_coamoeba(config, coeffs)
    result = space.to_json()
    result["discriminant_coamoeba"] = {
        "member": membership.member,
        "scalar_agrees": membership.scalar_agrees,
        "phase_over_pi": None if membership.phase_over_pi is None else format_over_pi(membership.phase_over_pi),
    }
    if membership.member and profile(config).kind is CircuitKind.SIMPLEX:
        result["closed_form_u1"] = {
            c.value: space_inequality(config, coeffs, convention=c) for c in SignConvention
        }
    return result


def cmd_sweep(args: argparse.Namespace, _settings: ToleranceSettings) -> dict[str, object]:
    config = _configuration(args)
    coeffs = _coefficients(args, config.size)
    grid_path = cast("str | None", args.grid)
    if grid_path is None:
        fail(InvalidProblemSpec, "'sweep' needs --grid")
    kappa, moduli, arguments = parse_grid(_read_json(grid_path))
    rows = sweep(config, coeffs, kappa, moduli, arguments)
    out = cast("str | None", args.out)
    if out is not None:
        target = Path(out)
        target.parent.mkdir(parents=True, exist_ok=True)
        with target.open("w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["modulus", "argument_over_pi", "class"])
            for row in rows:
                writer.writerow([row.modulus, format_over_pi(row.argument_over_pi), row.label])
        logger.info(f"[Sweep] wrote {len(rows)} rows to {target}")
    return {
        "index": kappa,
        "rows": [row.to_json() for row in rows],
        "counts": {label: sum(1 for r in rows if r.label == label) for label in sorted({r.label for r in rows})},
    }


def _raster(args: argparse.Namespace) -> RasterImage:
    config = _support(args)
    coeffs = _coefficients(args, config.size)
    resolution = _resolution(args)
    if cast("bool", args.lopsided):
        return raster_lopsided(config, coeffs, resolution)
    return raster_coamoeba(config, coeffs, resolution)


def cmd_area(args: argparse.Namespace, _settings: ToleranceSettings) -> dict[str, object]:
    image = _raster(args)
    return {**image.to_json(), "complement_components": complement_components(image)}


def cmd_render(args: argparse.Namespace, _settings: ToleranceSettings) -> dict[str, object]:
    out = cast("str | None", args.out)
    if out is None:
        fail(InvalidProblemSpec, "'render' needs --out")
    image = _raster(args)
    target = write_ppm(image, out)
    return {**image.to_json(), "image": str(target)}


def cmd_critical(args: argparse.Namespace, _settings: ToleranceSettings) -> dict[str, object]:
    config = _configuration(args)
    coeffs = _coefficients(args, config.size)
    special = config
    if special_blocks(config) is None:
        special = to_special_form(config).config
        logger.info(f"[Critical] special orthogonal form: {special.points}")
    report = verify_index_set(special, coeffs)
    return {**report.to_json(), "special_form": [list(p) for p in special.points]}


def cmd_solve_system(args: argparse.Namespace, settings: ToleranceSettings) -> dict[str, object]:
    path = cast("str | None", args.system)
    if path is None:
        fail(InvalidProblemSpec, "'solve-system' needs --system")
    system = parse_system(_read_json(path))
    found = solve_system(system, tolerance=CoamoebaConfig.get_tolerance("system_residual_tolerance", settings))
    report = sector_census(system, found, tolerance=CoamoebaConfig.get_tolerance("sector_tolerance", settings))
    try:
        volume: int | None = profile(system.config).total_volume
    except DegenerateCircuit:
        volume = None
    return {**report.to_json(), "system": system.to_json(), "volume": volume}


def cmd_fewnomial_campaign(args: argparse.Namespace, _settings: ToleranceSettings) -> dict[str, object]:
    trials = cast("int", args.trials)
    if trials < 0:
        fail(InvalidProblemSpec, f"--trials must be non-negative, got {trials}")
    return fewnomial_campaign(trials=trials, seed=cast("int", args.seed)).to_json()


HANDLERS: dict[str, Callable[[argparse.Namespace, ToleranceSettings], dict[str, object]]] = {
    "profile": cmd_profile,
    "index-set": cmd_index_set,
    "shell": cmd_shell,
    "classify": cmd_classify,
    "sweep": cmd_sweep,
    "area": cmd_area,
    "render": cmd_render,
    "critical": cmd_critical,
    "solve-system": cmd_solve_system,
    "fewnomial-campaign": cmd_fewnomial_campaign,
}


# ============================================================================
# REPORTS
# ============================================================================


def _tolerance_overrides(settings: ToleranceSettings, overrides: Sequence[str]) -> ToleranceSettings:
    """Apply NAME=VALUE overrides from --tolerance."""
    merged = cast("ToleranceSettings", dict(settings))
    for item in overrides:
        name, sep, raw = item.partition("=")
        if not sep:
            fail(InvalidProblemSpec, f"--tolerance expects NAME=VALUE, got {item!r}")
        try:
            CoamoebaConfig.get_tolerance(name.strip())
            merged[name.strip()] = float(raw)  # type: ignore[literal-required]
        except ValueError as e:
            raise InvalidProblemSpec(str(e)) from e
    return merged


def _configuration_echo(args: argparse.Namespace) -> dict[str, object]:
    echo: dict[str, object] = {}
    for key in ("config", "coeffs", "system", "grid"):
        path = cast("str | None", getattr(args, key, None))
        if path is not None:
            echo[key] = _read_json(path)
    for key in ("resolution", "trials", "lopsided"):
        if hasattr(args, key):
            echo[key] = getattr(args, key)
    return echo


def run(args: argparse.Namespace) -> dict[str, object]:
    """
    Run one subcommand and wrap its result in the report envelope.

    The merged tolerances are installed for the whole run, so the echoed
    "tolerances" are the ones every computation used.

    Raises:
        CoamoebaError: Whatever the command raises; main() maps it to an exit code
    """
    command = cast("str", args.command)
    settings = load_settings(cast("str | None", args.settings))
    settings = _tolerance_overrides(settings, cast("list[str]", args.tolerance or []))
    seed = cast("int", args.seed)
    with applied_settings(settings):
        result = HANDLERS[command](args, settings)
    return {
        "tool": CoamoebaConfig.TOOL_NAME,
        "version": CoamoebaConfig.VERSION,
        "command": command,
        "seed": seed,
        "tolerances": dict(settings),
        "configuration": _configuration_echo(args),
        "result": result,
    }


def render_report(report: dict[str, object]) -> str:
    return json.dumps(report, indent=2, sort_keys=True, default=str)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=CoamoebaConfig.TOOL_NAME,
        description="Compute, classify and verify coamoebas of circuit polynomials",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    _ = parser.add_argument("command", choices=COMMANDS, help="Computation to run")
    _ = parser.add_argument("--config", default=None, help="Point configuration JSON")
    _ = parser.add_argument("--coeffs", default=None, help="Coefficient list JSON")
    _ = parser.add_argument("--system", default=None, help="Two-polynomial system JSON (solve-system)")
    _ = parser.add_argument("--grid", default=None, help="Sweep grid JSON (sweep)")
    _ = parser.add_argument(
        "--resolution",
        type=int,
        default=CoamoebaConfig.DEFAULT_RESOLUTION,
        help=f"Pixels per 2*pi (default: {CoamoebaConfig.DEFAULT_RESOLUTION})",
    )
    _ = parser.add_argument(
        "--lopsided",
        action="store_true",
        help="Rasterize the closed lopsided coamoeba instead of the coamoeba (area, render)",
    )
    _ = parser.add_argument(
        "--seed",
        type=int,
        default=CoamoebaConfig.DEFAULT_SEED,
        help=f"Random seed (default: {CoamoebaConfig.DEFAULT_SEED})",
    )
    _ = parser.add_argument(
        "--trials",
        type=int,
        default=CoamoebaConfig.DEFAULT_TRIALS,
        help=f"Campaign trials (default: {CoamoebaConfig.DEFAULT_TRIALS})",
    )
    _ = parser.add_argument("-o", "--out", default=None, help="Output file (render: PPM, sweep: CSV)")
    _ = parser.add_argument(
        "--tolerance",
        action="append",
        metavar="NAME=VALUE",
        help="Override one tolerance; repeatable",
    )
    _ = parser.add_argument("--settings", default=None, help="Tolerance settings JSON")
    _ = parser.add_argument("-v", "--verbose", action="store_true", help="Enable debug logging on stderr")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    """Main entry point for CLI."""
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=logging.DEBUG if cast("bool", args.verbose) else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    try:
        report = run(args)
    except CoamoebaError as e:
        print(f"Error: {e}", file=sys.stderr)
        return e.exit_code

    print(render_report(report))
    return CoamoebaConfig.EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
