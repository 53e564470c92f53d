"""Command line front end: ``sigma-lagrangian <command> [options]``.

Exit codes: 0 on success, 1 on invalid input (usage errors included), 2 on a
numerical failure or a failed verification check.
"""

from __future__ import annotations

import argparse
import asyncio
import logging
import sys
from typing import Any, Callable, Dict, NoReturn, Optional, Sequence

from sigma_lagrangian._version import __version__
from sigma_lagrangian.artifact_io import (
    phase_portrait_data,
    portrait_rows,
    sample_mesh,
    sample_point_table,
    write_mesh,
    write_report,
    write_table,
)
from sigma_lagrangian.exceptions import (
    ArtifactIOError,
    NumericError,
    SigmaError,
    ValidationError,
)
from sigma_lagrangian.foliation_core import (
    delta_beta_poly_f,
    eval_immersion,
    lagrangian_angle,
    tangent_frame,
)
from sigma_lagrangian.hs_dynamics import integrate
from sigma_lagrangian.models import (
    FDConfig,
    HSParams,
    HSState,
    RunConfig,
    SamplePlan,
)
from sigma_lagrangian.oracle_verify import run_verification
from sigma_lagrangian.profile_curves import FoliatedSpec, curve_table, make_preset
from sigma_lagrangian.sweep import catalog_table, phase_table
from sigma_lagrangian.utils import (
    configure_logging,
    parse_float_list,
    parse_key_values,
    range_values,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NUMERIC = 2

PHASE_COLUMNS = (
    "E",
    "class",
    "phi_total",
    "phi_plus",
    "phi_minus",
    "divergent_flag",
    "self_intersections",
)


class _Parser(argparse.ArgumentParser):
    """Argument parser whose usage errors exit with code 1."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _global_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--tol", type=float, default=argparse.SUPPRESS)
    common.add_argument("--out", default=argparse.SUPPRESS, help="output file")
    common.add_argument(
        "--config", default=argparse.SUPPRESS, help="key=value configuration file"
    )
    common.add_argument(
        "--log-level", dest="log_level", default=argparse.SUPPRESS
    )
    return common


def _spec_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--preset", default=argparse.SUPPRESS)
    parser.add_argument(
        "--param",
        action="append",
        default=argparse.SUPPRESS,
        metavar="NAME=VALUE",
        help="preset parameter, repeatable",
    )
    parser.add_argument("--n", type=int, default=argparse.SUPPRESS)


def _hs_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--n", type=int, default=argparse.SUPPRESS)
    parser.add_argument("--C", type=float, default=argparse.SUPPRESS)


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser with every subcommand."""
    common = _global_options()
    parser = _Parser(
        prog="sigma-lagrangian",
        description="Sphere-foliated Lagrangian immersions: evaluation, "
        "verification and Hamiltonian-stationary profiles.",
        parents=[common],
    )
    parser.add_argument("--version", action="version", version=__version__)
    commands = parser.add_subparsers(dest="command", metavar="command")

    evaluate = commands.add_parser("eval", parents=[common], help="evaluate at (s, x)")
    _spec_options(evaluate)
    evaluate.add_argument("--s", type=float, default=argparse.SUPPRESS)
    evaluate.add_argument("--x", default=argparse.SUPPRESS, help="e.g. 1,0,0")

    verify = commands.add_parser("verify", parents=[common], help="run the oracles")
    _spec_options(verify)
    verify.add_argument("--samples", type=int, default=argparse.SUPPRESS)

    hs = commands.add_parser("hs", parents=[common], help="profile ODE")
    hs_commands = hs.add_subparsers(dest="hs_command", metavar="action")
    solve = hs_commands.add_parser("solve", parents=[common], help="integrate")
    _hs_options(solve)
    solve.add_argument("--alpha0", type=float, default=argparse.SUPPRESS)
    solve.add_argument("--r0", type=float, default=argparse.SUPPRESS)
    solve.add_argument("--smax", type=float, default=argparse.SUPPRESS)

    phase = commands.add_parser("phase", parents=[common], help="phase variation")
    _hs_options(phase)
    phase.add_argument("--E", type=float, default=argparse.SUPPRESS)
    phase.add_argument(
        "--table", default=argparse.SUPPRESS, metavar="START:STOP:COUNT"
    )

    mesh = commands.add_parser("mesh", parents=[common], help="sample a mesh")
    _spec_options(mesh)
    mesh.add_argument("--s-steps", dest="s_steps", type=int, default=argparse.SUPPRESS)
    mesh.add_argument(
        "--sphere-steps", dest="sphere_steps", type=int, default=argparse.SUPPRESS
    )
    mesh.add_argument(
        "--format", choices=("ply_ascii", "csv"), default=argparse.SUPPRESS
    )
    mesh.add_argument("--samples", type=int, default=argparse.SUPPRESS)
    mesh.add_argument(
        "--points", action="store_true", help="export a point table (any n)"
    )
    mesh.add_argument(
        "--slice", action="store_true", help="for n > 3, mesh a three-axis slice"
    )

    catalog = commands.add_parser("catalog", parents=[common], help="solution families")
    _hs_options(catalog)
    catalog.add_argument(
        "--table", default=argparse.SUPPRESS, metavar="START:STOP:COUNT",
        help="sweep of C values",
    )

    portrait = commands.add_parser("portrait", parents=[common], help="phase portrait")
    _hs_options(portrait)
    portrait.add_argument(
        "--table", default=argparse.SUPPRESS, metavar="START:STOP:COUNT",
        help="extra energy levels",
    )

    curve = commands.add_parser("curve", parents=[common], help="profile samples")
    _spec_options(curve)
    curve.add_argument("--samples", type=int, default=argparse.SUPPRESS)
    return parser


def _load_config(args: argparse.Namespace) -> RunConfig:
    """Merge the config file (if any) with the flags given on the command line."""
    values = dict(vars(args))
    path = values.pop("config", None)
    base = RunConfig.from_file(path) if path else RunConfig()
    overrides: Dict[str, Any] = {}
    for key, value in values.items():
        if key in ("hs_command", "points", "slice"):
            continue
        if key == "param":
            overrides["params"] = parse_key_values(value)
        elif key == "x":
            overrides["x"] = parse_float_list(value)
        else:
            overrides[key] = value
    return base.merged(overrides).validate()


def _spec(cfg: RunConfig) -> FoliatedSpec:
    return make_preset(cfg.preset, {"n": cfg.n, **cfg.params})


def _run_eval(cfg: RunConfig, args: argparse.Namespace) -> int:
    spec = _spec(cfg)
    x = cfg.x if cfg.x is not None else [1.0] + [0.0] * (spec.n - 1)
    frame = tangent_frame(x)
    point = eval_immersion(spec, cfg.s, frame.x)
    report: Dict[str, Any] = {
        "preset": cfg.preset,
        "n": spec.n,
        "s": cfg.s,
        "x": list(frame.x.x),
        "re": list(point.re),
        "im": list(point.im),
        "beta": lagrangian_angle(spec, cfg.s, frame.x),
    }
    report.update(delta_beta_poly_f(spec, cfg.s, frame.x).to_dict())
    write_report(report, cfg.out)
    return EXIT_OK


def _run_verify(cfg: RunConfig, args: argparse.Namespace) -> int:
    spec = _spec(cfg)
    plan = SamplePlan(count=cfg.samples, seed=cfg.seed)
    rows = run_verification(spec, plan, FDConfig())
    passed = all(row.passed for row in rows)
    write_report(
        {
            "preset": cfg.preset,
            "n": spec.n,
            "seed": cfg.seed,
            "samples": cfg.samples,
            "pass": passed,
            "checks": [row.to_dict() for row in rows],
        },
        cfg.out,
    )
    return EXIT_OK if passed else EXIT_NUMERIC


def _run_hs(cfg: RunConfig, args: argparse.Namespace) -> int:
    if getattr(args, "hs_command", None) != "solve":
        raise ValidationError("hs: expected the action 'solve'")
    params = HSParams(n=cfg.n, C=cfg.C)
    trajectory = integrate(
        params, HSState(cfg.alpha0, cfg.r0), (0.0, cfg.smax), tol=cfg.tol
    )
    write_table(("s", "alpha", "r", "E", "k"), trajectory.table(), cfg.out)
    if trajectory.termination == "failed":
        logger.error("Integration failed: %s", trajectory.message)
        return EXIT_NUMERIC
    return EXIT_OK


def _run_phase(cfg: RunConfig, args: argparse.Namespace) -> int:
    params = HSParams(n=cfg.n, C=cfg.C)
    if cfg.table is not None:
        energies = [float(E) for E in range_values(cfg.table)]
    elif cfg.E is not None:
        energies = [cfg.E]
    else:
        raise ValidationError("E: give --E or --table")
    rows = asyncio.run(phase_table(params, energies))
    write_table(
        PHASE_COLUMNS,
        [
            (
                E,
                tag,
                phi.value,
                "" if phi.plus is None else phi.plus,
                "" if phi.minus is None else phi.minus,
                phi.divergent,
                crossings,
            )
            for E, tag, phi, crossings in rows
        ],
        cfg.out,
    )
    return EXIT_OK


def _run_mesh(cfg: RunConfig, args: argparse.Namespace) -> int:
    spec = _spec(cfg)
    if getattr(args, "points", False):
        mesh = sample_point_table(spec, SamplePlan(count=cfg.samples, seed=cfg.seed))
    else:
        mesh = sample_mesh(
            spec, cfg.s_steps, cfg.sphere_steps, slice_ok=getattr(args, "slice", False)
        )
    write_mesh(mesh, cfg.out, cfg.format)
    return EXIT_OK


def _run_catalog(cfg: RunConfig, args: argparse.Namespace) -> int:
    values = range_values(cfg.table) if cfg.table is not None else [cfg.C]
    sweep = [HSParams(n=cfg.n, C=float(C)) for C in values]
    results = asyncio.run(catalog_table(sweep))
    rows = []
    for params, entries in results:
        for entry in entries:
            rows.append(
                (
                    params.n,
                    params.C,
                    entry.family.value,
                    entry.energy,
                    entry.energy_class.tag.value,
                    "" if entry.embedded is None else entry.embedded,
                    entry.phi.value,
                    entry.self_intersections,
                    entry.closure or "",
                )
            )
    write_table(
        (
            "n",
            "C",
            "family",
            "E",
            "class",
            "embedded",
            "phi",
            "self_intersections",
            "closure",
        ),
        rows,
        cfg.out,
    )
    return EXIT_OK


def _run_portrait(cfg: RunConfig, args: argparse.Namespace) -> int:
    params = HSParams(n=cfg.n, C=cfg.C)
    levels = list(range_values(cfg.table)) if cfg.table is not None else []
    portrait = phase_portrait_data(params, levels)
    write_table(("E", "polyline", "alpha", "r"), portrait_rows(portrait), cfg.out)
    return EXIT_OK


def _run_curve(cfg: RunConfig, args: argparse.Namespace) -> int:
    spec = _spec(cfg)
    samples = max(cfg.samples, 2)
    rows = curve_table(spec.curve, samples)
    write_table(("s", "r", "phi", "alpha", "k"), rows, cfg.out)
    return EXIT_OK


COMMANDS: Dict[str, Callable[[RunConfig, argparse.Namespace], int]] = {
    "eval": _run_eval,
    "verify": _run_verify,
    "hs": _run_hs,
    "phase": _run_phase,
    "mesh": _run_mesh,
    "catalog": _run_catalog,
    "portrait": _run_portrait,
    "curve": _run_curve,
}


def cli_main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse ``argv``, run the command and return the exit code.

    :param argv: Arguments without the program name; ``sys.argv[1:]`` by default.
    :type argv: Optional[Sequence[str]]
    :return: 0 on success, 1 on invalid input, 2 on numerical failure.
    :rtype: int
    """
    parser = build_parser()
    try:
        args = parser.parse_args(list(sys.argv[1:] if argv is None else argv))
    except SystemExit as exit_:
        return int(exit_.code or 0)
    configure_logging(getattr(args, "log_level", None))
    try:
        cfg = _load_config(args)
        if cfg.log_level:
            configure_logging(cfg.log_level)
        command = cfg.command
        if command is None:
            parser.print_usage(sys.stderr)
            return EXIT_INVALID
        return COMMANDS[command](cfg, args)
    except ValidationError as error:
        print(f"error: {error}", file=sys.stderr)
        return EXIT_INVALID
    except (NumericError, ArtifactIOError) as error:
        print(f"error: {error}", file=sys.stderr)
        return EXIT_NUMERIC
    except SigmaError as error:
        logger.error("Internal error: %s", error)
        return EXIT_NUMERIC


def main() -> int:
    """Console-script entry point."""
    return cli_main()


if __name__ == "__main__":
    sys.exit(main())
