"""CLI entry point for vsl-dro."""
from __future__ import annotations

import argparse
import logging
import sys

from vsl_dro import __version__
from vsl_dro.core.errors import ConfigError

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_CONFIG = 2

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def _add_common_options(parser: argparse.ArgumentParser, with_defaults: bool) -> None:
    """Options accepted before or after the subcommand; a subcommand value wins."""
    def default(value: object) -> object:
        return value if with_defaults else argparse.SUPPRESS

    parser.add_argument("--config", default=default(None), help="Config file path (JSON or YAML; default vsl-dro.json)")
    parser.add_argument("--set", dest="overrides", action="append", default=default([]), metavar="KEY=VALUE",
                        help="Override a config value with dot notation, e.g. radius.epsilon=0.5 (repeatable)")
    parser.add_argument("--threads", type=int, default=default(None), help="Worker thread cap")
    parser.add_argument("--seed", type=int, default=default(None), help="Top-level RNG seed")
    parser.add_argument("--output-dir", default=default(None), help="Directory for written artifacts")
    parser.add_argument("-v", "--verbose", action="store_true", default=default(False), help="Debug logging")
    parser.add_argument("-q", "--quiet", action="store_true", default=default(False), help="Warnings only")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vsl-dro",
        description="Data-driven distributionally robust speed-limit control",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _add_common_options(parser, with_defaults=True)
    common = argparse.ArgumentParser(add_help=False)
    _add_common_options(common, with_defaults=False)

    sub = parser.add_subparsers(dest="command", help="Available commands")

    # init
    init_p = sub.add_parser("init", parents=[common], help="Write a config file from a built-in profile")
    init_p.add_argument("--profile", default=None,
                        help="Profile name (reference or its alias paper_sec7, tiny, closure)")

    # solve
    solve_p = sub.add_parser("solve", parents=[common], help="Search for the schedule with the best certificate")
    solve_p.add_argument("--budget", type=float, default=None, help="Search budget in seconds")
    solve_p.add_argument("--gap-tol", type=float, default=None, help="Stop once UB - LB is within this")
    solve_p.add_argument("--pool", default=None, help="Warm-start pool file (read and updated)")
    solve_p.add_argument("--method", choices=["greedy", "lp"], default=None, help="Certificate evaluation")
    solve_p.add_argument("--dump-lp", action="store_true",
                         help="Also write the first upper-bounding problem as ubp.lp")

    # mpc
    mpc_p = sub.add_parser("mpc", parents=[common], help="Run the receding-horizon loop against the plant")
    mpc_p.add_argument("--steps", type=int, default=None, help="Closed-loop slots")
    mpc_p.add_argument("--replan-every", type=int, default=None, help="Slots between solves")
    mpc_p.add_argument("--budget", type=float, default=None, help="Per-solve budget in seconds")

    # validate
    val_p = sub.add_parser("validate", parents=[common], help="Monte Carlo check of the out-of-sample guarantee")
    val_p.add_argument("--replications", type=int, default=None, help="Independent replications")
    val_p.add_argument("--n-val", type=int, default=None, help="Validation draws per replication")
    val_p.add_argument("--budget", type=float, default=None, help="Per-replication budget in seconds")
    val_p.add_argument("--compare", action="store_true",
                       help="Also compare against the sample-average schedule on paired draws")

    # analyze
    ana_p = sub.add_parser("analyze", parents=[common], help="Run the search and the cone relaxation side by side")
    ana_p.add_argument("--grid-size", type=int, default=None, help="Number of discretization levels")
    ana_p.add_argument("--budget", type=float, default=None, help="Budget in seconds for each approach")

    # tune-radius
    tune_p = sub.add_parser("tune-radius", parents=[common], help="Pick the radius by Monte Carlo tuning")
    tune_p.add_argument("--trials", type=int, default=None, help="Training draws per grid point")
    tune_p.add_argument("--beta", type=float, default=None, help="Allowed failure probability")

    # gen-samples
    gen_p = sub.add_parser("gen-samples", parents=[common], help="Draw training samples and write them to disk")
    gen_p.add_argument("--count", type=int, default=None, help="Number of samples")
    gen_p.add_argument("--output", default=None, help="Sample file path (default <output-dir>/samples.json)")

    return parser


def configure_logging(verbose: bool = False, quiet: bool = False) -> None:
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr, force=True)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command is None:
        parser.print_help()
        return EXIT_OK

    configure_logging(args.verbose, args.quiet)

    try:
        return _dispatch(args)
    except ConfigError as exc:
        print(f"Config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def _dispatch(args: argparse.Namespace) -> int:
    if args.command == "init":
        from vsl_dro.cli.cmd_init import cmd_init
        return cmd_init(args)

    if args.command == "solve":
        from vsl_dro.cli.cmd_solve import cmd_solve
        return cmd_solve(args)

    if args.command == "mpc":
        from vsl_dro.cli.cmd_mpc import cmd_mpc
        return cmd_mpc(args)

    if args.command == "validate":
        from vsl_dro.cli.cmd_validate import cmd_validate
        return cmd_validate(args)

    if args.command == "analyze":
        from vsl_dro.cli.cmd_analyze import cmd_analyze
        return cmd_analyze(args)

    if args.command == "tune-radius":
        from vsl_dro.cli.cmd_tune_radius import cmd_tune_radius
        return cmd_tune_radius(args)

    if args.command == "gen-samples":
        from vsl_dro.cli.cmd_gen_samples import cmd_gen_samples
        return cmd_gen_samples(args)

    return EXIT_CONFIG
