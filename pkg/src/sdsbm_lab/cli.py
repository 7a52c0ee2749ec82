"""Command line interface for sdsbm-lab."""

import argparse
import sys
from pathlib import Path
from typing import List, Optional

from loguru import logger

from . import __version__
from .config import RunConfig, load_config
from .estimator import estimate
from .graph_model import block_row_separation, read_edge_list
from .harness import (
    SCENARIO_NAMES,
    aggregate,
    emit_svg,
    get_scenario,
    read_records_csv,
    run_scenarios,
    write_aggregates_csv,
    write_csv,
)
from .theory_bounds import EpsilonSet, assumption_trend, check_assumptions, epsilon_conditions
from .utils.misc import parse_bool, parse_int_list, parse_str_list

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INVALID_INPUT = 2
EXIT_PARTIAL_FAILURE = 3

RECORDS_FILE = "records.csv"
AGGREGATES_FILE = "aggregates.csv"
FIGURE_PREFIX = "ari_"


def setup_logging(verbose: bool = False) -> None:
    """Setup logging configuration."""
    logger.remove()  # Remove default handler

    log_level = "DEBUG" if verbose else "INFO"
    log_format = "<green>{time:YYYY-MM-DD HH:mm:ss}</green> | <level>{level: <8}</level> | <cyan>{name}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> - <level>{message}</level>"

    logger.add(sys.stderr, level=log_level, format=log_format)


def show_config(config: RunConfig) -> None:
    """Show the effective configuration."""
    print("Current sdsbm-lab Configuration:")
    print("=" * 50)
    for key, value in config.to_dict().items():
        if isinstance(value, dict):
            print(f"{key}:")
            for sub_key, sub_value in value.items():
                print(f"  {sub_key}: {sub_value}")
        else:
            print(f"{key}: {value}")


def _directions(value: str) -> List[bool]:
    if value.strip().lower() == "both":
        return [True, False]
    return [parse_bool(value)]


def _scenario_names(value: str) -> List[str]:
    if value.strip().lower() == "all":
        return list(SCENARIO_NAMES)
    names = parse_str_list(value)
    for name in names:
        get_scenario(name)
    return names


def apply_overrides(config: RunConfig, args: argparse.Namespace) -> RunConfig:
    """CLI flags win over file and environment values."""
    if getattr(args, "n", None):
        config.n_grid = parse_int_list(args.n)
    if getattr(args, "mc", None) is not None:
        config.mc = args.mc
    if getattr(args, "methods", None):
        config.methods = [m.upper() for m in parse_str_list(args.methods)]
    if getattr(args, "seed", None) is not None:
        config.master_seed = args.seed
    if getattr(args, "h_const", None) is not None:
        config.h_constant = args.h_const
    if getattr(args, "jobs", None) is not None:
        config.jobs = args.jobs
    if getattr(args, "out", None):
        config.out_dir = args.out
    if getattr(args, "no_timing", False):
        config.record_timing = False
    if getattr(args, "no_progress", False):
        config.progress = False
    if args.verbose:
        config.verbose = True
    config.validate()
    return config


def cmd_run(args: argparse.Namespace, config: RunConfig) -> int:
    specs = [
        get_scenario(name, directed)
        for name in _scenario_names(args.scenario)
        for directed in _directions(args.directed)
    ]
    records = run_scenarios(specs, config)

    out_dir = Path(config.out_dir)
    write_csv(records, out_dir / RECORDS_FILE)
    rows = aggregate(records)
    write_aggregates_csv(rows, out_dir / AGGREGATES_FILE)
    emit_svg(rows, f"{out_dir / FIGURE_PREFIX}")

    failures = sum(record.is_error for record in records)
    if failures:
        logger.warning(f"{failures} method runs failed; see the empty ari fields in {out_dir / RECORDS_FILE}")
        return EXIT_PARTIAL_FAILURE
    logger.info(f"Run complete: {len(records)} records in {out_dir}")
    return EXIT_OK


def cmd_estimate(args: argparse.Namespace, config: RunConfig) -> int:
    A = read_edge_list(args.edges)
    P_tilde = estimate(A, h=args.h, h_constant=config.h_constant)
    P_tilde.to_csv(args.out)
    return EXIT_OK


def cmd_check_assumptions(args: argparse.Namespace, config: RunConfig) -> int:
    spec = get_scenario(args.scenario)
    reports = []
    for n in parse_int_list(args.n):
        block, probs, K = spec.build(n)
        eps = EpsilonSet.from_rates(n, probs.rho_min, C_1=args.c1)
        report = check_assumptions(n, K, probs, block.gamma, block_row_separation(block), eps)
        reports.append(report)

        print(f"{spec.name}: n={n}, K={K}, gamma={block.gamma:.6f}, C_1={eps.C_1:g}")
        print("=" * 50)
        for check in report.checks + epsilon_conditions(n, eps):
            status = "PASS" if check.passed else "FAIL"
            print(f"{check.name:<14} {status:<5} slack={check.slack:+.6e}  {check.detail}")
        print()

    if len(reports) > 1:
        print("Slack trend over n (nondecreasing):")
        for name, improving in assumption_trend(reports).items():
            print(f"{name:<14} {'yes' if improving else 'no'}")
    return EXIT_OK


def cmd_plot(args: argparse.Namespace, config: RunConfig) -> int:
    records = read_records_csv(args.input)
    rows = aggregate(records)
    out_dir = Path(args.out)
    write_aggregates_csv(rows, out_dir / AGGREGATES_FILE)
    emit_svg(rows, f"{out_dir / FIGURE_PREFIX}")
    return EXIT_OK


def cmd_show_config(args: argparse.Namespace, config: RunConfig) -> int:
    show_config(config)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", "-c", help="Path to a YAML configuration file (optional)")
    common.add_argument("--verbose", "-v", action="store_true", help="Enable verbose logging")

    parser = argparse.ArgumentParser(
        description="sdsbm-lab - neighborhood-smoothing community detection for sparse directed SBMs",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  sdsbm-lab run --scenario diag_dominant --directed true --n 100,200 --mc 5
  sdsbm-lab run --scenario all --directed both --jobs 8 --out results
  sdsbm-lab estimate --edges graph.txt --out p_tilde.csv
  sdsbm-lab check-assumptions --scenario star --n 1000,10000,100000
  sdsbm-lab plot --in results/records.csv --out figures
  sdsbm-lab show-config --config sdsbm_lab.yaml
        """,
    )
    parser.add_argument("--version", "-V", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", parents=[common], help="Run the Monte-Carlo comparison")
    run.add_argument("--scenario", default="all", help="Scenario name, comma list, or 'all'")
    run.add_argument("--directed", default="both", help="true, false or both")
    run.add_argument("--n", help="Comma-separated node counts (overrides n_grid)")
    run.add_argument("--mc", type=int, help="Replicates per (scenario, directed, n)")
    run.add_argument("--methods", help="Comma-separated subset of KMA,KMP,SPECTRAL,DSCORE")
    run.add_argument("--seed", type=int, help="Master seed")
    run.add_argument("--h-const", type=float, help="Bandwidth constant C_h")
    run.add_argument("--out", help="Output directory")
    run.add_argument("--jobs", "-j", type=int, help="Worker processes")
    run.add_argument("--no-timing", action="store_true", help="Write elapsed_ms = 0 for reproducible files")
    run.add_argument("--no-progress", action="store_true", help="Hide the progress bar")
    run.set_defaults(func=cmd_run)

    est = sub.add_parser("estimate", parents=[common], help="Estimate P from an edge list")
    est.add_argument("--edges", required=True, help="Edge-list file with a '# n=<n> directed=<0|1>' header")
    est.add_argument("--h", type=float, help="Bandwidth in (0, 1); default C_h sqrt(log n / n)")
    est.add_argument("--h-const", type=float, help="Bandwidth constant C_h when --h is absent")
    est.add_argument("--out", required=True, help="Destination CSV")
    est.set_defaults(func=cmd_estimate)

    check = sub.add_parser(
        "check-assumptions", parents=[common], help="Evaluate the model assumptions for a scenario"
    )
    check.add_argument("--scenario", required=True, choices=SCENARIO_NAMES)
    check.add_argument("--n", default="1000", help="Node count or comma list (adds a trend check)")
    check.add_argument("--c1", type=float, default=None, help="Constant C_1 (default 1/C_h + C_m + 2 + 16 C_AP)")
    check.set_defaults(func=cmd_check_assumptions)

    plot = sub.add_parser("plot", parents=[common], help="Aggregate a records CSV and draw SVG figures")
    plot.add_argument("--in", dest="input", required=True, help="records.csv written by 'run'")
    plot.add_argument("--out", required=True, help="Output directory")
    plot.set_defaults(func=cmd_plot)

    show = sub.add_parser("show-config", parents=[common], help="Show the effective configuration")
    show.set_defaults(func=cmd_show_config)

    return parser


def main(argv: Optional[List[str]] = None) -> None:
    """Main CLI entry point."""
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.verbose)

    try:
        config = load_config(args.config)
        # estimate and plot use --out for their own destinations
        if args.command in ("run", "show-config"):
            config = apply_overrides(config, args)
        elif args.command == "estimate" and args.h_const is not None:
            config.h_constant = args.h_const
            config.validate()
        if config.verbose and not args.verbose:
            setup_logging(True)
        code = args.func(args, config)
    except ValueError as e:
        logger.error(f"Invalid input: {e}")
        sys.exit(EXIT_INVALID_INPUT)
    except Exception as e:
        logger.error(f"Failed: {e}")
        sys.exit(EXIT_FAILURE)

    sys.exit(code)


if __name__ == "__main__":
    main()
