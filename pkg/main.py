"""
Main entry point for the secrecy toolkit command line.
"""

import argparse
import sys
from pathlib import Path
from typing import List, Optional

from colorama import Fore, Style, init as colorama_init

from src.config import DEFAULT_CONFIG, PRESET_NAMES, SWEEP_WORKERS
from src.models import SweepMode, SweepTable, SweepVariable, ValidationReport
from src.params import apply_overrides, load_raw, scenario_from_raw
from src.sweep import preset_path, run_sweep, sweep_spec_from_raw, with_run_options, write_csv
from src.utils import ConfigError, set_global_level, setup_logger
from src.workflow import SUITES, ValidationWorkflow


logger = setup_logger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

SWEPT_FIXED_KEYS = {
    SweepVariable.XI.value: "xi",
    SweepVariable.RS.value: "rate",
    SweepVariable.EPS.value: "eps",
}


def scenario_file(args: argparse.Namespace) -> str:
    """Scenario path from --preset, --config or the shipped default."""
    if args.preset:
        return preset_path(args.preset)
    return args.config or DEFAULT_CONFIG


def run_options(args: argparse.Namespace) -> List[str]:
    """Overrides for the scenario file: --set entries then --seed/--trials."""
    overrides = list(args.set or [])
    if args.seed is not None:
        overrides.append(f"mc.seed={args.seed}")
    if args.trials is not None:
        overrides.append(f"mc.trials={args.trials}")
    return overrides


def load_tables(args: argparse.Namespace) -> dict:
    """Raw scenario tables with all command-line overrides applied."""
    path = scenario_file(args)
    logger.info(f"Loading scenario from: {path}")
    return apply_overrides(load_raw(path), run_options(args))


def sweep_tables(args: argparse.Namespace, mode: Optional[str]) -> dict:
    """Merge a mode subcommand's grid options into the [sweep] table."""
    raw = load_tables(args)
    if mode is None:
        return raw

    sweep = dict(raw.get("sweep", {}))
    sweep["mode"] = mode
    for key in ("variable", "start", "stop", "steps", "rho_mode"):
        value = getattr(args, key, None)
        if value is not None:
            sweep[key] = value
    if getattr(args, "gamma_follows_n", False):
        sweep["gamma_follows_n"] = True

    fixed = dict(raw.get("fixed", {}))
    fixed.pop(SWEPT_FIXED_KEYS.get(sweep.get("variable"), ""), None)

    raw["sweep"] = sweep
    raw["fixed"] = fixed
    return raw


def print_sweep_summary(table: SweepTable, out: Optional[str]) -> None:
    """Print a short coloured summary to stderr."""
    suspended = sum(1 for row in table.rows if row[-1] == "suspend")
    target = out or "stdout"
    print(
        f"{Fore.GREEN}✓ {table.mode.value}: {len(table.rows)} rows"
        f"{Style.RESET_ALL} ({suspended} suspended) → {target}",
        file=sys.stderr,
    )


def print_report(report: ValidationReport) -> None:
    """Print one coloured line per check to stderr."""
    print("\n" + "=" * 70, file=sys.stderr)
    print(f"VALIDATION REPORT: {report.suite}", file=sys.stderr)
    print("=" * 70, file=sys.stderr)

    for check in report.checks:
        if check.informational:
            tag = f"{Fore.CYAN}INFO{Style.RESET_ALL}"
        elif check.passed:
            tag = f"{Fore.GREEN}PASS{Style.RESET_ALL}"
        else:
            tag = f"{Fore.RED}FAIL{Style.RESET_ALL}"
        observed = "" if check.observed is None else f" observed={check.observed:.4g}"
        tolerance = "" if check.tolerance is None else f" tol={check.tolerance:.4g}"
        detail = f"  {check.detail}" if check.detail else ""
        print(f"  {tag} {check.name}{observed}{tolerance}{detail}", file=sys.stderr)

    verdict = f"{Fore.GREEN}PASSED" if report.passed else f"{Fore.RED}FAILED"
    print(f"\n{verdict}{Style.RESET_ALL}\n", file=sys.stderr)


def command_sweep(args: argparse.Namespace, mode: Optional[str]) -> int:
    """Run a sweep subcommand and emit CSV."""
    spec = sweep_spec_from_raw(sweep_tables(args, mode))
    spec = with_run_options(spec, tol=args.tol)

    table = run_sweep(spec, workers=args.workers)
    text = write_csv(table, args.out)
    if not args.out:
        sys.stdout.write(text)

    print_sweep_summary(table, args.out)
    return EXIT_OK


def command_validate(args: argparse.Namespace) -> int:
    """Run a validation suite and emit the JSON report."""
    scenario = scenario_from_raw(load_tables(args))
    report = ValidationWorkflow(scenario, workers=args.workers).run(args.suite)

    text = report.model_dump_json(indent=2)
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(text + "\n")
        logger.info(f"Report saved to: {args.out}")
    else:
        print(text)

    print_report(report)
    return EXIT_OK if report.passed else EXIT_FAILED


def add_common_options(parser: argparse.ArgumentParser) -> None:
    """Options every subcommand accepts."""
    source = parser.add_mutually_exclusive_group()
    source.add_argument("--config", help=f"Scenario TOML file (default {DEFAULT_CONFIG})")
    source.add_argument("--preset", choices=PRESET_NAMES, help="Shipped figure preset")
    parser.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="Override a scenario value, e.g. tau=0.2 or mc.trials=5000 (repeatable)")
    parser.add_argument("--seed", type=int, default=None, help="Monte-Carlo master seed (default from scenario)")
    parser.add_argument("--trials", type=int, default=None, help="Monte-Carlo trials (default from scenario)")
    parser.add_argument("--tol", type=float, default=None, help="Bisection tolerance for sweeps (default 1e-10)")
    parser.add_argument("--out", default=None, help="Output path (default stdout)")
    parser.add_argument("--workers", type=int, default=SWEEP_WORKERS, help="Worker processes for sweeps and Monte-Carlo blocks")
    parser.add_argument("--verbosity", choices=["DEBUG", "INFO", "WARNING", "ERROR"], default=None,
                        help="Logging level (default from SECRECY_LOG_LEVEL)")


def add_grid_options(parser: argparse.ArgumentParser) -> None:
    """Grid options for the per-mode sweep subcommands; unset values come from [sweep]."""
    parser.add_argument("--var", dest="variable", choices=[v.value for v in SweepVariable],
                        help="Swept parameter")
    parser.add_argument("--start", type=float, help="First grid value")
    parser.add_argument("--stop", type=float, help="Last grid value")
    parser.add_argument("--steps", type=int, help="Number of grid points (>= 2)")
    parser.add_argument("--rho-mode", dest="rho_mode", choices=["exact", "large_n"],
                        help="Eavesdropper quantile evaluation (rate modes)")
    parser.add_argument("--gamma-follows-n", action="store_true",
                        help="Keep gamma_hat = N when sweeping n_antennas")


def create_cli_parser() -> argparse.ArgumentParser:
    """Build the argument parser."""
    parser = argparse.ArgumentParser(
        description="Secrecy outage and secrecy rate toolkit for AN-aided multi-antenna transmission.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    commands = parser.add_subparsers(dest="command", required=True)

    for mode, text in (
        (SweepMode.SOP_CURVE, "Outage probability versus a parameter at fixed xi"),
        (SweepMode.SOP_OPT, "Optimal ratio and minimum outage versus a parameter"),
        (SweepMode.RATE_CURVE, "Secrecy rate versus a parameter at fixed xi"),
        (SweepMode.RATE_OPT, "Optimal ratio and maximum secrecy rate versus a parameter"),
        (SweepMode.MC_VALIDATE, "Closed-form outage against Monte-Carlo versus a parameter"),
    ):
        sub = commands.add_parser(mode.value, help=text, formatter_class=argparse.ArgumentDefaultsHelpFormatter)
        add_common_options(sub)
        add_grid_options(sub)

    sub = commands.add_parser("sweep", help="Run the [sweep] section of a scenario or preset",
                              formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    add_common_options(sub)

    sub = commands.add_parser("validate", help="Run an acceptance suite and write a JSON report",
                              formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    sub.add_argument("suite", choices=SUITES, help="Suite to run")
    add_common_options(sub)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main execution function."""
    colorama_init()
    args = create_cli_parser().parse_args(argv)
    if args.verbosity:
        set_global_level(args.verbosity)

    try:
        if args.command == "validate":
            return command_validate(args)
        if args.command == "sweep":
            return command_sweep(args, None)
        return command_sweep(args, args.command)

    except (ConfigError, ValueError) as e:
        logger.error(f"Configuration error: {e}")
        print(f"{Fore.RED}✗ {e}{Style.RESET_ALL}", file=sys.stderr)
        return EXIT_USAGE

    except KeyboardInterrupt:
        logger.warning("Interrupted by user")
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
