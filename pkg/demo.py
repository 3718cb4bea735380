"""
Demo script: runs every shipped figure preset and prints a summary.
"""

from pathlib import Path

from colorama import Fore, Style, init as colorama_init

from src.config import PRESET_NAMES
from src.models import Regime, SweepMode
from src.sweep import load_sweep_spec, preset_path, run_sweep, write_csv
from src.utils import ConfigError, setup_logger


logger = setup_logger(__name__)

OUTPUT_DIR = "output/demo"


def describe(table) -> str:
    """One-line shape summary of a sweep table."""
    objectives = [row[2] for row in table.rows if row[2] is not None]
    if table.mode == SweepMode.MC_VALIDATE or not objectives:
        return f"{len(table.rows)} rows"

    regimes = [row[-1] for row in table.rows]
    suspended = regimes.count(Regime.SUSPEND.value)
    full_power = regimes.count(Regime.FULL_POWER.value)
    return (
        f"{len(table.rows)} rows, objective in [{min(objectives):.4g}, {max(objectives):.4g}], "
        f"{full_power} full power, {suspended} suspended"
    )


def run_demo():
    """Run all presets and write their CSV files."""
    colorama_init()
    print("\n" + "=" * 70)
    print("SECRECY TOOLKIT - DEMO MODE")
    print("=" * 70 + "\n")

    Path(OUTPUT_DIR).mkdir(parents=True, exist_ok=True)
    results_summary = []

    for i, name in enumerate(PRESET_NAMES, 1):
        print(f"\n{'=' * 70}")
        print(f"PRESET {i}/{len(PRESET_NAMES)}: {name}")
        print(f"{'=' * 70}\n")

        try:
            spec = load_sweep_spec(preset_path(name))
            table = run_sweep(spec)
            out = f"{OUTPUT_DIR}/{name}.csv"
            write_csv(table, out)
            results_summary.append({"name": name, "mode": spec.mode.value, "summary": describe(table), "out": out})

        except ConfigError as e:
            logger.error(f"Failed to run preset {name}: {e}")
            results_summary.append({"name": name, "error": str(e)})

    print("\n" + "=" * 70)
    print("DEMO SUMMARY")
    print("=" * 70 + "\n")

    for result in results_summary:
        if "error" in result:
            print(f"{Fore.RED}✗ {result['name']}: ERROR - {result['error']}{Style.RESET_ALL}")
        else:
            print(f"{Fore.GREEN}✓ {result['name']}{Style.RESET_ALL} ({result['mode']})")
            print(f"   {result['summary']}")
            print(f"   Saved: {result['out']}\n")

    print("=" * 70)
    print(f"Results saved in: {OUTPUT_DIR}/")
    print("=" * 70 + "\n")


if __name__ == "__main__":
    run_demo()
