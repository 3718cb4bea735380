"""
Parameter-sweep driver: grids, per-point evaluation, presets and CSV output.
"""

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Tuple

import numpy as np
from pydantic import ValidationError

from src.config import PRESET_DIR, PRESET_NAMES, SWEEP_WORKERS
from src.models import (
    McConfig, Regime, SweepMode, SweepSpec, SweepTable, SweepVariable, SystemConfig
)
from src.optimizers.rate_max import max_rate, rate_problem, rho, rho_solver, secrecy_rate
from src.optimizers.sop_min import min_sop, sop, sop_problem
from src.params import (
    apply_overrides, dbm_to_linear, describe_validation_error, load_raw, system_from_table
)
from src.simulation import empirical_sop
from src.utils import ConfigError, FeasibilityError, format_float, setup_logger


logger = setup_logger(__name__)

OPT_COLUMNS = ["variable", "xi", "objective", "regime"]
MC_COLUMNS = ["variable", "xi", "closed_form", "mc_mean", "mc_std_err", "trials", "seed", "z_score"]
SWEEP_KEYS = {"mode", "variable", "start", "stop", "steps", "rho_mode", "tol", "gamma_follows_n"}


def columns_for(mode: SweepMode) -> List[str]:
    """CSV header for a sweep mode."""
    return MC_COLUMNS if mode == SweepMode.MC_VALIDATE else OPT_COLUMNS


def grid(spec: SweepSpec) -> List[Any]:
    """Grid values in order; antenna counts are rounded to integers."""
    values = np.linspace(spec.start, spec.stop, spec.steps)
    if spec.variable == SweepVariable.N_ANTENNAS:
        return [int(round(v)) for v in values]
    return [float(v) for v in values]


def point_setup(spec: SweepSpec, value) -> Tuple[SystemConfig, Optional[float], Optional[float], Optional[float]]:
    """
    Configuration and fixed operating point at one grid value.

    Returns:
        (config, rate, eps, xi)

    Raises:
        ConfigError: If the grid value breaks a configuration invariant
    """
    rate, eps, xi = spec.rate, spec.eps, spec.xi
    updates: Dict[str, Any] = {}

    if spec.variable == SweepVariable.XI:
        xi = value
    elif spec.variable == SweepVariable.RS:
        rate = value
    elif spec.variable == SweepVariable.EPS:
        eps = value
    elif spec.variable == SweepVariable.POWER_DBM:
        updates["power"] = dbm_to_linear(value)
    elif spec.variable == SweepVariable.N_ANTENNAS:
        updates["n_antennas"] = value
        if spec.gamma_follows_n:
            updates["gamma_hat"] = float(value)
    else:
        updates[spec.variable.value] = value

    if xi is not None and not 0.0 <= xi <= 1.0:
        raise ConfigError(f"xi={xi} violates 0 <= xi <= 1")
    if rate is not None and not rate > 0:
        raise ConfigError(f"rate={rate} violates R_S > 0")
    if eps is not None and not 0.0 < eps < 1.0:
        raise ConfigError(f"eps={eps} violates 0 < eps < 1")

    try:
        config = SystemConfig.model_validate({**spec.base.model_dump(), **updates})
    except ValidationError as e:
        raise ConfigError(f"{spec.variable.value}={value}: {describe_validation_error(e)}") from e

    return config, rate, eps, xi


def evaluate_point(spec: SweepSpec, value) -> list:
    """One CSV row for one grid value."""
    config, rate, eps, xi = point_setup(spec, value)

    if spec.mode == SweepMode.SOP_CURVE:
        prob = sop_problem(config, rate)
        try:
            return [value, xi, sop(xi, prob), "curve"]
        except FeasibilityError:
            return [value, xi, None, Regime.SUSPEND.value]

    if spec.mode == SweepMode.SOP_OPT:
        decision = min_sop(sop_problem(config, rate))
        return [value, decision.xi, decision.objective, decision.regime.value]

    if spec.mode == SweepMode.RATE_CURVE:
        prob = rate_problem(config, eps)
        solver = rho_solver(prob, spec.tol, spec.rho_mode)
        if not rho(xi, prob, solver) < prob.derived.kappa:
            return [value, xi, None, Regime.SUSPEND.value]
        return [value, xi, secrecy_rate(xi, prob, solver), "curve"]

    if spec.mode == SweepMode.RATE_OPT:
        prob = rate_problem(config, eps)
        decision = max_rate(prob, rho_solver(prob, spec.tol, spec.rho_mode))
        return [value, decision.xi, decision.objective, decision.regime.value]

    prob = sop_problem(config, rate)
    try:
        closed_form = sop(xi, prob)
    except FeasibilityError:
        closed_form = 1.0
    estimate = empirical_sop(config, rate, xi, spec.mc)
    return [
        value, xi, closed_form, estimate.mean, estimate.std_err,
        estimate.trials, estimate.seed, estimate.z_score(closed_form),
    ]


def run_sweep(spec: SweepSpec, workers: int = SWEEP_WORKERS) -> SweepTable:
    """
    Evaluate every grid point of a sweep.

    Args:
        spec: Validated sweep specification
        workers: Process count; rows keep grid order either way

    Returns:
        SweepTable with one row per grid point

    Raises:
        ConfigError: If a grid point violates a configuration invariant
    """
    values = grid(spec)
    logger.info(
        f"Sweeping {spec.variable.value} over {len(values)} points "
        f"[{spec.start:g}, {spec.stop:g}] in mode {spec.mode.value} ({workers} worker(s))"
    )

    task = partial(evaluate_point, spec)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            rows = list(executor.map(task, values))
    else:
        rows = [task(v) for v in values]

    suspended = sum(1 for row in rows if row[-1] == Regime.SUSPEND.value)
    logger.info(f"Sweep finished: {len(rows)} rows, {suspended} suspended")

    return SweepTable(mode=spec.mode, columns=columns_for(spec.mode), rows=rows)


def table_to_csv(table: SweepTable) -> str:
    """Render a table as CSV text with a fixed float format."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([format_float(cell) for cell in row])
    return buffer.getvalue()


def write_csv(table: SweepTable, path: Optional[str] = None) -> str:
    """Write CSV to a file (or return it for stdout) and return the text."""
    text = table_to_csv(table)
    if path:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        logger.info(f"Wrote {len(table.rows)} rows to {path}")
    return text


def preset_path(name: str) -> str:
    """
    Path of a shipped figure preset.

    Raises:
        ConfigError: If the name is not a known preset
    """
    if name not in PRESET_NAMES:
        raise ConfigError(f"unknown preset '{name}', choose from {', '.join(PRESET_NAMES)}")
    return str(Path(PRESET_DIR) / f"{name}.toml")


def sweep_spec_from_raw(raw: Dict[str, Dict[str, Any]]) -> SweepSpec:
    """
    Validate raw scenario tables into a SweepSpec.

    Raises:
        ConfigError: If the [sweep] section is missing or any value is invalid
    """
    if "sweep" not in raw:
        raise ConfigError("scenario has no [sweep] section")

    sweep = raw["sweep"]
    unknown = set(sweep) - SWEEP_KEYS
    if unknown:
        raise ConfigError(f"unknown [sweep] keys: {', '.join(sorted(unknown))}")

    unknown = set(raw.get("fixed", {})) - {"rate", "eps", "xi"}
    if unknown:
        raise ConfigError(f"unknown [fixed] keys: {', '.join(sorted(unknown))}")

    base = system_from_table(raw["system"])
    try:
        return SweepSpec(base=base, mc=McConfig(**raw.get("mc", {})), **raw.get("fixed", {}), **sweep)
    except (ValidationError, TypeError) as e:
        detail = describe_validation_error(e) if isinstance(e, ValidationError) else str(e)
        raise ConfigError(detail) from e


def load_sweep_spec(path: str, overrides: Iterable[str] = ()) -> SweepSpec:
    """Read a scenario file with a [sweep] section, applying overrides first."""
    raw = apply_overrides(load_raw(path), overrides)
    return sweep_spec_from_raw(raw)


def with_run_options(
    spec: SweepSpec,
    seed: Optional[int] = None,
    trials: Optional[int] = None,
    tol: Optional[float] = None
) -> SweepSpec:
    """
    Copy of a spec with command-line run options applied.

    Raises:
        ConfigError: If an option is out of range
    """
    mc_fields = spec.mc.model_dump()
    if seed is not None:
        mc_fields["seed"] = seed
    if trials is not None:
        mc_fields["trials"] = trials

    fields = spec.model_dump()
    fields["mc"] = mc_fields
    if tol is not None:
        fields["tol"] = tol

    try:
        return SweepSpec.model_validate(fields)
    except ValidationError as e:
        raise ConfigError(describe_validation_error(e)) from e
