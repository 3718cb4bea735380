"""
Physical configuration, derived shorthand quantities, unit conversion and
scenario-file loading.
"""

import math
import sys
from pathlib import Path
from typing import Any, Dict, Iterable, Optional

from pydantic import ValidationError

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from src.models import DerivedParams, McConfig, Scenario, SystemConfig
from src.numerics import gamma_fn
from src.utils import ConfigError, DomainError, setup_logger


logger = setup_logger(__name__)

SYSTEM_KEYS = {"n_antennas", "power_dbm", "power_linear", "alpha", "r_bob", "lambda_e", "tau", "gamma_hat"}
SECTIONS = ("system", "fixed", "mc", "sweep")


def dbm_to_linear(p_dbm: float) -> float:
    """Convert a dBm figure to noise-normalised linear power (unit noise variance)."""
    return 10.0 ** (p_dbm / 10.0)


def derive(
    config: SystemConfig,
    rate: Optional[float] = None,
    eps: Optional[float] = None
) -> DerivedParams:
    """
    Compute the shorthand quantities used by both optimizers.

    Args:
        config: Physical scenario
        rate: Target secrecy rate R_S, if the SOP side is needed
        eps: Outage threshold, if the rate side is needed

    Returns:
        DerivedParams with T, theta and omega only when a rate is given and
        L only when eps is given

    Raises:
        DomainError: If rate <= 0 or eps is not in (0, 1). SystemConfig already
            rejects alpha <= 2; the alpha check here only fires for configs
            built without validation (model_construct).
    """
    if not config.alpha > 2:
        raise DomainError(f"path-loss exponent must exceed 2, got {config.alpha}")
    if rate is not None and not rate > 0:
        raise DomainError(f"secrecy rate must be positive, got {rate}")
    if eps is not None and not 0 < eps < 1:
        raise DomainError(f"outage threshold must lie in (0, 1), got {eps}")

    tau2 = config.tau ** 2
    kappa = (1.0 - tau2) * config.power * config.gamma_hat / (
        tau2 * config.power + config.r_bob ** config.alpha
    )

    delta = 2.0 / config.alpha
    beta = math.pi * gamma_fn(1.0 + delta)
    l0 = delta / (config.n_antennas - 1)

    t_pow = theta = omega = None
    if rate is not None:
        t_pow = 2.0 ** rate
        theta = (t_pow - 1.0) / t_pow
        omega = (t_pow - 1.0) / kappa if kappa > 0 else math.inf

    big_l = None
    if eps is not None:
        big_l = beta * config.lambda_e * config.power ** delta / (-math.log1p(-eps))

    return DerivedParams(
        kappa=kappa,
        delta=delta,
        beta=beta,
        t_pow=t_pow,
        theta=theta,
        omega=omega,
        l0=l0,
        l1=1.0 - l0,
        l2=1.0 + l0,
        big_l=big_l,
    )


def parse_value(text: str) -> Any:
    """Parse an override value with TOML scalar rules, falling back to a bare string."""
    try:
        return tomllib.loads(f"v = {text}")["v"]
    except tomllib.TOMLDecodeError:
        return text


def apply_overrides(raw: Dict[str, Dict[str, Any]], overrides: Iterable[str]) -> Dict[str, Dict[str, Any]]:
    """
    Apply `key=value` or `section.key=value` overrides to a raw scenario table.

    A bare key goes to the first section that already holds it, else to
    [system]. Setting power_dbm removes power_linear and vice versa.

    Raises:
        ConfigError: If an override is malformed or names an unknown section
    """
    merged = {section: dict(table) for section, table in raw.items()}

    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override '{item}' is not of the form key=value")
        key, text = (part.strip() for part in item.split("=", 1))

        if "." in key:
            section, key = key.split(".", 1)
            if section not in SECTIONS:
                raise ConfigError(f"override '{item}' names unknown section '{section}'")
        else:
            section = next((s for s in SECTIONS if key in merged.get(s, {})), "system")

        table = merged.setdefault(section, {})
        if section == "system" and key in ("power_dbm", "power_linear"):
            table.pop("power_linear" if key == "power_dbm" else "power_dbm", None)
        table[key] = parse_value(text)
        logger.debug(f"Override {section}.{key} = {table[key]!r}")

    return merged


def system_from_table(table: Dict[str, Any]) -> SystemConfig:
    """
    Build a SystemConfig from a [system] table.

    Raises:
        ConfigError: On unknown keys, a missing or doubled power entry, or a
            violated field invariant
    """
    unknown = set(table) - SYSTEM_KEYS
    if unknown:
        raise ConfigError(f"unknown [system] keys: {', '.join(sorted(unknown))}")

    fields = dict(table)
    has_dbm = "power_dbm" in fields
    has_linear = "power_linear" in fields
    if has_dbm == has_linear:
        raise ConfigError("[system] needs exactly one of power_dbm or power_linear")

    if has_dbm:
        fields["power"] = dbm_to_linear(float(fields.pop("power_dbm")))
    else:
        fields["power"] = fields.pop("power_linear")

    try:
        return SystemConfig(**fields)
    except ValidationError as e:
        raise ConfigError(describe_validation_error(e)) from e


def describe_validation_error(error: ValidationError) -> str:
    """Flatten a pydantic error into one line naming each violated field."""
    parts = []
    for item in error.errors():
        location = ".".join(str(p) for p in item["loc"]) or "value"
        parts.append(f"{location}: {item['msg']}")
    return "; ".join(parts)


def load_raw(path: str) -> Dict[str, Dict[str, Any]]:
    """
    Read a scenario file into nested dictionaries.

    Raises:
        ConfigError: If the file is missing or is not valid TOML
    """
    file_path = Path(path)
    if not file_path.is_file():
        raise ConfigError(f"config file not found: {path}")

    try:
        with open(file_path, "rb") as f:
            raw = tomllib.load(f)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"cannot parse {path}: {e}") from e

    if "system" not in raw:
        raise ConfigError(f"{path} has no [system] section")

    logger.debug(f"Loaded scenario file {path}")
    return raw


def scenario_from_raw(raw: Dict[str, Dict[str, Any]]) -> Scenario:
    """Validate raw tables into a Scenario (system, fixed point, Monte-Carlo settings)."""
    system = system_from_table(raw.get("system", {}))
    fixed = raw.get("fixed", {})

    unknown = set(fixed) - {"rate", "eps", "xi"}
    if unknown:
        raise ConfigError(f"unknown [fixed] keys: {', '.join(sorted(unknown))}")

    try:
        mc = McConfig(**raw.get("mc", {}))
        return Scenario(system=system, mc=mc, **fixed)
    except ValidationError as e:
        raise ConfigError(describe_validation_error(e)) from e


def load_system_config(path: str, overrides: Iterable[str] = ()) -> SystemConfig:
    """Load only the [system] section of a scenario file."""
    raw = apply_overrides(load_raw(path), overrides)
    return system_from_table(raw["system"])


def load_scenario(path: str, overrides: Iterable[str] = ()) -> Scenario:
    """
    Load a full scenario file.

    Args:
        path: TOML file with [system] and optional [fixed] and [mc] sections
        overrides: `key=value` strings applied before validation

    Returns:
        Validated Scenario

    Raises:
        ConfigError: If the file is unreadable or any value is invalid
    """
    raw = apply_overrides(load_raw(path), overrides)
    return scenario_from_raw(raw)
