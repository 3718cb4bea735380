"""
Unit tests for configuration, derived quantities and scenario loading.
"""

import math
from pathlib import Path

import numpy as np
import pytest
from src.models import SystemConfig
from src.params import (
    apply_overrides,
    dbm_to_linear,
    derive,
    load_raw,
    load_scenario,
    load_system_config,
    system_from_table
)
from src.utils import ConfigError, DomainError


ROOT = Path(__file__).resolve().parent.parent


@pytest.fixture
def config():
    """Imperfect-CSI configuration with N = gamma_hat = 20."""
    return SystemConfig(
        n_antennas=20, power=10.0, alpha=4.0, r_bob=1.0,
        lambda_e=2.0, tau=0.3, gamma_hat=20.0
    )


@pytest.fixture
def system_table():
    """Raw [system] table."""
    return {
        "n_antennas": 8, "power_dbm": 10.0, "alpha": 4.0, "r_bob": 1.0,
        "lambda_e": 2.0, "tau": 0.3, "gamma_hat": 8.0,
    }


def test_dbm_to_linear():
    """Test dBm conversion with unit noise power."""
    assert dbm_to_linear(0.0) == pytest.approx(1.0)
    assert dbm_to_linear(10.0) == pytest.approx(10.0)
    assert dbm_to_linear(20.0) == pytest.approx(100.0)


def test_derive_kappa_and_constants(config):
    """Test the shorthand quantities."""
    d = derive(config)

    assert d.kappa == pytest.approx(0.91 * 10.0 * 20.0 / 1.9)
    assert d.delta == pytest.approx(0.5)
    assert d.beta == pytest.approx(2.784164, rel=1e-6)
    assert d.l0 == pytest.approx(0.5 / 19)
    assert d.l1 + d.l2 == pytest.approx(2.0)
    assert d.t_pow is None
    assert d.big_l is None


def test_derive_rate_quantities(config):
    """Test T, theta and omega appear when a rate is given."""
    d = derive(config, rate=2.0)

    assert d.t_pow == pytest.approx(4.0)
    assert d.theta == pytest.approx(0.75)
    assert d.omega == pytest.approx(3.0 / d.kappa)


def test_derive_outage_constant():
    """Test L for lambda_e = 2, eps = 0.01, P = 1."""
    config = SystemConfig(
        n_antennas=20, power=1.0, alpha=4.0, r_bob=1.0,
        lambda_e=2.0, tau=0.0, gamma_hat=20.0
    )
    d = derive(config, eps=0.01)

    assert d.big_l == pytest.approx(554.05, rel=1e-4)


def test_derive_perfect_error(config):
    """Test tau = 1 gives kappa = 0 and an infinite omega."""
    d = derive(config.model_copy(update={"tau": 1.0}), rate=1.0)

    assert d.kappa == 0.0
    assert math.isinf(d.omega)


@pytest.mark.parametrize("kwargs", [{"rate": 0.0}, {"rate": -1.0}, {"eps": 0.0}, {"eps": 1.0}])
def test_derive_domain_errors(config, kwargs):
    """Test rates and thresholds outside their domains."""
    with pytest.raises(DomainError):
        derive(config, **kwargs)


def test_system_from_table(system_table):
    """Test power in dBm becomes linear power."""
    config = system_from_table(system_table)
    assert config.power == pytest.approx(10.0)
    assert config.n_antennas == 8


def test_system_from_table_linear_power(system_table):
    """Test linear power is taken as is."""
    system_table.pop("power_dbm")
    system_table["power_linear"] = 3.0
    assert system_from_table(system_table).power == 3.0


def test_system_from_table_power_rules(system_table):
    """Test exactly one power entry is required."""
    with pytest.raises(ConfigError):
        system_from_table({**system_table, "power_linear": 3.0})

    system_table.pop("power_dbm")
    with pytest.raises(ConfigError):
        system_from_table(system_table)


def test_system_from_table_errors(system_table):
    """Test unknown keys and violated invariants."""
    with pytest.raises(ConfigError, match="unknown"):
        system_from_table({**system_table, "antennas": 4})
    with pytest.raises(ConfigError, match="n_antennas"):
        system_from_table({**system_table, "n_antennas": 1})


def test_apply_overrides(system_table):
    """Test bare and sectioned overrides."""
    raw = {"system": system_table, "fixed": {"rate": 2.0}}
    merged = apply_overrides(raw, ["tau=0.2", "rate=3", "mc.trials=500"])

    assert merged["system"]["tau"] == 0.2
    assert merged["fixed"]["rate"] == 3
    assert merged["mc"]["trials"] == 500
    assert raw["system"]["tau"] == 0.3


def test_apply_overrides_power_switch(system_table):
    """Test setting one power unit drops the other."""
    merged = apply_overrides({"system": system_table}, ["power_linear=2.5"])

    assert merged["system"]["power_linear"] == 2.5
    assert "power_dbm" not in merged["system"]


def test_apply_overrides_malformed(system_table):
    """Test malformed overrides are configuration errors."""
    with pytest.raises(ConfigError):
        apply_overrides({"system": system_table}, ["tau"])
    with pytest.raises(ConfigError):
        apply_overrides({"system": system_table}, ["bogus.tau=0.1"])


def test_load_raw_missing_file(tmp_path):
    """Test a missing file."""
    with pytest.raises(ConfigError, match="not found"):
        load_raw(str(tmp_path / "absent.toml"))


def test_load_raw_bad_toml(tmp_path):
    """Test a file that is not TOML."""
    path = tmp_path / "bad.toml"
    path.write_text("[system\nn_antennas = ")
    with pytest.raises(ConfigError):
        load_raw(str(path))


def test_load_raw_needs_system(tmp_path):
    """Test a file without a [system] section."""
    path = tmp_path / "empty.toml"
    path.write_text("[fixed]\nrate = 2.0\n")
    with pytest.raises(ConfigError, match="system"):
        load_raw(str(path))


def test_load_default_scenario():
    """Test the shipped default scenario."""
    scenario = load_scenario(str(ROOT / "data" / "default.toml"))

    assert scenario.system.n_antennas == 8
    assert scenario.system.power == pytest.approx(10.0)
    assert scenario.rate == 2.0
    assert scenario.eps == 0.01
    assert scenario.xi == 0.6
    assert scenario.mc.seed == 20151


def test_load_scenario_with_overrides():
    """Test overrides are applied before validation."""
    path = str(ROOT / "data" / "default.toml")
    config = load_system_config(path, ["n_antennas=4", "power_dbm=0"])

    assert config.n_antennas == 4
    assert config.power == pytest.approx(1.0)

    with pytest.raises(ConfigError):
        load_scenario(path, ["fixed.xi=1.5"])


def test_load_scenario_unknown_fixed_key(tmp_path):
    """Test unknown [fixed] keys are rejected."""
    path = tmp_path / "scenario.toml"
    path.write_text(
        "[system]\nn_antennas = 4\npower_dbm = 0.0\nalpha = 4.0\n"
        "lambda_e = 1.0\ntau = 0.0\ngamma_hat = 4.0\n\n[fixed]\nrs = 2.0\n"
    )
    with pytest.raises(ConfigError, match="fixed"):
        load_scenario(str(path))


def test_kappa_decreasing_in_tau(config):
    """Test kappa falls strictly as the estimation error grows."""
    kappas = [derive(config.model_copy(update={"tau": float(t)})).kappa for t in np.linspace(0.0, 0.99, 100)]
    assert all(b < a for a, b in zip(kappas[:-1], kappas[1:]))


@pytest.mark.parametrize("rate", [0.5, 1.0, 2.0, 3.7])
def test_omega_times_kappa(config, rate):
    """Test omega * kappa reproduces T - 1 to a few ulp."""
    d = derive(config, rate=rate)
    assert abs(d.omega * d.kappa - (d.t_pow - 1.0)) <= 4 * math.ulp(d.t_pow - 1.0)


def test_derive_is_repeatable(config):
    """Test identical inputs give identical outputs."""
    assert derive(config, rate=2.0, eps=0.01) == derive(config, rate=2.0, eps=0.01)


def test_derive_unvalidated_alpha(config):
    """Test a config built without validation still cannot use alpha <= 2."""
    raw = SystemConfig.model_construct(**{**config.model_dump(), "alpha": 2.0})
    with pytest.raises(DomainError, match="path-loss"):
        derive(raw)
