"""
Unit tests for secrecy outage minimisation.
"""

import math

import numpy as np
import pytest
from src.models import Regime, SystemConfig
from src.optimizers.sop_min import (
    cubic_coefficients,
    dxi_domega,
    gamma_e_cdf,
    gamma_e_quantile,
    j_factor,
    k_cubic,
    min_sop,
    optimal_par_sop,
    regime_boundaries,
    sop,
    sop_problem
)
from src.utils import DomainError, FeasibilityError


def perfect_csi(kappa: float, lambda_e: float = 2.0, n: int = 20) -> SystemConfig:
    """Configuration with tau = 0 and P = 1, so kappa = gamma_hat."""
    return SystemConfig(
        n_antennas=n, power=1.0, alpha=4.0, r_bob=1.0,
        lambda_e=lambda_e, tau=0.0, gamma_hat=kappa
    )


@pytest.fixture
def interior_problem():
    """N = gamma_hat = 20, P = 10, tau = 0.3, R_S = 2 (kappa about 95.8)."""
    config = SystemConfig(
        n_antennas=20, power=10.0, alpha=4.0, r_bob=1.0,
        lambda_e=2.0, tau=0.3, gamma_hat=20.0
    )
    return sop_problem(config, 2.0)


def test_regime_boundaries():
    """Test the kappa thresholds for R_S = 2, alpha = 4."""
    prob = sop_problem(perfect_csi(10.0), 2.0)
    lower, upper = regime_boundaries(prob)

    assert lower == pytest.approx(3.0)
    assert upper == pytest.approx(3.0 * (1.0 + math.sqrt(0.5 / 0.75)))


def test_suspend_regime():
    """Test kappa <= T - 1 suspends transmission."""
    decision = optimal_par_sop(sop_problem(perfect_csi(2.0), 2.0))

    assert decision.regime == Regime.SUSPEND
    assert decision.xi is None
    assert decision.objective is None


def test_suspend_at_exact_threshold():
    """Test kappa = T - 1 exactly is suspended."""
    decision = optimal_par_sop(sop_problem(perfect_csi(3.0), 2.0))
    assert decision.regime == Regime.SUSPEND


def test_full_power_regime():
    """Test kappa between the thresholds uses all power for the signal."""
    prob = sop_problem(perfect_csi(5.0), 2.0)
    decision = optimal_par_sop(prob)

    assert decision.regime == Regime.FULL_POWER
    assert decision.xi == 1.0
    assert decision.objective == pytest.approx(sop(1.0, prob))
    assert 0.0 < decision.objective < 1.0


def test_interior_regime(interior_problem):
    """Test the interior optimum is the cubic's root on (omega, 1)."""
    decision = optimal_par_sop(interior_problem)
    omega = interior_problem.derived.omega

    assert decision.regime == Regime.INTERIOR
    assert omega < decision.xi < 1.0
    assert decision.xi == pytest.approx(0.18, abs=0.03)
    assert abs(k_cubic(decision.xi, interior_problem)) <= 1e-9 * max(1.0, k_cubic(1.0, interior_problem))


def test_interior_is_a_minimum(interior_problem):
    """Test neighbouring ratios give a larger outage."""
    xi = optimal_par_sop(interior_problem).xi
    best = j_factor(xi, interior_problem)

    for step in (1e-3, 1e-2, 1e-1):
        assert j_factor(xi + step, interior_problem) > best
        assert j_factor(xi - step * (xi - interior_problem.derived.omega), interior_problem) > best


def test_cardano_matches_bisection(interior_problem):
    """Test the two cubic solution paths agree."""
    fast = optimal_par_sop(interior_problem)
    slow = optimal_par_sop(interior_problem, force_bisection=True)

    assert fast.xi == pytest.approx(slow.xi, abs=1e-9)


def test_cubic_signs(interior_problem):
    """Test K < 0 just above omega and K > 0 at 1."""
    omega = interior_problem.derived.omega
    a, b, c = cubic_coefficients(interior_problem)

    assert c > 0
    assert k_cubic(omega, interior_problem) < 0
    assert k_cubic(1.0, interior_problem) > 0


def test_optimum_falls_with_kappa(interior_problem):
    """Test the implicit derivative sign: a larger kappa lowers the optimum."""
    xi = optimal_par_sop(interior_problem).xi
    assert dxi_domega(xi, interior_problem) > 0

    stronger = sop_problem(interior_problem.config.model_copy(update={"gamma_hat": 40.0}), 2.0)
    assert optimal_par_sop(stronger).xi < xi


def test_sop_infeasible_ratio(interior_problem):
    """Test ratios at or below omega are rejected."""
    omega = interior_problem.derived.omega
    with pytest.raises(FeasibilityError):
        sop(omega, interior_problem)
    with pytest.raises(FeasibilityError):
        sop(omega / 2.0, interior_problem)


def test_sop_without_eavesdroppers(interior_problem):
    """Test an empty eavesdropper field never causes outage."""
    config = interior_problem.config.model_copy(update={"lambda_e": 0.0})
    assert sop(0.5, sop_problem(config, 2.0)) == 0.0


def test_sop_grows_with_density(interior_problem):
    """Test outage increases with the eavesdropper density."""
    values = [
        sop(0.5, sop_problem(interior_problem.config.model_copy(update={"lambda_e": lam}), 2.0))
        for lam in (0.5, 1.0, 2.0, 4.0)
    ]
    assert all(b > a for a, b in zip(values[:-1], values[1:]))


def test_sop_falls_with_antennas():
    """Test adding antennas lowers the outage at a fixed ratio."""
    values = []
    for n in (2, 4, 8):
        config = SystemConfig(
            n_antennas=n, power=10.0, alpha=4.0, r_bob=1.0,
            lambda_e=2.0, tau=0.3, gamma_hat=float(n)
        )
        values.append(sop(0.6, sop_problem(config, 2.0)))

    assert values[0] > values[1] > values[2]


def test_min_sop(interior_problem):
    """Test the minimum matches the outage at the optimal ratio."""
    decision = min_sop(interior_problem)
    assert decision.objective == pytest.approx(sop(decision.xi, interior_problem))


def test_gamma_e_cdf_shape_and_range(interior_problem):
    """Test the strongest-Eve CDF is increasing from 0 and keeps array shape."""
    x = np.array([0.0, 0.1, 1.0, 10.0, 50.0])
    cdf = gamma_e_cdf(x, 0.5, interior_problem.config)

    assert cdf.shape == x.shape
    assert cdf[0] == 0.0
    assert np.all(np.diff(cdf) > 0)
    assert cdf[-1] < 1.0
    assert isinstance(gamma_e_cdf(1.0, 0.5, interior_problem.config), float)


def test_gamma_e_cdf_matches_sop(interior_problem):
    """Test outage equals the tail of the strongest-Eve SINR at the redundancy threshold."""
    d = interior_problem.derived
    xi = 0.5
    threshold = (1.0 + d.kappa * xi) / d.t_pow - 1.0

    tail = 1.0 - gamma_e_cdf(threshold, xi, interior_problem.config)
    assert sop(xi, interior_problem) == pytest.approx(tail, rel=1e-9)


def test_gamma_e_cdf_negative(interior_problem):
    """Test negative thresholds are rejected."""
    with pytest.raises(DomainError):
        gamma_e_cdf(-1.0, 0.5, interior_problem.config)


def test_gamma_e_quantile(interior_problem):
    """Test the quantile inverts the CDF."""
    config = interior_problem.config
    for p in (0.01, 0.5, 0.99):
        x = gamma_e_quantile(p, 0.5, config)
        assert gamma_e_cdf(x, 0.5, config) == pytest.approx(p, abs=1e-6)

    with pytest.raises(DomainError):
        gamma_e_quantile(1.0, 0.5, config)
