"""
Unit tests for secrecy-rate maximisation.
"""

import math

import pytest
from pydantic import ValidationError
from src.models import Regime, RhoMode, RhoSolver, SystemConfig
from src.optimizers.rate_max import (
    a_residual,
    d2rho_dxi2,
    drho_dxi,
    drs_dxi,
    full_power_condition,
    max_rate,
    optimal_par_rate,
    rate_problem,
    rho,
    rho_feasibility_edge,
    rho_solver,
    secrecy_rate,
    z_residual
)
from src.utils import DomainError, FeasibilityError


def perfect_csi(kappa: float, lambda_e: float = 2.0, n: int = 20) -> SystemConfig:
    """Configuration with tau = 0 and P = 1, so kappa = gamma_hat."""
    return SystemConfig(
        n_antennas=n, power=1.0, alpha=4.0, r_bob=1.0,
        lambda_e=lambda_e, tau=0.0, gamma_hat=kappa
    )


@pytest.fixture
def problem():
    """N = 20, P = 1, lambda_e = 2, eps = 0.01 (L about 554), kappa = 50."""
    return rate_problem(perfect_csi(50.0), 0.01)


@pytest.fixture
def solver(problem):
    """Exact quantile solver."""
    return rho_solver(problem)


def test_rho_solver_settings(problem, solver):
    """Test rho_max = L^(1/delta)."""
    assert solver.rho_max == pytest.approx(problem.derived.big_l ** 2)
    assert solver.mode == RhoMode.EXACT


def test_rho_solver_rejects_bad_tolerance():
    """Test the tolerance must be positive."""
    with pytest.raises(ValidationError):
        RhoSolver(tol=0.0, rho_max=1.0)


def test_rho_at_zero(problem, solver):
    """Test the smallest quantile for this setup lies in (6, 7)."""
    assert 6.0 < rho(0.0, problem, solver) < 7.0


def test_rho_at_one(problem, solver):
    """Test rho(1) is rho_max."""
    assert rho(1.0, problem, solver) == solver.rho_max


def test_rho_solves_outage_constraint(problem, solver):
    """Test the residual vanishes at the solved quantile."""
    for xi in (0.0, 0.3, 0.7, 0.95):
        r = rho(xi, problem, solver)
        assert abs(z_residual(xi, r, problem)) / problem.derived.big_l < 1e-6


def test_rho_increasing_and_convex(problem, solver):
    """Test rho grows with xi, faster and faster."""
    xis = [0.1, 0.3, 0.5, 0.7]
    values = [rho(xi, problem, solver) for xi in xis]

    assert all(b > a for a, b in zip(values[:-1], values[1:]))
    for xi, r in zip(xis, values):
        assert drho_dxi(xi, r, problem) > 0
        assert d2rho_dxi2(xi, r, problem) > 0


def test_drho_dxi_matches_finite_difference(problem, solver):
    """Test the analytic slope against a central difference."""
    xi, h = 0.5, 1e-4
    numeric = (rho(xi + h, problem, solver) - rho(xi - h, problem, solver)) / (2 * h)
    analytic = drho_dxi(xi, rho(xi, problem, solver), problem)

    assert analytic == pytest.approx(numeric, rel=1e-4)


def test_rho_domain(problem, solver):
    """Test ratios outside [0, 1]."""
    with pytest.raises(DomainError):
        rho(1.5, problem, solver)
    with pytest.raises(DomainError):
        rho(-0.1, problem, solver)


def test_rho_without_eavesdroppers():
    """Test an empty field has a zero quantile."""
    prob = rate_problem(perfect_csi(50.0, lambda_e=0.0), 0.01)
    assert rho(0.5, prob, rho_solver(prob)) == 0.0


def test_large_n_identity(problem):
    """Test the Lambert-W quantile solves delta log(rho) + (1 - xi) rho = log(L)."""
    solver = rho_solver(problem, mode=RhoMode.LARGE_N)
    d = problem.derived
    for xi in (0.0, 0.4, 0.9):
        r = rho(xi, problem, solver)
        assert d.delta * math.log(r) + (1.0 - xi) * r == pytest.approx(math.log(d.big_l), rel=1e-10)


def test_large_n_close_for_many_antennas():
    """Test the large-N quantile approaches the exact one as N grows."""
    prob = rate_problem(perfect_csi(50.0, n=200), 0.01)
    exact = rho(0.5, prob, rho_solver(prob))
    approx = rho(0.5, prob, rho_solver(prob, mode=RhoMode.LARGE_N))

    assert approx == pytest.approx(exact, rel=0.05)
    assert approx <= exact


def test_secrecy_rate_at_zero(problem, solver):
    """Test no signal power gives no secrecy rate."""
    assert secrecy_rate(0.0, problem, solver) == 0.0


def test_secrecy_rate_infeasible_is_zero(problem, solver):
    """Test rho(xi) >= kappa gives zero rate."""
    assert secrecy_rate(1.0, problem, solver) == 0.0


def test_secrecy_rate_without_eavesdroppers():
    """Test the rate is the main-channel capacity without eavesdroppers."""
    prob = rate_problem(perfect_csi(50.0, lambda_e=0.0), 0.01)
    assert secrecy_rate(0.5, prob, rho_solver(prob)) == pytest.approx(math.log2(26.0))


def test_suspend_regime():
    """Test kappa <= rho(0) suspends transmission."""
    prob = rate_problem(perfect_csi(3.0), 0.01)
    decision = optimal_par_rate(prob, rho_solver(prob))

    assert decision.regime == Regime.SUSPEND
    assert decision.objective is None


def test_interior_regime(problem, solver):
    """Test the interior optimum is a feasible stationary point."""
    decision = optimal_par_rate(problem, solver)
    edge = rho_feasibility_edge(problem, solver)

    assert decision.regime == Regime.INTERIOR
    assert 0.0 < decision.xi < edge < 1.0
    assert rho(decision.xi, problem, solver) < problem.derived.kappa
    assert abs(drs_dxi(decision.xi, problem, solver)) < 1e-6
    assert decision.objective == pytest.approx(secrecy_rate(decision.xi, problem, solver))


def test_interior_is_a_maximum(problem, solver):
    """Test neighbouring ratios give a lower secrecy rate."""
    xi = optimal_par_rate(problem, solver).xi
    best = secrecy_rate(xi, problem, solver)

    for step in (1e-3, 1e-2):
        assert secrecy_rate(xi + step, problem, solver) < best
        assert secrecy_rate(xi - step, problem, solver) < best


def test_stationarity_residual(problem, solver):
    """Test the quadratic stationarity identity holds at the optimum."""
    xi = optimal_par_rate(problem, solver).xi
    r = rho(xi, problem, solver)
    kappa = problem.derived.kappa
    scale = kappa * r ** 2 + kappa * r + problem.derived.delta * kappa

    assert abs(a_residual(xi, r, problem)) / scale < 1e-6


def test_full_power_regime():
    """Test a sparse field with a loose constraint uses full power."""
    prob = rate_problem(perfect_csi(20.0, lambda_e=1e-3), 0.5)
    solver = rho_solver(prob)
    decision = optimal_par_rate(prob, solver)

    assert solver.rho_max < 20.0
    assert full_power_condition(prob)
    assert decision.regime == Regime.FULL_POWER
    assert decision.xi == 1.0
    assert decision.objective == pytest.approx(math.log2(21.0 / (1.0 + solver.rho_max)))


def test_full_power_condition_false_for_dense_field(problem):
    """Test the closed-form test fails when L is large."""
    assert not full_power_condition(problem)


def test_no_eavesdroppers_full_power():
    """Test an empty field transmits at full power."""
    prob = rate_problem(perfect_csi(50.0, lambda_e=0.0), 0.01)
    decision = optimal_par_rate(prob, rho_solver(prob))

    assert decision.regime == Regime.FULL_POWER
    assert decision.objective == pytest.approx(math.log2(51.0))


def test_drs_dxi_infeasible(problem, solver):
    """Test the slope is undefined where rho(xi) >= kappa."""
    with pytest.raises(FeasibilityError):
        drs_dxi(1.0, problem, solver)


def test_max_rate(problem, solver):
    """Test the maximum matches the rate at the optimal ratio."""
    decision = max_rate(problem, solver)
    assert decision.objective == pytest.approx(secrecy_rate(decision.xi, problem, solver))


def test_optimum_rises_with_eps():
    """Test a looser outage constraint allows more signal power."""
    xis = []
    for eps in (0.005, 0.01, 0.05):
        prob = rate_problem(perfect_csi(50.0), eps)
        xis.append(optimal_par_rate(prob, rho_solver(prob)).xi)

    assert xis[0] < xis[1] < xis[2]
