"""
Secrecy outage minimisation: closed-form outage probability, the
stationarity cubic and the three-regime optimal power-allocation ratio.
"""

import math
from typing import Tuple

import numpy as np

from src.config import BISECTION_TOL
from src.models import ParDecision, Regime, SopProblem, SystemConfig
from src.numerics import Bracket, bisect, cubic_root_in_interval, cubic_value
from src.params import derive
from src.utils import DomainError, FeasibilityError, setup_logger


logger = setup_logger(__name__)


def sop_problem(config: SystemConfig, rate: float) -> SopProblem:
    """Bundle a configuration and target rate with its derived quantities."""
    return SopProblem(config=config, rate=rate, derived=derive(config, rate=rate))


def regime_boundaries(prob: SopProblem) -> Tuple[float, float]:
    """
    Kappa thresholds separating the three regimes.

    Returns:
        (T - 1, (T - 1)(1 + sqrt(delta / theta))): suspend at or below the
        first, full power up to and including the second
    """
    d = prob.derived
    lower = d.t_pow - 1.0
    return lower, lower * (1.0 + math.sqrt(d.delta / d.theta))


def _check_feasible(xi: float, prob: SopProblem) -> None:
    omega = prob.derived.omega
    if not omega < xi <= 1.0:
        raise FeasibilityError(
            f"xi={xi:.6g} outside ({omega:.6g}, 1]: connection to Bob unsupported"
        )


def j_factor(xi: float, prob: SopProblem) -> float:
    """
    Ratio-dependent factor of the outage exponent.

    Raises:
        FeasibilityError: If xi <= omega or xi > 1
    """
    _check_feasible(xi, prob)
    d = prob.derived
    n = prob.config.n_antennas

    phi = (1.0 / xi - 1.0) / (n - 1)
    first = (1.0 / d.omega - 1.0 / xi) ** (-d.delta)
    second = (1.0 + (xi / d.omega - 1.0) * d.theta * phi) ** (1 - n)
    return first * second


def sop(xi: float, prob: SopProblem) -> float:
    """
    Secrecy outage probability at power-allocation ratio xi.

    Args:
        xi: Fraction of power on the information signal, omega < xi <= 1
        prob: Outage minimisation problem

    Returns:
        Outage probability in [0, 1)

    Raises:
        FeasibilityError: If xi <= omega
    """
    _check_feasible(xi, prob)
    cfg = prob.config
    if cfg.lambda_e == 0:
        return 0.0

    d = prob.derived
    exponent = d.beta * cfg.lambda_e * (cfg.power / d.theta) ** d.delta * j_factor(xi, prob)
    return -math.expm1(-exponent)


def gamma_e_cdf(x, xi: float, config: SystemConfig):
    """
    CDF of the strongest eavesdropper's SINR.

    Args:
        x: Threshold or array of thresholds, all >= 0
        xi: Power allocation ratio in [0, 1]
        config: Physical scenario

    Returns:
        P{max_k SINR_k < x}, same shape as x
    """
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr < 0):
        raise DomainError("SINR thresholds must be nonnegative")

    if config.lambda_e == 0 or xi == 0:
        result = np.where(x_arr > 0, 1.0, 0.0) if xi == 0 else np.ones_like(x_arr)
        return float(result) if result.ndim == 0 else result

    d = derive(config)
    n = config.n_antennas
    phi = (1.0 / xi - 1.0) / (n - 1)

    with np.errstate(divide="ignore"):
        tail = (
            d.beta * config.lambda_e * (config.power * xi) ** d.delta
            * x_arr ** (-d.delta) * (1.0 + phi * x_arr) ** (1 - n)
        )
    result = np.exp(-tail)
    return float(result) if result.ndim == 0 else result


def gamma_e_quantile(p: float, xi: float, config: SystemConfig, tol: float = BISECTION_TOL) -> float:
    """
    Inverse of gamma_e_cdf by doubling then bisection.

    Raises:
        DomainError: If p is not in (0, 1)
    """
    if not 0 < p < 1:
        raise DomainError(f"quantile level must lie in (0, 1), got {p}")
    if config.lambda_e == 0 or xi == 0:
        return 0.0

    def f(x: float) -> float:
        return (gamma_e_cdf(x, xi, config) if x > 0 else 0.0) - p

    hi = 1.0
    while f(hi) < 0:
        hi *= 2.0
    return bisect(f, Bracket.around(f, 0.0, hi), tol * max(1.0, hi))


def cubic_coefficients(prob: SopProblem) -> Tuple[float, float, float]:
    """Coefficients (a, b, c) of the monic stationarity cubic."""
    d = prob.derived
    omega = d.omega
    a = -d.l1 * omega
    b = -(d.delta / d.theta) * omega ** 2 - d.l0 * omega ** 2 - d.l2 * omega
    c = d.l2 * omega ** 2
    return a, b, c


def k_cubic(xi: float, prob: SopProblem) -> float:
    """Stationarity cubic K(xi); its sign is the sign of dJ/dxi on (omega, 1]."""
    return cubic_value(xi, *cubic_coefficients(prob))


def dxi_domega(xi_o: float, prob: SopProblem) -> float:
    """
    Implicit derivative of the interior optimum with respect to omega.

    Positive values mean the optimum falls as kappa grows.
    """
    d = prob.derived
    omega = d.omega
    a, b, _ = cubic_coefficients(prob)

    dk_dxi = (3.0 * xi_o + 2.0 * a) * xi_o + b
    dk_domega = (
        -d.l1 * xi_o ** 2
        - (2.0 * (d.delta / d.theta) * omega + 2.0 * d.l0 * omega + d.l2) * xi_o
        + 2.0 * d.l2 * omega
    )
    return -dk_domega / dk_dxi


def optimal_par_sop(prob: SopProblem, force_bisection: bool = False) -> ParDecision:
    """
    Outage-minimising power-allocation ratio.

    Args:
        prob: Outage minimisation problem
        force_bisection: Solve the cubic by bisection only

    Returns:
        Suspend when kappa <= T - 1, FullPower up to the upper kappa
        threshold, otherwise Interior at the cubic's root on (omega, 1)
    """
    kappa = prob.derived.kappa
    suspend_at, full_power_up_to = regime_boundaries(prob)

    if kappa <= suspend_at:
        logger.debug(f"kappa={kappa:.6g} <= T-1={suspend_at:.6g}: suspend")
        return ParDecision(regime=Regime.SUSPEND)

    if kappa <= full_power_up_to:
        logger.debug(f"kappa={kappa:.6g} <= {full_power_up_to:.6g}: full power")
        return ParDecision(regime=Regime.FULL_POWER, xi=1.0, objective=sop(1.0, prob))

    omega = prob.derived.omega
    a, b, c = cubic_coefficients(prob)
    if cubic_value(1.0, a, b, c) <= 0:
        logger.warning(
            f"K(1) <= 0 at kappa={kappa:.6g} just above the full-power threshold; using xi=1"
        )
        return ParDecision(regime=Regime.FULL_POWER, xi=1.0, objective=sop(1.0, prob))

    xi_o = cubic_root_in_interval(a, b, c, omega, 1.0, force_bisection=force_bisection)
    if not omega < xi_o < 1.0:
        logger.warning(f"cubic root {xi_o!r} hit the interval edge; using xi=1")
        return ParDecision(regime=Regime.FULL_POWER, xi=1.0, objective=sop(1.0, prob))

    logger.debug(f"kappa={kappa:.6g}: interior optimum xi={xi_o:.10g}")
    return ParDecision(regime=Regime.INTERIOR, xi=xi_o, objective=sop(xi_o, prob))


def min_sop(prob: SopProblem) -> ParDecision:
    """Minimum outage probability; a suspended link carries no objective."""
    decision = optimal_par_sop(prob)
    if decision.regime == Regime.SUSPEND:
        return decision
    return decision.model_copy(update={"objective": sop(decision.xi, prob)})
