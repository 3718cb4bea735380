"""
Secrecy-rate maximisation under an outage constraint.

The outage constraint is rewritten as an implicit eavesdropper quantile
rho(xi), solved by bisection (exact) or through Lambert-W (large N). The
secrecy rate is concave in xi on its feasible segment, so the optimum is
the zero of its slope.
"""

import math

from src.config import BISECTION_TOL
from src.models import ParDecision, RateProblem, Regime, RhoMode, RhoSolver, SystemConfig
from src.numerics import Bracket, bisect, lambert_w0
from src.params import derive
from src.utils import DomainError, FeasibilityError, setup_logger


logger = setup_logger(__name__)

LN2 = math.log(2.0)


def rate_problem(config: SystemConfig, eps: float) -> RateProblem:
    """Bundle a configuration and outage threshold with its derived quantities."""
    return RateProblem(config=config, eps=eps, derived=derive(config, eps=eps))


def rho_solver(prob: RateProblem, tol: float = BISECTION_TOL, mode: RhoMode = RhoMode.EXACT) -> RhoSolver:
    """Solver settings with rho_max = L^(1/delta) taken from the problem."""
    d = prob.derived
    return RhoSolver(tol=tol, rho_max=d.big_l ** (1.0 / d.delta), mode=mode)


def z_residual(xi: float, rho: float, prob: RateProblem) -> float:
    """Outage-constraint residual; zero exactly when rho = rho(xi)."""
    d = prob.derived
    n = prob.config.n_antennas
    return rho ** d.delta * (1.0 + rho * (1.0 - xi) / (n - 1)) ** (n - 1) - d.big_l


def _check_ratio(xi: float) -> None:
    if not 0.0 <= xi <= 1.0:
        raise DomainError(f"power allocation ratio must lie in [0, 1], got {xi}")


def rho(xi: float, prob: RateProblem, solver: RhoSolver) -> float:
    """
    Eavesdropper SINR quantile scaled by 1/xi at outage level eps.

    Args:
        xi: Power allocation ratio in [0, 1]
        prob: Rate maximisation problem
        solver: Tolerance, rho_max and evaluation mode

    Returns:
        rho(xi) in (0, rho_max]; 0 when there are no eavesdroppers
    """
    _check_ratio(xi)
    if prob.config.lambda_e == 0:
        return 0.0
    if xi == 1.0:
        return solver.rho_max

    d = prob.derived
    if solver.mode == RhoMode.LARGE_N:
        u = (1.0 - xi) * solver.rho_max / d.delta
        return d.delta * lambert_w0(u) / (1.0 - xi)

    n1 = prob.config.n_antennas - 1
    log_l = math.log(d.big_l)
    spread = (1.0 - xi) / n1

    def log_residual(r: float) -> float:
        if r <= 0:
            return -math.inf
        return d.delta * math.log(r) + n1 * math.log1p(r * spread) - log_l

    bracket = Bracket(lo=0.0, hi=solver.rho_max, f_lo=-math.inf, f_hi=log_residual(solver.rho_max))
    return bisect(log_residual, bracket, solver.tol)


def drho_dxi(xi: float, rho_val: float, prob: RateProblem, large_n: bool = False) -> float:
    """First derivative of rho(xi) at a solved (xi, rho) pair."""
    d = prob.derived
    l2 = 1.0 if large_n else d.l2
    return rho_val ** 2 / (d.delta + l2 * (1.0 - xi) * rho_val)


def d2rho_dxi2(xi: float, rho_val: float, prob: RateProblem, large_n: bool = False) -> float:
    """Second derivative of rho(xi); positive, so rho is convex."""
    if rho_val == 0:
        return 0.0
    d = prob.derived
    l2 = 1.0 if large_n else d.l2
    slope = drho_dxi(xi, rho_val, prob, large_n)
    denom = d.delta + l2 * (1.0 - xi) * rho_val
    return 2.0 * slope ** 2 / rho_val + l2 * rho_val ** 2 * (rho_val - (1.0 - xi) * slope) / denom ** 2


def secrecy_rate(xi: float, prob: RateProblem, solver: RhoSolver) -> float:
    """
    Largest secrecy rate meeting the outage constraint at ratio xi.

    Returns:
        log2((1 + kappa xi) / (1 + rho xi)) when rho(xi) < kappa, else 0
    """
    _check_ratio(xi)
    if xi == 0:
        return 0.0

    kappa = prob.derived.kappa
    r = rho(xi, prob, solver)
    if not r < kappa:
        return 0.0
    return max(0.0, math.log2((1.0 + kappa * xi) / (1.0 + r * xi)))


def _slope(xi: float, r: float, prob: RateProblem, large_n: bool) -> float:
    kappa = prob.derived.kappa
    r_prime = drho_dxi(xi, r, prob, large_n)
    return (kappa / (1.0 + kappa * xi) - (r + xi * r_prime) / (1.0 + xi * r)) / LN2


def drs_dxi(xi: float, prob: RateProblem, solver: RhoSolver) -> float:
    """
    Slope of the secrecy rate with respect to xi.

    Raises:
        FeasibilityError: If rho(xi) >= kappa
    """
    r = rho(xi, prob, solver)
    if not r < prob.derived.kappa:
        raise FeasibilityError(
            f"rho({xi:.6g})={r:.6g} >= kappa={prob.derived.kappa:.6g}: no positive secrecy rate"
        )
    return _slope(xi, r, prob, solver.mode == RhoMode.LARGE_N)


def rho_feasibility_edge(prob: RateProblem, solver: RhoSolver) -> float:
    """
    Largest xi with rho(xi) < kappa, for rho(0) < kappa <= rho_max.

    Raises:
        BracketError: If kappa does not lie between rho(0) and rho_max
    """
    kappa = prob.derived.kappa

    def gap(xi: float) -> float:
        return rho(xi, prob, solver) - kappa

    return bisect(gap, Bracket.around(gap, 0.0, 1.0), solver.tol)


def a_residual(xi: float, rho_val: float, prob: RateProblem, large_n: bool = False) -> float:
    """Stationarity condition written as a quadratic in rho; zero at the interior optimum."""
    d = prob.derived
    kappa = d.kappa
    l0 = 0.0 if large_n else d.l0
    l2 = 1.0 if large_n else d.l2
    return (
        (kappa * xi ** 2 - l0 * xi + l2) * rho_val ** 2
        + (l2 * kappa * xi - l2 * kappa + d.delta) * rho_val
        - d.delta * kappa
    )


def full_power_condition(prob: RateProblem) -> bool:
    """Closed-form test for a positive slope at xi = 1."""
    d = prob.derived
    alpha = prob.config.alpha
    big_l = d.big_l
    if not big_l < d.delta ** (1.0 / alpha):
        return False
    threshold = (d.delta * big_l ** (alpha / 2.0) + big_l ** alpha) / (d.delta - big_l ** alpha)
    return d.kappa > threshold


def optimal_par_rate(prob: RateProblem, solver: RhoSolver) -> ParDecision:
    """
    Power-allocation ratio that maximises the secrecy rate.

    Args:
        prob: Rate maximisation problem
        solver: Quantile solver settings

    Returns:
        Suspend when kappa <= rho(0), FullPower when the slope at xi = 1 is
        nonnegative, otherwise Interior at the zero of the slope
    """
    kappa = prob.derived.kappa
    large_n = solver.mode == RhoMode.LARGE_N

    if prob.config.lambda_e == 0:
        if kappa == 0:
            return ParDecision(regime=Regime.SUSPEND)
        return ParDecision(regime=Regime.FULL_POWER, xi=1.0, objective=math.log2(1.0 + kappa))

    rho_min = rho(0.0, prob, solver)
    if kappa <= rho_min:
        logger.debug(f"kappa={kappa:.6g} <= rho_min={rho_min:.6g}: suspend")
        return ParDecision(regime=Regime.SUSPEND)

    closed_form = full_power_condition(prob)

    def guarded_slope(xi: float) -> float:
        r = rho(xi, prob, solver)
        if not r < kappa:
            return -math.inf
        return _slope(xi, r, prob, large_n)

    if solver.rho_max >= kappa:
        hi = rho_feasibility_edge(prob, solver)
        if closed_form:
            logger.warning(
                f"closed-form full-power test holds but xi=1 is infeasible (kappa={kappa:.6g}, L={prob.derived.big_l:.6g})"
            )
    else:
        slope_at_one = _slope(1.0, solver.rho_max, prob, large_n)
        if closed_form != (slope_at_one > 0):
            logger.warning(
                f"full-power tests disagree: slope(1)={slope_at_one:.6g}, closed form {closed_form} "
                f"(kappa={kappa:.6g}, L={prob.derived.big_l:.6g})"
            )
        if slope_at_one >= 0:
            logger.debug(f"slope at xi=1 is {slope_at_one:.6g}: full power")
            return ParDecision(
                regime=Regime.FULL_POWER, xi=1.0, objective=secrecy_rate(1.0, prob, solver)
            )
        hi = 1.0

    xi_r = bisect(guarded_slope, Bracket.around(guarded_slope, 0.0, hi), solver.tol)
    logger.debug(f"kappa={kappa:.6g}: interior optimum xi={xi_r:.10g}")
    return ParDecision(regime=Regime.INTERIOR, xi=xi_r, objective=secrecy_rate(xi_r, prob, solver))


def max_rate(prob: RateProblem, solver: RhoSolver) -> ParDecision:
    """Maximum secrecy rate; a suspended link carries no objective."""
    decision = optimal_par_rate(prob, solver)
    if decision.regime == Regime.SUSPEND:
        return decision
    return decision.model_copy(update={"objective": secrecy_rate(decision.xi, prob, solver)})
