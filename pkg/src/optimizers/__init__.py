"""Init file for optimizers package."""

from src.optimizers.sop_min import min_sop, optimal_par_sop, sop, sop_problem
from src.optimizers.rate_max import max_rate, optimal_par_rate, rate_problem, rho, secrecy_rate

__all__ = [
    "min_sop",
    "optimal_par_sop",
    "sop",
    "sop_problem",
    "max_rate",
    "optimal_par_rate",
    "rate_problem",
    "rho",
    "secrecy_rate",
]
