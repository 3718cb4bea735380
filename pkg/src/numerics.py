"""
Special functions and root finders used by the optimizers.
"""

import logging
import math
from typing import Callable, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator
from scipy import optimize, special

from src.config import (
    BISECTION_MAXITER, BISECTION_TOL, CARDANO_SLACK,
    CUBIC_ROOT_TOL, LAMBERT_W_MAXITER
)
from src.utils import BracketError, DomainError, setup_logger


logger = setup_logger(__name__)

RTOL_FLOOR = 4 * np.finfo(float).eps


class Bracket(BaseModel):
    """Interval enclosing a sign change of a scalar function."""
    model_config = ConfigDict(frozen=True)

    lo: float
    hi: float
    f_lo: float
    f_hi: float

    @model_validator(mode="after")
    def _check_bracket(self) -> "Bracket":
        if not self.lo < self.hi:
            raise ValueError(f"bracket needs lo < hi, got [{self.lo}, {self.hi}]")
        if self.f_lo * self.f_hi > 0:
            raise ValueError("bracket does not enclose a sign change")
        return self

    @classmethod
    def around(cls, f: Callable[[float], float], lo: float, hi: float) -> "Bracket":
        """
        Evaluate f at both ends and build the bracket.

        Raises:
            BracketError: If f has the same strict sign at both ends
        """
        f_lo, f_hi = f(lo), f(hi)
        if f_lo * f_hi > 0 or math.isnan(f_lo) or math.isnan(f_hi):
            raise BracketError(
                f"no sign change on [{lo:.6g}, {hi:.6g}]: f = ({f_lo:.6g}, {f_hi:.6g})"
            )
        return cls(lo=lo, hi=hi, f_lo=f_lo, f_hi=f_hi)


def gamma_fn(x: float) -> float:
    """
    Euler gamma function on the positive axis.

    Raises:
        DomainError: If x <= 0
    """
    if not x > 0:
        raise DomainError(f"gamma_fn needs x > 0, got {x}")
    return float(special.gamma(x))


def lambert_w0(x: float) -> float:
    """
    Principal branch of the Lambert-W function for x >= 0.

    Halley's iteration from a log1p start (x <= e) or the asymptotic
    log(x) - log(log(x)) start, stopping once the step is within 4 ulp of w
    (Halley settles into ulp-level oscillation, never an exact fixed point).

    Args:
        x: Nonnegative argument

    Returns:
        w >= 0 with w * exp(w) = x

    Raises:
        DomainError: If x < 0 or x is NaN
    """
    if not x >= 0:
        raise DomainError(f"lambert_w0 is only defined here for x >= 0, got {x}")
    if x == 0:
        return 0.0
    if math.isinf(x):
        return math.inf

    if x <= math.e:
        w = math.log1p(x) * (1.0 - 0.25 * math.log1p(x) / (1.0 + math.log1p(x)))
    else:
        l1 = math.log(x)
        l2 = math.log(l1)
        w = l1 - l2 + l2 / l1

    for _ in range(LAMBERT_W_MAXITER):
        ew = math.exp(w)
        f = w * ew - x
        w1 = w + 1.0
        dw = f / (ew * w1 - (w + 2.0) * f / (2.0 * w1))
        w -= dw
        if f == 0 or abs(dw) <= 4.0 * math.ulp(w):
            break
    else:
        logger.warning(f"lambert_w0({x}) did not converge in {LAMBERT_W_MAXITER} steps")

    return w


def bisect(f: Callable[[float], float], bracket: Bracket, tol: float = BISECTION_TOL) -> float:
    """
    Locate the sign change of f inside a bracket.

    Args:
        f: Continuous scalar function
        bracket: Interval with f_lo * f_hi <= 0
        tol: Absolute interval width at termination

    Returns:
        Point inside the bracket within tol of the sign change

    Raises:
        DomainError: If tol <= 0
        BracketError: If the bracket holds no sign change
    """
    if not tol > 0:
        raise DomainError(f"bisection tolerance must be positive, got {tol}")
    if bracket.f_lo * bracket.f_hi > 0:
        raise BracketError("bracket does not enclose a sign change")

    if bracket.f_lo == 0:
        return bracket.lo
    if bracket.f_hi == 0:
        return bracket.hi

    return float(optimize.bisect(
        f, bracket.lo, bracket.hi,
        xtol=tol, rtol=RTOL_FLOOR, maxiter=BISECTION_MAXITER
    ))


def cubic_value(x: float, a: float, b: float, c: float) -> float:
    """Monic cubic x^3 + a x^2 + b x + c in Horner form."""
    return ((x + a) * x + b) * x + c


def cardano_root(a: float, b: float, c: float) -> Optional[float]:
    """
    Real root of a monic cubic by Cardano's formula.

    Returns None when the discriminant term is negative (three real roots),
    where the formula would need complex arithmetic. Cube roots of negative
    reals are the real cube roots.
    """
    q = a * b / 6.0 - c / 2.0 - a ** 3 / 27.0
    radicand = (b / 3.0 - a * a / 9.0) ** 3 + q * q
    if radicand < 0:
        return None

    p = math.sqrt(radicand)
    return float(np.cbrt(q + p) + np.cbrt(q - p) - a / 3.0)


def cubic_root_in_interval(
    a: float,
    b: float,
    c: float,
    lo: float,
    hi: float,
    force_bisection: bool = False,
    tol: float = CUBIC_ROOT_TOL
) -> float:
    """
    Unique root of x^3 + a x^2 + b x + c on (lo, hi).

    Tries Cardano's formula first and falls back to bisection when the
    formula does not apply, lands outside the interval, or leaves a large
    residual.

    Args:
        a, b, c: Coefficients of the monic cubic
        lo, hi: Interval with K(lo) < 0 < K(hi)
        force_bisection: Skip the Cardano fast path
        tol: Bisection width for the fallback

    Returns:
        The root inside [lo, hi]

    Raises:
        BracketError: If K(lo) < 0 < K(hi) does not hold
    """
    def k(x: float) -> float:
        return cubic_value(x, a, b, c)

    k_lo, k_hi = k(lo), k(hi)
    if not (k_lo < 0 < k_hi):
        raise BracketError(
            f"cubic needs K(lo) < 0 < K(hi), got K({lo:.6g})={k_lo:.6g}, K({hi:.6g})={k_hi:.6g}"
        )

    scale = max(1.0, abs(k_lo), abs(k_hi))
    root = None

    if not force_bisection:
        candidate = cardano_root(a, b, c)
        if candidate is None:
            logger.debug("Cardano radicand negative, falling back to bisection")
        elif not lo - CARDANO_SLACK <= candidate <= hi + CARDANO_SLACK:
            logger.debug(f"Cardano root {candidate:.12g} outside [{lo:.6g}, {hi:.6g}], falling back")
        else:
            slope = (3.0 * candidate + 2.0 * a) * candidate + b
            if slope != 0:
                polished = candidate - k(candidate) / slope
                if abs(k(polished)) <= abs(k(candidate)):
                    candidate = polished
            candidate = min(max(candidate, lo), hi)
            if abs(k(candidate)) <= CARDANO_SLACK * scale:
                root = candidate
            else:
                logger.debug(f"Cardano residual {k(candidate):.3g} too large, falling back")

    if root is None:
        root = bisect(k, Bracket(lo=lo, hi=hi, f_lo=k_lo, f_hi=k_hi), tol)
    elif logger.isEnabledFor(logging.DEBUG):
        check = bisect(k, Bracket(lo=lo, hi=hi, f_lo=k_lo, f_hi=k_hi), tol)
        logger.debug(f"Cardano root {root:.15g}, bisection {check:.15g}, gap {abs(root - check):.3g}")

    return root
