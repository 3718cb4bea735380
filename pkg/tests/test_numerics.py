"""
Unit tests for special functions and root finders.
"""

import math

import numpy as np
import pytest
from pydantic import ValidationError
from src import numerics
from src.numerics import (
    Bracket,
    bisect,
    cardano_root,
    cubic_root_in_interval,
    cubic_value,
    gamma_fn,
    lambert_w0
)
from src.utils import BracketError, DomainError


def test_gamma_fn():
    """Test the gamma function at known points."""
    assert gamma_fn(5.0) == pytest.approx(24.0)
    assert gamma_fn(1.5) == pytest.approx(math.sqrt(math.pi) / 2.0)


def test_gamma_fn_domain():
    """Test non-positive arguments."""
    with pytest.raises(DomainError):
        gamma_fn(0.0)


@pytest.mark.parametrize("x", [1e-12, 1e-3, 0.5, 1.0, 10.0, 1e3, 1e8, 1e200])
def test_lambert_w0_identity(x):
    """Test log(w) + w = log(x) across magnitudes."""
    w = lambert_w0(x)
    assert w > 0
    assert math.log(w) + w == pytest.approx(math.log(x), rel=1e-12)


def test_lambert_w0_known_values():
    """Test W(0) = 0, W(e) = 1 and W(inf) = inf."""
    assert lambert_w0(0.0) == 0.0
    assert lambert_w0(math.e) == pytest.approx(1.0, abs=1e-15)
    assert math.isinf(lambert_w0(math.inf))


def test_lambert_w0_domain():
    """Test negative and NaN arguments."""
    with pytest.raises(DomainError):
        lambert_w0(-0.1)
    with pytest.raises(DomainError):
        lambert_w0(math.nan)


def test_bracket_around():
    """Test a bracket records both end values."""
    bracket = Bracket.around(lambda x: x - 1.0, 0.0, 3.0)
    assert bracket.f_lo == -1.0
    assert bracket.f_hi == 2.0


def test_bracket_without_sign_change():
    """Test same-sign ends are rejected."""
    with pytest.raises(BracketError):
        Bracket.around(lambda x: x * x + 1.0, -1.0, 1.0)


def test_bracket_needs_order():
    """Test lo must be below hi."""
    with pytest.raises(ValidationError):
        Bracket(lo=1.0, hi=0.0, f_lo=-1.0, f_hi=1.0)


def test_bisect_sqrt2():
    """Test bisection finds sqrt(2) within tolerance."""
    f = lambda x: x * x - 2.0
    root = bisect(f, Bracket.around(f, 0.0, 2.0), tol=1e-12)
    assert root == pytest.approx(math.sqrt(2.0), abs=1e-11)


def test_bisect_root_at_endpoint():
    """Test a zero at the bracket end is returned directly."""
    f = lambda x: x - 1.0
    assert bisect(f, Bracket.around(f, 1.0, 2.0)) == 1.0
    assert bisect(f, Bracket.around(f, 0.0, 1.0)) == 1.0


def test_bisect_infinite_end():
    """Test an infinite function value at an end still brackets."""
    f = lambda x: -math.inf if x <= 0 else math.log(x)
    root = bisect(f, Bracket(lo=0.0, hi=5.0, f_lo=-math.inf, f_hi=f(5.0)), tol=1e-12)
    assert root == pytest.approx(1.0, abs=1e-11)


def test_bisect_bad_tolerance():
    """Test a non-positive tolerance."""
    f = lambda x: x
    with pytest.raises(DomainError):
        bisect(f, Bracket.around(f, -1.0, 1.0), tol=0.0)


def test_cubic_value():
    """Test the Horner evaluation."""
    assert cubic_value(2.0, -6.0, 11.0, -6.0) == 0.0
    assert cubic_value(0.0, 1.0, 2.0, 3.0) == 3.0


def test_cardano_single_real_root():
    """Test (x - 2)(x^2 + 1) has its real root at 2."""
    assert cardano_root(-2.0, 1.0, -2.0) == pytest.approx(2.0, abs=1e-12)


def test_cardano_three_real_roots():
    """Test a negative radicand yields None."""
    assert cardano_root(-6.0, 11.0, -6.0) is None


def test_cubic_root_in_interval_cardano_and_bisection():
    """Test both solution paths agree."""
    fast = cubic_root_in_interval(-2.0, 1.0, -2.0, 1.0, 3.0)
    slow = cubic_root_in_interval(-2.0, 1.0, -2.0, 1.0, 3.0, force_bisection=True)

    assert fast == pytest.approx(2.0, abs=1e-12)
    assert slow == pytest.approx(2.0, abs=1e-12)


def test_cubic_root_in_interval_falls_back():
    """Test three real roots fall back to bisection on the right interval."""
    root = cubic_root_in_interval(-6.0, 11.0, -6.0, 2.5, 3.5)
    assert root == pytest.approx(3.0, abs=1e-12)


def test_cubic_root_in_interval_bad_bracket():
    """Test the sign requirement K(lo) < 0 < K(hi)."""
    with pytest.raises(BracketError):
        cubic_root_in_interval(-2.0, 1.0, -2.0, 3.0, 4.0)


def test_gamma_fn_recurrence():
    """Test Gamma(x + 1) = x Gamma(x) on (1, 2)."""
    for x in np.linspace(1.01, 1.99, 50):
        assert gamma_fn(x + 1.0) == pytest.approx(x * gamma_fn(x), rel=1e-12)


def test_lambert_w0_round_trip_without_warnings(monkeypatch):
    """Test W(x) exp(W(x)) = x over 16 decades with every call converging."""
    warnings = []
    monkeypatch.setattr(numerics.logger, "warning", lambda msg, *args, **kwargs: warnings.append(msg))

    for x in np.logspace(-8, 8, 1000):
        w = lambert_w0(float(x))
        assert abs(w * math.exp(w) - x) / max(1.0, x) <= 1e-12

    assert warnings == []


@pytest.mark.parametrize("x", [298.17735, 40235.05, 5.0e6])
def test_lambert_w0_converges_for_large_w(monkeypatch, x):
    """Test arguments with w well above 5 stop before the iteration cap."""
    warnings = []
    monkeypatch.setattr(numerics.logger, "warning", lambda msg, *args, **kwargs: warnings.append(msg))

    lambert_w0(x)
    assert warnings == []


def test_cubic_root_perfect_cube():
    """Test x^3 = 8 on (1, 3)."""
    assert cubic_root_in_interval(0.0, 0.0, -8.0, 1.0, 3.0) == pytest.approx(2.0, abs=1e-12)


def test_cubic_root_stationarity_example():
    """Test the stationarity cubic at omega = 0.03132, theta = 0.75, delta = 0.5, N = 8."""
    omega, theta, delta, n = 0.03132, 0.75, 0.5, 8
    l0 = delta / (n - 1)
    l1, l2 = 1.0 - l0, 1.0 + l0
    a = -l1 * omega
    b = -(delta / theta) * omega ** 2 - l0 * omega ** 2 - l2 * omega
    c = l2 * omega ** 2

    fast = cubic_root_in_interval(a, b, c, omega, 1.0)
    slow = cubic_root_in_interval(a, b, c, omega, 1.0, force_bisection=True)

    assert omega < fast < 1.0
    assert fast == pytest.approx(slow, abs=1e-9)


def test_cardano_matches_bisection_on_random_cubics():
    """Test both paths agree on 1000 cubics with one real root inside the bracket."""
    rng = np.random.default_rng(2024)
    worst = 0.0

    for _ in range(1000):
        # (x - r)(x^2 + p x + q) with a quadratic factor that never vanishes
        r = rng.uniform(-5.0, 5.0)
        p = rng.uniform(-3.0, 3.0)
        q = p * p / 4.0 + rng.uniform(0.1, 5.0)
        a, b, c = p - r, q - r * p, -r * q
        lo, hi = r - rng.uniform(0.05, 2.0), r + rng.uniform(0.05, 2.0)

        fast = cubic_root_in_interval(a, b, c, lo, hi)
        slow = cubic_root_in_interval(a, b, c, lo, hi, force_bisection=True)
        worst = max(worst, abs(fast - slow))

    assert worst <= 1e-8
