# Internal
import math
from decimal import Decimal, localcontext

# External
import numpy as np
import pytest

# Project
from heattrack import OutOfRangeError, OutOfDomainError
from heattrack.special import (
    gs_eval,
    gs_log_terms,
    gs_lower_bound,
    gs_upper_bound,
    gs_log_derivative,
    fit_upper_constant,
    log_gs_lower_bound,
    log_gs_upper_bound,
    gs_closed_bound_s_ge_1,
    gs_derivative_ratio_check,
    factorial_inequality_check,
)


def test_gs_at_zero() -> None:
    for s in (0.1, 0.5, 1.0):
        result = gs_eval(s, 0.0)
        assert result.value == 1.0
        assert result.terms_used == 1


@pytest.mark.parametrize("x", [1.0, 5.0, 10.0])
def test_g1_is_exponential(x: float) -> None:
    result = gs_eval(1.0, x)
    assert result.value == pytest.approx(math.exp(x), rel=1e-12)
    assert result.tail_bound <= 1e-14 * result.value


def test_g_half_at_one() -> None:
    with localcontext() as ctx:
        ctx.prec = 50
        expected = sum(Decimal(1) / Decimal(math.factorial(i)).sqrt() for i in range(200))
    assert gs_eval(0.5, 1.0).value == pytest.approx(float(expected), rel=1e-14)


def test_gs_domain() -> None:
    for s, x in ((0.0, 1.0), (1.5, 1.0), (0.5, -1.0), (0.5, math.inf)):
        with pytest.raises(OutOfRangeError):
            gs_eval(s, x)


def test_upper_bound_arithmetic() -> None:
    assert gs_upper_bound(0.5, 0.0, 3.0) == pytest.approx(3.0, rel=1e-15)
    assert gs_upper_bound(0.5, 4.0, 1.0) == pytest.approx(math.exp(16.0), rel=1e-14)


def test_lower_bound_examples() -> None:
    assert gs_lower_bound(0.5, 0.0) == 1.0
    assert gs_lower_bound(0.5, 1.0) == pytest.approx(1.6487212707, rel=1e-10)
    assert gs_lower_bound(0.5, 1.0) <= gs_eval(0.5, 1.0).value
    assert gs_lower_bound(0.8, 10.0) <= gs_eval(0.8, 10.0).value


@pytest.mark.parametrize("s", [0.3, 0.5, 0.8])
def test_sandwich(s: float) -> None:
    xs = np.linspace(0.0, 30.0, 300)
    c = fit_upper_constant(s, xs)
    assert c >= 1.0
    for x in xs:
        log_value = gs_eval(s, float(x)).log_value
        assert log_gs_lower_bound(s, float(x)) <= log_value + 1e-12
        assert log_value <= log_gs_upper_bound(s, float(x), c)


def test_closed_bound_for_large_s() -> None:
    for x in (0.0, 1.0, 7.5):
        assert gs_closed_bound_s_ge_1(1.0, x) == pytest.approx(math.exp(x), rel=1e-15)

    partial = math.fsum(4.0**i / math.factorial(i) ** 2 for i in range(60))
    assert partial <= gs_closed_bound_s_ge_1(2.0, 4.0)
    assert gs_closed_bound_s_ge_1(2.0, 4.0) == pytest.approx(math.exp(4.0), rel=1e-15)

    with pytest.raises(OutOfRangeError):
        gs_closed_bound_s_ge_1(0.5, 1.0)


@pytest.mark.parametrize("s, x", [(0.5, 10.0), (0.3, 4.0), (0.8, 20.0), (1.0, 50.0)])
def test_term_peak_location(s: float, x: float) -> None:
    terms = gs_log_terms(s, x, np.arange(20000))
    assert abs(int(np.argmax(terms)) - x ** (1.0 / s)) <= 2


def test_monotone_and_log_convex() -> None:
    xs = np.linspace(0.0, 20.0, 201)
    for s in (0.3, 0.6, 1.0):
        logs = np.array([gs_eval(s, float(x)).log_value for x in xs])
        assert np.all(np.diff(logs) > 0)
        assert np.all(np.diff(logs, 2) >= -1e-9)


def test_factorial_inequality() -> None:
    assert math.comb(2, 1) == 2
    assert math.comb(10, 5) == 252 >= 2**5
    assert factorial_inequality_check(1)
    assert factorial_inequality_check(200)
    with pytest.raises(OutOfRangeError):
        factorial_inequality_check(0)


def test_derivative_matches_finite_difference() -> None:
    h = 1e-5
    for s in (0.5, 0.8):
        fd = (gs_eval(s, 1.0 + h).value - gs_eval(s, 1.0 - h).value) / (2 * h)
        assert math.exp(gs_log_derivative(s, 1.0)) == pytest.approx(fd, rel=1e-8)


def test_derivative_ratio() -> None:
    ratio = gs_derivative_ratio_check(0.5, np.arange(1.0, 31.0))
    assert math.isfinite(ratio)
    assert ratio > 0

    with pytest.raises(OutOfDomainError):
        gs_derivative_ratio_check(0.5, [0.5, 2.0])
    with pytest.raises(OutOfRangeError):
        gs_derivative_ratio_check(1.0, [2.0])
