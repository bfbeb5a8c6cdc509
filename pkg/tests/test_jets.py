# Internal
import math

# External
import numpy as np
import pytest
from scipy.special import binom, gammaln, factorial
from scipy.integrate import quad

# Project
from heattrack import OrderCapError, SingularJetError, InvalidOrderError
from heattrack.jets import (
    Jet,
    MollifiedTarget,
    jet_exp,
    bump_jet,
    bump_moment,
    jet_multiply,
    jet_power_neg,
    normalize_bump,
    bump_derivatives,
    bump_coefficients,
    gevrey_certificate,
    mollified_derivatives,
)


class _Function:
    def __init__(self, func) -> None:  # type: ignore[no-untyped-def]
        self._func = func

    def values(self, t: np.ndarray) -> np.ndarray:
        return np.asarray(self._func(np.asarray(t, dtype=float)), dtype=float)


RAMP = _Function(lambda t: t)
SINE = _Function(lambda t: np.sin(2 * np.pi * t))
ZERO = _Function(lambda t: 0.0 * t)


@pytest.fixture(scope="module")
def bump15():  # type: ignore[no-untyped-def]
    return normalize_bump(1.5)


def test_exp_of_zero_jet() -> None:
    result = jet_exp(Jet.constant(0.3, 0.0, 5))
    np.testing.assert_array_equal(result.coeffs, [1, 0, 0, 0, 0, 0])


def test_product_of_identities() -> None:
    t = Jet.variable(0.0, 4)
    np.testing.assert_array_equal(jet_multiply(t, t).coeffs, [0, 0, 1, 0, 0])


def test_exp_series() -> None:
    result = jet_exp(Jet.variable(0.0, 6))
    np.testing.assert_allclose(result.coeffs, 1 / factorial(np.arange(7)), rtol=1e-15)


def test_power_neg() -> None:
    base = Jet.variable(0.0, 8) + 1.0
    np.testing.assert_allclose(jet_power_neg(base, 0.5).coeffs, binom(-0.5, np.arange(9)))

    with pytest.raises(SingularJetError):
        jet_power_neg(Jet.variable(0.0, 4), 0.5)


def test_mismatched_jets() -> None:
    with pytest.raises(ValueError):
        jet_multiply(Jet.variable(0.0, 4), Jet.variable(0.0, 5))
    with pytest.raises(ValueError):
        Jet.variable(0.0, 2) + Jet.variable(1.0, 2)


def test_leibniz() -> None:
    rng = np.random.default_rng(7)
    k = np.arange(13)
    for center in rng.uniform(-1, 1, 10):
        f = Jet(center, np.exp(center) / factorial(k))
        g = Jet(center, np.exp(2 * center) * 2.0**k / factorial(k))
        expected = np.exp(3 * center) * 3.0**k / factorial(k)
        np.testing.assert_allclose((f * g).coeffs, expected, rtol=1e-12)


def test_bump_outside_support(bump15) -> None:  # type: ignore[no-untyped-def]
    for t in (-0.5, 0.0, 1e-13, 1.0 - 1e-13, 1.0, 1.7):
        assert not np.any(bump_jet(bump15, t, 10).coeffs)


def test_bump_symmetry_point() -> None:
    bump = normalize_bump(2.0)
    jet = bump_jet(bump, 0.5, 6)
    assert jet.coeffs[0] / bump.normalization == pytest.approx(math.exp(-4), rel=1e-14)
    assert abs(jet.coeffs[1]) <= 1e-14 * jet.coeffs[0]
    assert abs(jet.coeffs[3]) <= 1e-12 * jet.coeffs[0]


def test_bump_first_derivative_finite_difference() -> None:
    bump = normalize_bump(2.0)
    h = 1e-6
    fd = (bump.values(np.array(0.25 + h)) - bump.values(np.array(0.25 - h))) / (2 * h)
    assert bump_jet(bump, 0.25, 3).coeffs[1] == pytest.approx(float(fd), rel=1e-6)


def test_bump_derivative_consistency(bump15) -> None:  # type: ignore[no-untyped-def]
    rng = np.random.default_rng(11)
    points = rng.uniform(0.3, 0.7, 20)
    coeffs = bump_coefficients(bump15, points, 4)

    h1 = 1e-6
    fd1 = (bump15.values(points + h1) - bump15.values(points - h1)) / (2 * h1)
    np.testing.assert_allclose(
        coeffs[:, 1], fd1, rtol=1e-6, atol=1e-8 * np.max(np.abs(coeffs[:, 1]))
    )

    h2 = 1e-4
    fd2 = (bump15.values(points + h2) - 2 * bump15.values(points) + bump15.values(points - h2))
    fd2 /= h2**2
    np.testing.assert_allclose(
        2 * coeffs[:, 2], fd2, rtol=1e-4, atol=1e-6 * np.max(np.abs(2 * coeffs[:, 2]))
    )


def test_bump_matches_jet_composition(bump15) -> None:  # type: ignore[no-untyped-def]
    order = 20
    for center in (0.2, 0.35, 0.5, 0.61, 0.8):
        t = Jet.variable(center, order)
        shape = jet_multiply(t, -1.0 * t + 1.0)
        exponent = -1.0 * jet_power_neg(shape, bump15.exponent) + bump15.log_normalization
        composed = jet_exp(exponent)
        np.testing.assert_allclose(
            bump_jet(bump15, center, order).coeffs,
            composed.coeffs,
            rtol=1e-9,
            atol=1e-12 * np.max(np.abs(composed.coeffs)),
        )


def test_bump_high_order_finite(bump15) -> None:  # type: ignore[no-untyped-def]
    sigma = np.linspace(0.001, 0.999, 500)
    table = bump_derivatives(bump15, sigma, 64)
    assert np.all(np.isfinite(table))
    np.testing.assert_allclose(table[:, 0], bump15.values(sigma), rtol=1e-12, atol=1e-300)


def test_bump_log_weights(bump15) -> None:  # type: ignore[no-untyped-def]
    sigma = np.linspace(0.05, 0.95, 7)
    log_scale = np.linspace(0.0, 3.0, 9)
    np.testing.assert_allclose(
        bump_coefficients(bump15, sigma, 8, log_scale=log_scale),
        bump_coefficients(bump15, sigma, 8) * np.exp(log_scale),
        rtol=1e-12,
    )

    # Plain coefficients of this order overflow, the weighted ones do not
    k = np.arange(601.0)
    weighted = bump_coefficients(bump15, sigma, 600, log_scale=-gammaln(2 * k + 2))
    assert np.all(np.isfinite(weighted))

    with pytest.raises(OrderCapError):
        bump_coefficients(bump15, sigma, 8, log_scale=np.zeros(5))


def test_bump_order_cap(bump15) -> None:  # type: ignore[no-untyped-def]
    with pytest.raises(OrderCapError):
        bump_jet(bump15, 0.5, 65)
    assert bump_jet(bump15, 0.5, 100, n_max=100).order == 100


@pytest.mark.parametrize("r", [1.5, 2.0, 3.0])
def test_normalized_mass(r: float) -> None:
    bump = normalize_bump(r)
    mass, _ = quad(
        lambda t: float(bump.values(np.array(t))), 0, 1, epsabs=1e-14, epsrel=1e-13, limit=400
    )
    assert mass == pytest.approx(1.0, abs=1e-10)


def test_unnormalized_mass_bound() -> None:
    bump = normalize_bump(2.0)
    assert 0 < 1 / bump.normalization <= math.exp(-4)


def test_invalid_order() -> None:
    for r in (1.0, 0.5, float("nan")):
        with pytest.raises(InvalidOrderError):
            normalize_bump(r)


def test_mollified_zero(bump15) -> None:  # type: ignore[no-untyped-def]
    target = MollifiedTarget(ZERO, 0.1, bump15, t_end=1.0)
    for t in (0.0, 0.05, 0.5):
        assert not np.any(mollified_derivatives(target, t, 8))


def test_mollified_ramp(bump15) -> None:  # type: ignore[no-untyped-def]
    delta = 0.1
    target = MollifiedTarget(RAMP, delta, bump15, t_end=1.0)
    mu1 = bump_moment(bump15, 1)
    assert mu1 == pytest.approx(0.5, abs=1e-12)

    d = mollified_derivatives(target, 0.5, 6)
    assert d[0] == pytest.approx(0.5 - delta * mu1, abs=1e-12)
    assert d[1] == pytest.approx(1.0, abs=1e-10)
    np.testing.assert_allclose(d[2:4], 0.0, atol=1e-6)

    assert not np.any(mollified_derivatives(target, 0.0, 6))


def test_mollifier_finite_differences(bump15) -> None:  # type: ignore[no-untyped-def]
    target = MollifiedTarget(SINE, 0.1, bump15, t_end=1.0)
    h = 1e-4
    for t in (0.05, 0.4):
        d = target.derivatives(np.array([t - h, t, t + h]), 2)
        fd1 = (d[2, 0] - d[0, 0]) / (2 * h)
        fd2 = (d[2, 0] - 2 * d[1, 0] + d[0, 0]) / h**2
        assert d[1, 1] == pytest.approx(fd1, rel=1e-4)
        assert d[1, 2] == pytest.approx(fd2, rel=1e-3, abs=1e-3)


@pytest.mark.parametrize("delta", [0.05, 0.1, 0.2])
def test_mollification_error_bound(bump15, delta: float) -> None:  # type: ignore[no-untyped-def]
    target = MollifiedTarget(RAMP, delta, bump15, t_end=1.0)
    t = np.linspace(0, 1, 201)
    smoothed = target.values(t)
    assert smoothed[0] == 0.0
    assert np.max(np.abs(smoothed - t)) <= delta + 1e-9


def test_gevrey_certificate_exponential() -> None:
    t = np.linspace(0, 1, 11)
    derivs = np.repeat(np.exp(t)[:, None], 8, axis=1)
    c, r = gevrey_certificate(derivs, 0.0)
    assert r == pytest.approx(1.0, rel=1e-12)
    assert c == pytest.approx(math.e, rel=1e-12)

    assert gevrey_certificate(np.zeros((5, 8)), 1.5) == (0.0, 1.0)


def test_gevrey_certificate_scales_with_delta(bump15) -> None:  # type: ignore[no-untyped-def]
    fits = []
    for delta in (0.1, 0.2):
        target = MollifiedTarget(RAMP, delta, bump15, t_end=1.0)
        samples = delta * np.linspace(0.05, 0.95, 19)
        fits.append(gevrey_certificate(target.derivatives(samples, 8), 1.5))

    (c1, r1), (c2, r2) = fits
    assert r1 / r2 == pytest.approx(0.5, rel=1e-6)
    assert c1 / c2 == pytest.approx(0.5, rel=1e-6)
