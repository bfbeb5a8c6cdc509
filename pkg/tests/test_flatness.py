# Internal
import math
from typing import Optional

# External
import numpy as np
import pytest
from scipy.special import gammaln

# Project
from heattrack import (
    OrderCapError,
    OutOfRangeError,
    TruncationWarning,
    DivergentSeriesError,
    IncompatibleTargetError,
)
from heattrack.jets import MollifiedTarget, normalize_bump
from heattrack.grids import Signal, TimeGrid, SpaceGrid, flux_at_left
from heattrack.solvers import heat_residual
from heattrack._constants import N_MAX_CAP
from heattrack.flatness import (
    FlatTarget,
    RampTarget,
    SineTarget,
    ZeroTarget,
    BumpIntegralTarget,
    flat_control,
    series_state,
    closed_loop_flux,
    cost_chain_check,
    make_flat_target,
    with_cost_constant,
    approximate_tracking,
    calibrate_cost_constant,
)


class _Combination:
    """a·first + b·second, for the linearity check"""

    def __init__(self, a: float, first: BumpIntegralTarget, b: float, second: BumpIntegralTarget):
        self.a, self.first, self.b, self.second = a, first, b, second

    def values(self, t: np.ndarray) -> np.ndarray:
        return self.a * self.first.values(t) + self.b * self.second.values(t)

    def coefficients(
        self, t: np.ndarray, order: int, *, log_scale: Optional[np.ndarray] = None
    ) -> np.ndarray:
        first = self.first.coefficients(t, order, log_scale=log_scale)
        return self.a * first + self.b * self.second.coefficients(t, order, log_scale=log_scale)


@pytest.fixture(scope="module")
def bump15():  # type: ignore[no-untyped-def]
    return normalize_bump(1.5)


@pytest.fixture(scope="module")
def smooth_step(bump15):  # type: ignore[no-untyped-def]
    return FlatTarget(BumpIntegralTarget(bump15, onset=0.1, width=0.6), 1.5)


def test_zero_target_gives_zero_control() -> None:
    series = flat_control(FlatTarget(ZeroTarget(), 1.5), 1.0, TimeGrid(t_end=1.0, n_steps=50))
    np.testing.assert_array_equal(series.control.values, 0.0)
    assert not series.truncated


def test_ramp_control_is_a_finite_sum() -> None:
    tgrid = TimeGrid(t_end=1.0, n_steps=10)
    series = flat_control(FlatTarget(RampTarget(), 1.0, check_flatness=False), 2.0, tgrid)
    np.testing.assert_allclose(series.control.values, 2.0 * tgrid.nodes + 8.0 / 6.0, rtol=1e-14)
    assert not series.truncated


def test_ramp_state_solves_the_discrete_equation() -> None:
    xgrid = SpaceGrid(length=1.0, n_cells=20)
    tgrid = TimeGrid(t_end=1.0, n_steps=10)
    field = series_state(FlatTarget(RampTarget(), 1.0, check_flatness=False), xgrid, tgrid)
    x, t = xgrid.nodes[None, :], tgrid.nodes[:, None]
    np.testing.assert_allclose(field.values, x * t + x**3 / 6.0, atol=1e-14)
    assert np.max(np.abs(heat_residual(field))) < 1e-11


def test_divergent_order_is_rejected() -> None:
    with pytest.raises(DivergentSeriesError):
        FlatTarget(ZeroTarget(), 2.0)


@pytest.mark.parametrize("target", [RampTarget(), SineTarget()])
def test_non_flat_target_is_rejected(target) -> None:  # type: ignore[no-untyped-def]
    with pytest.raises(IncompatibleTargetError):
        FlatTarget(target, 1.5)


def test_series_state_traces(smooth_step) -> None:  # type: ignore[no-untyped-def]
    xgrid = SpaceGrid(length=1.0, n_cells=100)
    tgrid = TimeGrid(t_end=1.0, n_steps=200)
    field = series_state(smooth_step, xgrid, tgrid)
    np.testing.assert_array_equal(field.values[:, 0], 0.0)
    np.testing.assert_allclose(field.values[0], 0.0, atol=1e-12)

    np.testing.assert_allclose(
        flux_at_left(field).values, smooth_step.values(tgrid.nodes), atol=1e-6
    )


def test_series_state_residual_converges(smooth_step) -> None:  # type: ignore[no-untyped-def]
    residuals = [
        float(np.max(np.abs(heat_residual(series_state(smooth_step, xgrid, tgrid)))))
        for xgrid, tgrid in (
            (SpaceGrid(length=1.0, n_cells=n), TimeGrid(t_end=1.0, n_steps=50 * n))
            for n in (20, 40, 80)
        )
    ]
    orders = np.log2(np.array(residuals[:-1]) / np.array(residuals[1:]))
    assert np.all(orders >= 1.8)


def test_control_is_linear_in_the_target(bump15) -> None:  # type: ignore[no-untyped-def]
    tgrid = TimeGrid(t_end=1.0, n_steps=100)
    first = BumpIntegralTarget(bump15, onset=0.1, width=0.5)
    second = BumpIntegralTarget(bump15, onset=0.3, width=0.4, amplitude=2.0)

    def control(source) -> np.ndarray:  # type: ignore[no-untyped-def]
        return flat_control(FlatTarget(source, 1.5), 1.0, tgrid).control.values

    combined = control(_Combination(0.7, first, -1.3, second))
    expected = 0.7 * control(first) - 1.3 * control(second)
    np.testing.assert_allclose(combined, expected, atol=1e-9)


def test_closed_loop_tracks_a_flat_target(smooth_step) -> None:  # type: ignore[no-untyped-def]
    tgrid = TimeGrid(t_end=1.0, n_steps=1000)
    series = flat_control(smooth_step, 1.0, tgrid)
    flux = closed_loop_flux(series.control, SpaceGrid(length=1.0, n_cells=100))
    np.testing.assert_allclose(flux.values, smooth_step.values(tgrid.nodes), atol=5e-3)


def test_make_flat_target_delta() -> None:
    choice = make_flat_target(RampTarget(), 0.5, 0.1, t_end=1.0)
    assert choice.delta == pytest.approx(0.1)
    assert not choice.clamped
    assert choice.target.gevrey_order == pytest.approx(1.5)


def test_make_flat_target_clamps_delta() -> None:
    choice = make_flat_target(RampTarget(), 0.5, 2.0, t_end=1.0)
    assert choice.delta == 1.0
    assert choice.clamped


def test_make_flat_target_zero() -> None:
    choice = make_flat_target(ZeroTarget(), 0.5, 0.1, t_end=1.0)
    assert choice.delta is None
    assert isinstance(choice.target.source, ZeroTarget)


def test_make_flat_target_rejects_nonzero_start() -> None:
    tgrid = TimeGrid(t_end=1.0, n_steps=10)
    with pytest.raises(IncompatibleTargetError):
        make_flat_target(Signal(tgrid, np.ones(11)), 0.5, 0.1)


@pytest.mark.parametrize("s, eps", [(0.0, 0.1), (1.0, 0.1), (0.5, 0.0), (0.5, -1.0)])
def test_make_flat_target_ranges(s: float, eps: float) -> None:
    with pytest.raises(OutOfRangeError):
        make_flat_target(RampTarget(), s, eps, t_end=1.0)


def test_mollified_ramp_is_shifted_by_half_delta(bump15) -> None:  # type: ignore[no-untyped-def]
    delta = 0.1
    mollified = MollifiedTarget(RampTarget(), delta, bump15, t_end=1.0)
    t = np.linspace(delta, 1.0, 19)
    np.testing.assert_allclose(mollified.values(t), t - 0.5 * delta, rtol=1e-10)


@pytest.mark.parametrize("r", [1.5, 1.8])
@pytest.mark.parametrize("delta", [0.05, 0.1, 0.2])
def test_mollification_error_bound(r: float, delta: float) -> None:
    bump = normalize_bump(r)
    t = np.linspace(0.0, 1.0, 201)
    for target in (RampTarget(), BumpIntegralTarget(bump, onset=0.2, width=0.5)):
        mollified = MollifiedTarget(target, delta, bump, t_end=1.0)
        error = np.max(np.abs(mollified.values(t) - target.values(t)))
        assert error <= delta * target.w1inf_norm(1.0) + 1e-9


def test_substeps_reduce_closed_loop_error(smooth_step) -> None:  # type: ignore[no-untyped-def]
    tgrid = TimeGrid(t_end=1.0, n_steps=100)
    xgrid = SpaceGrid(length=1.0, n_cells=200)
    series = flat_control(smooth_step, 1.0, tgrid)
    target = smooth_step.values(tgrid.nodes)

    coarse, fine = (
        np.max(np.abs(closed_loop_flux(series.control, xgrid, substeps=k).values - target))
        for k in (1, 8)
    )
    assert fine < 0.25 * coarse


def test_approximate_tracking_closed_loop() -> None:
    tgrid = TimeGrid(t_end=1.0, n_steps=1000)
    series, _ = approximate_tracking(RampTarget(), 0.5, 0.1, 1.0, tgrid)
    xgrid = SpaceGrid(length=1.0, n_cells=200)
    flux = closed_loop_flux(series.control, xgrid, substeps=16).values

    mollified = series.target.values(tgrid.nodes)
    assert np.max(np.abs(flux - mollified)) <= 5e-3
    assert np.max(np.abs(flux - tgrid.nodes)) <= 0.1 + 5e-3


def test_cost_grows_as_eps_shrinks() -> None:
    tgrid = TimeGrid(t_end=1.0, n_steps=200)
    reports = [
        approximate_tracking(RampTarget(), 0.5, eps, 1.0, tgrid)[1]
        for eps in (0.2, 0.1, 0.05, 0.025)
    ]

    for report in reports:
        assert not report.truncated
        assert report.bound_holds
        assert report.fitted_C > 0
    assert reports[-1].terms_used_max > 64
    sup_norms = [report.v_sup_norm for report in reports[:3]]
    assert sup_norms == sorted(sup_norms)


def test_series_order_grows_past_n_max() -> None:
    tgrid = TimeGrid(t_end=1.0, n_steps=100)
    short = make_flat_target(RampTarget(), 0.5, 0.1, t_end=1.0, n_max=4)
    series = flat_control(short.target, 1.0, tgrid)
    assert not series.truncated
    assert np.max(series.terms_used) > 5

    full = make_flat_target(RampTarget(), 0.5, 0.1, t_end=1.0)
    reference = flat_control(full.target, 1.0, tgrid)
    np.testing.assert_allclose(
        series.control.values, reference.control.values, rtol=1e-8, atol=1e-8
    )


def test_truncated_series_fails_the_bound() -> None:
    tgrid = TimeGrid(t_end=1.0, n_steps=100)
    with pytest.warns(TruncationWarning):
        series, report = approximate_tracking(
            RampTarget(), 0.5, 0.025, 1.0, tgrid, n_max=8, max_order=16
        )
    assert series.truncated
    assert report.truncated
    assert not report.bound_holds
    assert not with_cost_constant(report, 10.0 * report.fitted_C).bound_holds


def test_series_order_limits() -> None:
    with pytest.raises(OrderCapError):
        FlatTarget(ZeroTarget(), 1.5, n_max=32, max_order=16)
    with pytest.raises(OrderCapError):
        FlatTarget(ZeroTarget(), 1.5, max_order=N_MAX_CAP + 1)


def test_series_carries_its_flat_target() -> None:
    tgrid = TimeGrid(t_end=1.0, n_steps=50)
    series, report = approximate_tracking(RampTarget(), 0.5, 0.1, 1.0, tgrid)
    choice = make_flat_target(RampTarget(), 0.5, 0.1, t_end=1.0)
    assert isinstance(series.target.source, MollifiedTarget)
    assert series.target.source.delta == report.delta
    np.testing.assert_allclose(
        series.target.values(tgrid.nodes), choice.target.values(tgrid.nodes), atol=1e-15
    )


def test_zero_target_cost_report() -> None:
    tgrid = TimeGrid(t_end=1.0, n_steps=20)
    series, report = approximate_tracking(ZeroTarget(), 0.5, 0.1, 1.0, tgrid)
    assert report.delta == 0.0
    assert report.v_sup_norm == 0.0
    assert report.bound_holds
    np.testing.assert_array_equal(series.control.values, 0.0)


def test_common_cost_constant() -> None:
    tgrid = TimeGrid(t_end=1.0, n_steps=200)
    _, report = approximate_tracking(RampTarget(), 0.5, 0.1, 1.0, tgrid)
    larger = with_cost_constant(report, 2.0 * report.fitted_C)

    assert larger.fitted_C == pytest.approx(2.0 * report.fitted_C)
    assert larger.log_bound_value > report.log_bound_value
    assert larger.bound_holds
    assert larger.v_sup_norm == report.v_sup_norm
    assert with_cost_constant(report, report.fitted_C).log_bound_value == pytest.approx(
        report.log_bound_value, rel=1e-14
    )

    with pytest.raises(OutOfRangeError):
        with_cost_constant(report, -1.0)


def test_calibration_recovers_the_constant() -> None:
    C, delta, s, norm = 0.7, 0.1, 0.5, 2.0
    i = np.arange(11, dtype=float)
    row = np.exp(i * math.log(C / delta) + (2.0 - s) * gammaln(i + 1)) * norm
    table = np.vstack([row, 0.5 * row])
    assert calibrate_cost_constant(table, delta, s, 1.0, norm) == pytest.approx(C, rel=1e-12)


def test_calibration_of_vanishing_derivatives() -> None:
    assert calibrate_cost_constant(np.zeros((5, 8)), 0.1, 0.5, 1.0, 1.0) == 0.0


@pytest.mark.parametrize("length", [0.5, 1.0, 2.0])
def test_cost_chain_holds(length: float) -> None:
    assert all(cost_chain_check(2.0, 0.1, 0.5, length, 50))


def test_cost_chain_range() -> None:
    with pytest.raises(OutOfRangeError):
        cost_chain_check(1.0, 0.1, 0.5, 1.0, 0)
