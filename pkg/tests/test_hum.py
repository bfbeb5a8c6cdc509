# External
import numpy as np
import pytest
from pydantic import ValidationError

# Project
from heattrack import ConfigError, IncompatibleGridError
from heattrack.grids import Signal, TimeGrid, SpaceGrid, signal_norm
from heattrack.hum import (
    DualConfig,
    TrackingOperators,
    eval_J,
    minimize_J,
    apply_Bstar,
    apply_gramian,
    continuous_Bstar,
    synthesize_and_verify,
)

XGRID = SpaceGrid(length=1.0, n_cells=50)
TGRID = TimeGrid(t_end=1.0, n_steps=200)


def _smooth(rng: np.random.Generator) -> Signal:
    """Random combination of sin(kπt), zero at both ends"""
    k = np.arange(1, 5)
    amplitudes = rng.standard_normal(k.size)
    return Signal.from_function(TGRID, lambda t: np.sin(np.pi * np.outer(t, k)) @ amplitudes)


def _rough(rng: np.random.Generator) -> Signal:
    return Signal(TGRID, rng.standard_normal(TGRID.n_steps + 1))


@pytest.fixture(scope="module")
def ops() -> TrackingOperators:
    return TrackingOperators(XGRID, TGRID)


@pytest.fixture(scope="module")
def manufactured(ops):  # type: ignore[no-untyped-def]
    v_star = Signal.from_function(TGRID, lambda t: np.sin(np.pi * t))
    return v_star, ops.observe(v_star)


def test_zero_dual_variable() -> None:
    zero = Signal.zeros(TGRID)
    np.testing.assert_array_equal(apply_Bstar(zero, XGRID).values, 0.0)
    np.testing.assert_array_equal(apply_gramian(zero, XGRID).values, 0.0)


def test_discrete_duality_is_exact(ops) -> None:  # type: ignore[no-untyped-def]
    rng = np.random.default_rng(1)
    for _ in range(10):
        f, v = _rough(rng), _rough(rng)
        lhs = ops.inner(v.values, ops.apply_Bstar(f).values)
        rhs = ops.inner(ops.observe(v).values, f.values)
        assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-12)


def test_continuous_adjoint_duality(ops) -> None:  # type: ignore[no-untyped-def]
    rng = np.random.default_rng(2)
    tol = 10 * max(TGRID.dt, XGRID.dx**2)
    for _ in range(10):
        f, v = _smooth(rng), _smooth(rng)
        lhs = ops.inner(v.values, continuous_Bstar(f, XGRID).values)
        rhs = ops.inner(ops.observe(v).values, f.values)
        assert abs(lhs - rhs) <= tol * signal_norm(v, "l2") * signal_norm(f, "l2")


def test_gramian_is_symmetric(ops) -> None:  # type: ignore[no-untyped-def]
    rng = np.random.default_rng(3)
    for _ in range(10):
        f, g = _rough(rng), _rough(rng)
        lhs = ops.inner(ops.apply_gramian(f).values, g.values)
        rhs = ops.inner(f.values, ops.apply_gramian(g).values)
        scale = np.sqrt(ops.inner(f.values, f.values) * ops.inner(g.values, g.values))
        assert abs(lhs - rhs) <= 1e-8 * scale


def test_gramian_is_positive(ops) -> None:  # type: ignore[no-untyped-def]
    rng = np.random.default_rng(4)
    for _ in range(5):
        f = _rough(rng)
        quadratic = ops.inner(ops.apply_gramian(f).values, f.values)
        control = ops.apply_Bstar(f).values
        assert quadratic >= 0
        assert quadratic == pytest.approx(ops.inner(control, control), rel=1e-10)


def test_nonzero_bump_is_observed() -> None:
    bump = Signal.from_function(
        TGRID, lambda t: np.where((t > 0.3) & (t < 0.6), np.sin(np.pi * (t - 0.3) / 0.3) ** 2, 0.0)
    )
    assert signal_norm(apply_Bstar(bump, XGRID), "l2") > 0


def test_eval_J_at_zero(manufactured) -> None:  # type: ignore[no-untyped-def]
    _, w = manufactured
    cfg = DualConfig(xgrid=XGRID, tgrid=TGRID, eps=0.1, smoothing_sigma=1e-8)
    value, gradient = eval_J(Signal.zeros(TGRID), w, cfg)
    assert value == pytest.approx(0.1 * 1e-8)
    np.testing.assert_allclose(gradient.values, -w.values)


def test_eval_J_gradient(manufactured) -> None:  # type: ignore[no-untyped-def]
    _, w = manufactured
    cfg = DualConfig(xgrid=XGRID, tgrid=TGRID, eps=0.1)
    ops = TrackingOperators(XGRID, TGRID)
    rng = np.random.default_rng(5)
    f = _smooth(rng)
    _, gradient = eval_J(f, w, cfg)

    h = 1e-3
    for _ in range(5):
        d = _smooth(rng).values
        plus, _ = eval_J(f.with_values(f.values + h * d), w, cfg)
        minus, _ = eval_J(f.with_values(f.values - h * d), w, cfg)
        assert (plus - minus) / (2 * h) == pytest.approx(ops.inner(gradient.values, d), rel=1e-5)


def test_eval_J_rejects_foreign_grid() -> None:
    cfg = DualConfig(xgrid=XGRID, tgrid=TGRID)
    other = Signal.zeros(TimeGrid(t_end=1.0, n_steps=100))
    with pytest.raises(IncompatibleGridError):
        eval_J(other, other, cfg)


def test_smoothing_sigma_is_bounded(ops, manufactured) -> None:  # type: ignore[no-untyped-def]
    _, w = manufactured
    limit = 1e-6 * np.sqrt(ops.inner(w.values, w.values))
    cfg = DualConfig(xgrid=XGRID, tgrid=TGRID, eps=0.1, smoothing_sigma=2.0 * limit)
    with pytest.raises(ConfigError, match="smoothing_sigma"):
        eval_J(Signal.zeros(TGRID), w, cfg)
    with pytest.raises(ConfigError, match="smoothing_sigma"):
        minimize_J(w, cfg)

    cfg = DualConfig(xgrid=XGRID, tgrid=TGRID, eps=0.1, smoothing_sigma=0.5 * limit, max_iters=2)
    assert minimize_J(w, cfg).smoothing_sigma == 0.5 * limit


@pytest.mark.parametrize("field, value", [("eps", -0.1), ("grad_tol", 0.0), ("max_iters", 0)])
def test_dual_config_ranges(field: str, value: float) -> None:
    with pytest.raises(ValidationError):
        DualConfig(xgrid=XGRID, tgrid=TGRID, **{field: value})


def test_zero_target_needs_no_iteration() -> None:
    state = minimize_J(Signal.zeros(TGRID), DualConfig(xgrid=XGRID, tgrid=TGRID))
    assert state.iterations == 0
    assert state.converged
    np.testing.assert_array_equal(state.f.values, 0.0)
    np.testing.assert_array_equal(state.Bstar_p.values, 0.0)


@pytest.mark.parametrize("eps", [0.0, 0.05])
def test_J_never_increases(manufactured, eps: float) -> None:  # type: ignore[no-untyped-def]
    _, w = manufactured
    state = minimize_J(w, DualConfig(xgrid=XGRID, tgrid=TGRID, eps=eps, max_iters=40))
    trace = np.array(state.J_trace)
    assert np.all(np.diff(trace) <= 1e-12 * np.maximum(1.0, np.abs(trace[1:])))
    assert state.converged or state.iterations == 40


def test_cg_returns_a_minimal_norm_control(manufactured) -> None:  # type: ignore[no-untyped-def]
    v_star, w = manufactured
    state = minimize_J(w, DualConfig(xgrid=XGRID, tgrid=TGRID, max_iters=50))
    assert signal_norm(state.Bstar_p, "l2") <= signal_norm(v_star, "l2") * (1 + 1e-3)
    assert state.cg_condition_estimate is not None
    assert state.cg_condition_estimate >= 1.0


def test_hum_closed_loop(manufactured) -> None:  # type: ignore[no-untyped-def]
    _, w = manufactured
    cfg = DualConfig(xgrid=XGRID, tgrid=TGRID, eps=0.05, grad_tol=5e-3, max_iters=500)
    state, report = synthesize_and_verify(w, cfg)
    assert report.iterations <= 500
    assert report.tracking_error_l2 <= 0.05 + 5e-3
    assert report.within_tolerance
    assert report.smoothing_sigma == state.smoothing_sigma


def test_hum_zero_target() -> None:
    _, report = synthesize_and_verify(Signal.zeros(TGRID), DualConfig(xgrid=XGRID, tgrid=TGRID))
    assert report.tracking_error_l2 == 0.0
    assert report.v_norm == 0.0
