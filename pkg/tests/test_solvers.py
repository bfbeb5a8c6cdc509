# External
import numpy as np
import pytest
from pydantic import ValidationError

# Project
from heattrack import StabilityError, OutOfRangeError, CompatibilityWarning
from heattrack.grids import Signal, TimeGrid, HeatField, SpaceGrid, SymmetricTimeGrid
from heattrack.solvers import (
    HeatProblem,
    WaveProblem,
    AdjointProblem,
    CrankNicolsonStepper,
    solve_wave,
    wave_energy,
    flux_at_right,
    closed_loop_flux,
    solve_heat_forward,
    solve_heat_adjoint,
)


def _manufactured_error(n_cells: int, n_steps: int) -> float:
    xgrid = SpaceGrid(length=1.0, n_cells=n_cells)
    tgrid = TimeGrid(t_end=0.5, n_steps=n_steps)
    field = solve_heat_forward(
        HeatProblem(
            xgrid=xgrid,
            tgrid=tgrid,
            left_bc=Signal.zeros(tgrid),
            right_bc=Signal.zeros(tgrid),
            initial=np.sin(np.pi * xgrid.nodes),
        )
    )
    exact = np.exp(-np.pi**2 * tgrid.nodes)[:, None] * np.sin(np.pi * xgrid.nodes)[None, :]
    return float(np.max(np.abs(field.values - exact)))


def _bump(x: np.ndarray, center: float = 0.5, width: float = 0.2) -> np.ndarray:
    return np.maximum(0.0, 1.0 - ((x - center) / width) ** 2) ** 3


def test_zero_heat() -> None:
    xgrid = SpaceGrid(length=1.0, n_cells=8)
    control = Signal.zeros(TimeGrid(t_end=1, n_steps=10))
    field = solve_heat_forward(HeatProblem.tracking(xgrid, control))
    assert not np.any(field.values)


def test_steady_ramp() -> None:
    xgrid = SpaceGrid(length=2.0, n_cells=16)
    tgrid = TimeGrid(t_end=1.0, n_steps=20)
    field = solve_heat_forward(
        HeatProblem(
            xgrid=xgrid,
            tgrid=tgrid,
            left_bc=Signal.zeros(tgrid),
            right_bc=Signal(tgrid, np.full(21, 2.0)),
            initial=xgrid.nodes,
        )
    )
    np.testing.assert_allclose(field.values, np.tile(xgrid.nodes, (21, 1)), atol=1e-13)


def test_convergence_in_space() -> None:
    errors = [_manufactured_error(n, 4000) for n in (10, 20, 40)]
    orders = np.log2(np.array(errors[:-1]) / np.array(errors[1:]))
    assert np.all(orders >= 1.8)


def test_convergence_in_time() -> None:
    errors = [_manufactured_error(400, n) for n in (80, 160, 320)]
    orders = np.log2(np.array(errors[:-1]) / np.array(errors[1:]))
    assert np.all(orders >= 1.8)


def test_maximum_principle() -> None:
    rng = np.random.default_rng(3)
    xgrid = SpaceGrid(length=1.0, n_cells=20)
    tgrid = TimeGrid(t_end=0.1, n_steps=50)
    assert tgrid.dt / xgrid.dx**2 <= 1.0
    for _ in range(5):
        initial = rng.uniform(0, 1, 21)
        left, right = rng.uniform(0, 1, 51), rng.uniform(0, 1, 51)
        left[0], right[0] = initial[0], initial[-1]
        field = solve_heat_forward(
            HeatProblem(
                xgrid=xgrid,
                tgrid=tgrid,
                left_bc=Signal(tgrid, left),
                right_bc=Signal(tgrid, right),
                initial=initial,
            )
        )
        assert field.values.min() >= -10 * np.finfo(float).eps


def test_corner_mismatch_warns() -> None:
    xgrid = SpaceGrid(length=1.0, n_cells=4)
    tgrid = TimeGrid(t_end=1.0, n_steps=4)
    with pytest.warns(CompatibilityWarning):
        HeatProblem(
            xgrid=xgrid,
            tgrid=tgrid,
            left_bc=Signal.zeros(tgrid),
            right_bc=Signal(tgrid, np.ones(5)),
            initial=np.zeros(5),
        )


def test_invalid_problems() -> None:
    xgrid = SpaceGrid(length=1.0, n_cells=4)
    tgrid = TimeGrid(t_end=1.0, n_steps=4)
    with pytest.raises(ValidationError):
        HeatProblem(
            xgrid=xgrid,
            tgrid=tgrid,
            left_bc=Signal.zeros(tgrid),
            right_bc=Signal.zeros(tgrid),
            initial=[0.0, np.nan, 0.0, 0.0, 0.0],
        )
    with pytest.raises(ValidationError):
        HeatProblem(
            xgrid=xgrid,
            tgrid=tgrid,
            left_bc=Signal.zeros(TimeGrid(t_end=1.0, n_steps=8)),
            right_bc=Signal.zeros(tgrid),
            initial=np.zeros(5),
        )


def test_adjoint_zero() -> None:
    xgrid = SpaceGrid(length=1.0, n_cells=8)
    tgrid = TimeGrid(t_end=1.0, n_steps=10)
    problem = AdjointProblem(xgrid=xgrid, tgrid=tgrid, left_bc=Signal.zeros(tgrid))
    field = solve_heat_adjoint(problem)
    assert not np.any(field.values)


def test_adjoint_time_reversal() -> None:
    xgrid = SpaceGrid(length=1.0, n_cells=16)
    tgrid = TimeGrid(t_end=1.0, n_steps=40)
    f = Signal.from_function(tgrid, lambda t: np.sin(np.pi * t) ** 2)

    adjoint = solve_heat_adjoint(AdjointProblem(xgrid=xgrid, tgrid=tgrid, left_bc=f))
    forward = solve_heat_forward(
        HeatProblem(
            xgrid=xgrid,
            tgrid=tgrid,
            left_bc=Signal(tgrid, f.values[::-1]),
            right_bc=Signal.zeros(tgrid),
            initial=np.zeros(17),
        )
    )
    np.testing.assert_array_equal(adjoint.values, forward.values[::-1])
    np.testing.assert_allclose(adjoint.at_time(-1), 0.0, atol=1e-14)


def test_flux_at_right_mirror() -> None:
    xgrid = SpaceGrid(length=1.5, n_cells=6)
    tgrid = TimeGrid(t_end=1.0, n_steps=2)

    x = xgrid.nodes
    field = HeatField(tgrid, xgrid, np.tile(x**4 / 4 + x, (3, 1)))
    np.testing.assert_allclose(flux_at_right(field).values, 1.5**3 + 1.0, rtol=1e-12)


def test_tracking_flux_matches_solver() -> None:
    xgrid = SpaceGrid(length=1.0, n_cells=20)
    control = Signal.from_function(TimeGrid(t_end=1.0, n_steps=50), lambda t: t**2)
    stepper = CrankNicolsonStepper(xgrid, control.grid)
    np.testing.assert_allclose(
        stepper.tracking_flux(control.values),
        closed_loop_flux(control, xgrid).values,
        rtol=1e-14,
        atol=1e-14,
    )


def test_closed_loop_substeps() -> None:
    xgrid = SpaceGrid(length=1.0, n_cells=20)
    control = Signal.from_function(TimeGrid(t_end=1.0, n_steps=50), lambda t: t**2)
    refined = closed_loop_flux(control, xgrid, substeps=4)
    assert refined.grid == control.grid

    # The spline reproduces t² exactly, so this is the flux of a 200-step run
    fine = Signal.from_function(TimeGrid(t_end=1.0, n_steps=200), lambda t: t**2)
    np.testing.assert_allclose(
        refined.values, closed_loop_flux(fine, xgrid).values[::4], rtol=1e-10, atol=1e-12
    )

    with pytest.raises(OutOfRangeError):
        closed_loop_flux(control, xgrid, substeps=0)


@pytest.mark.parametrize("n_cells", [4, 5, 12])
def test_tracking_flux_transpose(n_cells: int) -> None:
    rng = np.random.default_rng(n_cells)
    xgrid = SpaceGrid(length=1.0, n_cells=n_cells)
    tgrid = TimeGrid(t_end=0.5, n_steps=30)
    stepper = CrankNicolsonStepper(xgrid, tgrid)
    for _ in range(5):
        v, g = rng.normal(size=31), rng.normal(size=31)
        lhs = g @ stepper.tracking_flux(v)
        rhs = v @ stepper.tracking_flux_transpose(g)
        assert lhs == pytest.approx(rhs, rel=1e-11, abs=1e-11)


def test_zero_wave() -> None:
    xgrid = SpaceGrid(length=1.0, n_cells=10)
    sgrid = SymmetricTimeGrid(half_width=0.5, n_half=10)
    problem = WaveProblem(xgrid=xgrid, sgrid=sgrid, control=Signal.zeros(sgrid), z0=np.zeros(11))
    field = solve_wave(problem)
    assert not np.any(field.values)


def test_steady_wave() -> None:
    xgrid = SpaceGrid(length=2.0, n_cells=10)
    sgrid = SymmetricTimeGrid(half_width=1.0, n_half=8)
    field = solve_wave(
        WaveProblem(
            xgrid=xgrid, sgrid=sgrid, control=Signal(sgrid, np.full(17, 2.0)), z0=xgrid.nodes
        )
    )
    np.testing.assert_allclose(field.values, np.tile(xgrid.nodes, (17, 1)), atol=1e-13)


def test_dalembert() -> None:
    xgrid = SpaceGrid(length=1.0, n_cells=100)
    sgrid = SymmetricTimeGrid(half_width=0.25, n_half=25)
    x = xgrid.nodes
    field = solve_wave(
        WaveProblem(xgrid=xgrid, sgrid=sgrid, control=Signal.zeros(sgrid), z0=_bump(x))
    )
    for index, s in enumerate(sgrid.nodes):
        expected = 0.5 * (_bump(x - s) + _bump(x + s))
        np.testing.assert_allclose(field.at_time(index), expected, atol=1e-12)


def test_wave_energy_conservation() -> None:
    xgrid = SpaceGrid(length=1.0, n_cells=80)
    sgrid = SymmetricTimeGrid.covering(3.0, 0.5 * xgrid.dx)
    field = solve_wave(
        WaveProblem(xgrid=xgrid, sgrid=sgrid, control=Signal.zeros(sgrid), z0=_bump(xgrid.nodes))
    )
    energy = wave_energy(field)
    assert np.max(np.abs(energy - energy[0])) <= 1e-10 * energy[0]


def test_wave_cfl() -> None:
    xgrid = SpaceGrid(length=1.0, n_cells=10)
    sgrid = SymmetricTimeGrid(half_width=1.0, n_half=5)
    problem = WaveProblem(xgrid=xgrid, sgrid=sgrid, control=Signal.zeros(sgrid), z0=np.zeros(11))
    with pytest.raises(StabilityError):
        solve_wave(problem)
