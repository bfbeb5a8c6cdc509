# Internal
from pathlib import Path

# External
import numpy as np
import pytest

# Project
from heattrack import DataFileError, InvalidSignalError, IncompatibleGridError
from heattrack.grids import (
    Signal,
    TimeGrid,
    HeatField,
    SpaceGrid,
    FLUX_STENCIL,
    SymmetricTimeGrid,
    resample,
    signal_norm,
    flux_at_left,
    read_signal_csv,
    write_field_csv,
    write_signal_csv,
)


def _field(tgrid: TimeGrid, xgrid: SpaceGrid, func) -> HeatField:  # type: ignore[no-untyped-def]
    t, x = np.meshgrid(tgrid.nodes, xgrid.nodes, indexing="ij")
    return HeatField(tgrid, xgrid, func(t, x))


def test_grid_invariants() -> None:
    grid = TimeGrid(t_end=1.5, n_steps=30)
    assert grid.dt * grid.n_steps == pytest.approx(1.5, rel=1e-15)
    assert grid.nodes[-1] == 1.5

    with pytest.raises(ValueError):
        TimeGrid(t_end=0.0, n_steps=10)
    with pytest.raises(ValueError):
        TimeGrid(t_end=1.0, n_steps=1)
    with pytest.raises(ValueError):
        SpaceGrid(length=1.0, n_cells=3)


def test_symmetric_grid() -> None:
    grid = SymmetricTimeGrid(half_width=2.0, n_half=10)
    nodes = grid.nodes
    assert nodes[0] == -2.0 and nodes[-1] == 2.0 and nodes[10] == 0.0
    assert grid.n_steps == 20 and grid.dt == pytest.approx(0.2)

    covering = SymmetricTimeGrid.covering(1.05, 0.1)
    assert covering.half_width >= 1.05
    assert covering.dt == pytest.approx(0.1)


def test_signal_rejects_bad_values() -> None:
    grid = TimeGrid(t_end=1.0, n_steps=4)
    with pytest.raises(InvalidSignalError):
        Signal(grid, [0.0, 1.0, np.nan, 0.0, 0.0])
    with pytest.raises(InvalidSignalError):
        Signal(grid, [0.0, 1.0])

    signal = Signal.zeros(grid)
    with pytest.raises(ValueError):
        signal.values[0] = 1.0


def test_norms_zero_signal() -> None:
    signal = Signal.zeros(TimeGrid(t_end=1.0, n_steps=10))
    for kind in ("sup", "l2", "w1inf"):
        assert signal_norm(signal, kind) == 0.0  # type: ignore[arg-type]


@pytest.mark.parametrize("n_steps", [2, 7, 100])
def test_norms_ramp(n_steps: int) -> None:
    signal = Signal.from_function(TimeGrid(t_end=1.0, n_steps=n_steps), lambda t: t)
    assert signal_norm(signal, "sup") == pytest.approx(1.0, abs=1e-15)
    assert signal_norm(signal, "w1inf") == pytest.approx(1.0, abs=1e-12)


def test_norms_sine() -> None:
    signal = Signal.from_function(
        TimeGrid(t_end=1.0, n_steps=1000), lambda t: np.sin(2 * np.pi * t)
    )
    assert signal_norm(signal, "w1inf") == pytest.approx(2 * np.pi, abs=1e-4)
    assert signal_norm(signal, "l2") == pytest.approx(np.sqrt(0.5), rel=1e-8)
    assert signal_norm(signal, "sup") <= signal_norm(signal, "w1inf")


def test_flux_at_left_polynomials() -> None:
    tgrid = TimeGrid(t_end=1.0, n_steps=10)
    xgrid = SpaceGrid(length=1.0, n_cells=8)

    flux = flux_at_left(_field(tgrid, xgrid, lambda t, x: x + 0 * t))
    np.testing.assert_allclose(flux.values, 1.0, atol=1e-12)

    flux = flux_at_left(_field(tgrid, xgrid, lambda t, x: x**3 / 6 + t * x))
    np.testing.assert_allclose(flux.values, tgrid.nodes, atol=1e-12)

    flux = flux_at_left(_field(tgrid, xgrid, lambda t, x: x**4 - 2 * x**2 + 0 * t))
    np.testing.assert_allclose(flux.values, 0.0, atol=1e-11)


def test_flux_at_left_fourth_order() -> None:
    tgrid = TimeGrid(t_end=1.0, n_steps=2)
    errors = []
    for n_cells in (10, 20, 40):
        xgrid = SpaceGrid(length=1.0, n_cells=n_cells)
        flux = flux_at_left(_field(tgrid, xgrid, lambda t, x: np.sin(x) + 0 * t))
        errors.append(np.max(np.abs(flux.values - 1.0)))

    assert errors[-1] < 1e-6
    assert np.log2(errors[0] / errors[1]) > 3.5
    assert np.log2(errors[1] / errors[2]) > 3.5


def test_flux_stencil_is_exact_to_degree_four() -> None:
    nodes = np.arange(5.0)
    for degree in range(5):
        expected = 12.0 if degree == 1 else 0.0
        assert FLUX_STENCIL @ nodes**degree == pytest.approx(expected, abs=1e-12)


def test_resample() -> None:
    grid = TimeGrid(t_end=1.0, n_steps=100)
    signal = Signal.from_function(grid, lambda t: np.sin(2 * np.pi * t))

    identical = resample(signal, grid)
    np.testing.assert_array_equal(identical.values, signal.values)

    ramp = Signal.from_function(grid, lambda t: 3 * t - 1)
    fine = TimeGrid(t_end=1.0, n_steps=200)
    np.testing.assert_allclose(resample(ramp, fine).values, 3 * fine.nodes - 1, atol=1e-13)

    finer = TimeGrid(t_end=1.0, n_steps=1000)
    upsampled = resample(signal, finer)
    assert np.max(np.abs(upsampled.values - np.sin(2 * np.pi * finer.nodes))) <= 1e-5
    assert upsampled.values[0] == signal.values[0]
    assert upsampled.values[-1] == signal.values[-1]

    back = resample(upsampled, grid)
    assert np.max(np.abs(back.values - signal.values)) <= 1e-6

    with pytest.raises(IncompatibleGridError):
        resample(signal, TimeGrid(t_end=2.0, n_steps=100))


def test_signal_csv(tmp_path: Path) -> None:
    grid = TimeGrid(t_end=0.7, n_steps=21)
    signal = Signal.from_function(grid, lambda t: np.exp(-t) * np.sin(7 * t))
    path = tmp_path / "signal.csv"

    write_signal_csv(path, signal, {"heattrack": "0.1.0", "config_sha256": "abc"})
    assert path.read_text().startswith("# heattrack=0.1.0 config_sha256=abc\nt,value\n")

    loaded = read_signal_csv(path)
    assert loaded.grid == grid
    np.testing.assert_array_equal(loaded.values, signal.values)


def test_symmetric_signal_csv(tmp_path: Path) -> None:
    grid = SymmetricTimeGrid(half_width=1.5, n_half=6)
    signal = Signal.from_function(grid, lambda s: s**2)
    path = tmp_path / "wave.csv"
    write_signal_csv(path, signal)

    loaded = read_signal_csv(path)
    assert isinstance(loaded.grid, SymmetricTimeGrid)
    assert loaded.grid.n_half == 6
    np.testing.assert_array_equal(loaded.values, signal.values)


@pytest.mark.parametrize(
    "content, fragment",
    [
        ("t,value\n0,0\n0.5,1\n1,oops\n", "row 3"),
        ("t,value\n0,0\n0.5,1,2\n1,0\n", "row 2"),
        ("t,value\n0,0\n0.4,1\n1,0\n", "row 2"),
        ("time,value\n0,0\n", "header"),
    ],
)
def test_malformed_csv(tmp_path: Path, content: str, fragment: str) -> None:
    path = tmp_path / "bad.csv"
    path.write_text(content)
    with pytest.raises(DataFileError, match=fragment):
        read_signal_csv(path)


def test_field_csv(tmp_path: Path) -> None:
    tgrid = TimeGrid(t_end=1.0, n_steps=2)
    xgrid = SpaceGrid(length=1.0, n_cells=4)
    path = tmp_path / "field.csv"
    write_field_csv(path, _field(tgrid, xgrid, lambda t, x: t + x))

    lines = path.read_text().splitlines()
    assert lines[0] == "t,x,value"
    assert len(lines) == 1 + 3 * 5
    assert lines[7] == "0.5,0.25,0.75"
