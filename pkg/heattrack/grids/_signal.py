"""
File: ./heattrack/grids/_signal.py
Project: heattrack

This program is free software; you can redistribute it and/or modify it under the terms of the GNU General Public License as published by the Free Software Foundation; either version 2 of the License, or (at your option) any later version.
This program is distributed in the hope that it will be useful, but WITHOUT ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the GNU General Public License for more details.
You should have received a copy of the GNU General Public License along with this program; if not, write to the Free Software Foundation, Inc., 51 Franklin Street, Fifth Floor, Boston, MA 02110-1301, USA.
"""

# Internal
from typing import Literal, Callable

# External
import numpy as np
from numpy.typing import NDArray, ArrayLike
from scipy.integrate import trapezoid
from scipy.interpolate import CubicSpline

# Project
from ._grid import TimeGrid, AnyTimeGrid, SymmetricTimeGrid
from .._errors import InvalidSignalError, IncompatibleGridError

NormKind = Literal["sup", "l2", "w1inf"]


class Signal:
    """Nodal samples of a time function, node i at t_start + i·dt.

    Values are copied into a read-only float buffer at construction.
    """

    __slots__ = ("_grid", "_values")

    def __init__(self, grid: AnyTimeGrid, values: ArrayLike) -> None:
        if not isinstance(grid, (TimeGrid, SymmetricTimeGrid)):
            raise InvalidSignalError(f"Signal grid must be a time grid, got {type(grid).__name__}")

        array = np.array(values, dtype=np.float64)
        if array.shape != (grid.n_steps + 1,):
            raise InvalidSignalError(
                f"Signal has shape {array.shape}, expected ({grid.n_steps + 1},) for its grid"
            )
        if not np.all(np.isfinite(array)):
            bad = int(np.flatnonzero(~np.isfinite(array))[0])
            raise InvalidSignalError(f"Signal value at node {bad} is not finite")

        array.flags.writeable = False
        self._grid = grid
        self._values = array

    @classmethod
    def zeros(cls, grid: AnyTimeGrid) -> "Signal":
        return cls(grid, np.zeros(grid.n_steps + 1))

    @classmethod
    def from_function(
        cls, grid: AnyTimeGrid, func: Callable[[NDArray[np.float64]], ArrayLike]
    ) -> "Signal":
        return cls(grid, func(grid.nodes))

    @property
    def grid(self) -> AnyTimeGrid:
        return self._grid

    @property
    def values(self) -> NDArray[np.float64]:
        return self._values

    @property
    def nodes(self) -> NDArray[np.float64]:
        return self._grid.nodes

    def with_values(self, values: ArrayLike) -> "Signal":
        return Signal(self._grid, values)

    def __len__(self) -> int:
        return len(self._values)

    def __repr__(self) -> str:
        return f"Signal(grid={self._grid!r}, values=<{len(self._values)} samples>)"


def signal_norm(signal: Signal, kind: NormKind = "sup") -> float:
    """Norm of a sampled signal.

    Args:
        signal: Signal to be measured
        kind: ``sup`` for the max norm, ``l2`` for the trapezoid L² norm, ``w1inf`` for the
            max of the sup norm and the sup of the finite-difference derivative (centered in
            the interior, second-order one-sided at the ends)

    Raises:
        InvalidSignalError: Non-finite values or unknown norm kind

    Returns:
        Norm value

    """
    values = signal.values
    if not np.all(np.isfinite(values)):
        raise InvalidSignalError("Signal values must be finite")

    sup = float(np.max(np.abs(values)))
    if kind == "sup":
        return sup
    if kind == "l2":
        return float(np.sqrt(trapezoid(values * values, dx=signal.grid.dt)))
    if kind == "w1inf":
        derivative = np.gradient(values, signal.grid.dt, edge_order=2)
        return max(sup, float(np.max(np.abs(derivative))))

    raise InvalidSignalError(f"Unknown norm kind: {kind}")


def inner_product(a: Signal, b: Signal) -> float:
    """Trapezoid L² inner product of two signals on the same grid"""
    if a.grid != b.grid:
        raise IncompatibleGridError("Inner product requires signals on the same grid")
    return float(trapezoid(a.values * b.values, dx=a.grid.dt))


def trapezoid_weights(grid: AnyTimeGrid) -> NDArray[np.float64]:
    weights = np.full(grid.n_steps + 1, grid.dt)
    weights[0] = weights[-1] = grid.dt / 2
    return weights


def resample(signal: Signal, new_grid: AnyTimeGrid) -> Signal:
    """Cubic-spline interpolation of a signal onto another grid over the same interval.

    Raises:
        IncompatibleGridError: grids do not span the same interval

    """
    old_grid = signal.grid
    if not (
        np.isclose(old_grid.t_start, new_grid.t_start, rtol=1e-12, atol=1e-14)
        and np.isclose(old_grid.t_end, new_grid.t_end, rtol=1e-12, atol=1e-14)
    ):
        raise IncompatibleGridError(
            f"Cannot resample [{old_grid.t_start}, {old_grid.t_end}] onto"
            f" [{new_grid.t_start}, {new_grid.t_end}]"
        )

    if old_grid == new_grid:
        return Signal(new_grid, signal.values)

    values = CubicSpline(old_grid.nodes, signal.values)(new_grid.nodes)
    values[0] = signal.values[0]
    values[-1] = signal.values[-1]
    return Signal(new_grid, values)


__all__ = (
    "Signal",
    "NormKind",
    "resample",
    "signal_norm",
    "inner_product",
    "trapezoid_weights",
)
