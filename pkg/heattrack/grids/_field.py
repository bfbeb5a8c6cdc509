"""
File: ./heattrack/grids/_field.py
Project: heattrack

This program is free software; you can redistribute it and/or modify it under the terms of the GNU General Public License as published by the Free Software Foundation; either version 2 of the License, or (at your option) any later version.
This program is distributed in the hope that it will be useful, but WITHOUT ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the GNU General Public License for more details.
You should have received a copy of the GNU General Public License along with this program; if not, write to the Free Software Foundation, Inc., 51 Franklin Street, Fifth Floor, Boston, MA 02110-1301, USA.
"""

# Internal
from typing import Tuple

# External
import numpy as np
from numpy.typing import NDArray, ArrayLike

# Project
from ._grid import SpaceGrid, TimeGrid, AnyTimeGrid, SymmetricTimeGrid
from ._signal import Signal
from .._errors import InvalidSignalError, GridTooCoarseError

# One-sided fourth-order first derivative at the first node, in units of 1/(12 dx)
FLUX_STENCIL = np.array([-25.0, 48.0, -36.0, 16.0, -3.0])


class Field:
    """Space-time samples indexed (time node, space node)"""

    __slots__ = ("_tgrid", "_xgrid", "_values")

    def __init__(self, tgrid: AnyTimeGrid, xgrid: SpaceGrid, values: ArrayLike) -> None:
        array = np.array(values, dtype=np.float64)
        expected = (tgrid.n_steps + 1, xgrid.n_cells + 1)
        if array.shape != expected:
            raise InvalidSignalError(f"Field has shape {array.shape}, expected {expected}")
        if not np.all(np.isfinite(array)):
            row, col = np.argwhere(~np.isfinite(array))[0]
            raise InvalidSignalError(f"Field value at (time {row}, space {col}) is not finite")

        array.flags.writeable = False
        self._tgrid = tgrid
        self._xgrid = xgrid
        self._values = array

    @property
    def tgrid(self) -> AnyTimeGrid:
        return self._tgrid

    @property
    def xgrid(self) -> SpaceGrid:
        return self._xgrid

    @property
    def values(self) -> NDArray[np.float64]:
        return self._values

    @property
    def shape(self) -> Tuple[int, int]:
        rows, cols = self._values.shape
        return rows, cols

    def at_time(self, index: int) -> NDArray[np.float64]:
        return self._values[index]

    def at_node(self, index: int) -> Signal:
        """Time trace at one space node"""
        return Signal(self._tgrid, self._values[:, index])

    def __repr__(self) -> str:
        return f"{type(self).__name__}(tgrid={self._tgrid!r}, xgrid={self._xgrid!r})"


class HeatField(Field):
    """Heat state y(t, x) on a TimeGrid × SpaceGrid"""

    __slots__ = ()

    def __init__(self, tgrid: AnyTimeGrid, xgrid: SpaceGrid, values: ArrayLike) -> None:
        if not isinstance(tgrid, TimeGrid):
            raise InvalidSignalError("HeatField requires a TimeGrid")
        super().__init__(tgrid, xgrid, values)

    @property
    def tgrid(self) -> TimeGrid:
        assert isinstance(self._tgrid, TimeGrid)
        return self._tgrid


class WaveField(Field):
    """Wave state z(s, x) on a SymmetricTimeGrid × SpaceGrid"""

    __slots__ = ()

    def __init__(self, sgrid: AnyTimeGrid, xgrid: SpaceGrid, values: ArrayLike) -> None:
        if not isinstance(sgrid, SymmetricTimeGrid):
            raise InvalidSignalError("WaveField requires a SymmetricTimeGrid")
        super().__init__(sgrid, xgrid, values)

    @property
    def sgrid(self) -> SymmetricTimeGrid:
        assert isinstance(self._tgrid, SymmetricTimeGrid)
        return self._tgrid

    @property
    def tgrid(self) -> SymmetricTimeGrid:
        return self.sgrid


def left_flux_values(values: NDArray[np.float64], dx: float) -> NDArray[np.float64]:
    """∂_x at x = 0 of each row of ``values`` by the one-sided fourth-order stencil"""
    return np.asarray(values[..., :5] @ FLUX_STENCIL / (12.0 * dx), dtype=np.float64)


def right_flux_values(values: NDArray[np.float64], dx: float) -> NDArray[np.float64]:
    """∂_x at x = L of each row, the mirrored stencil"""
    return np.asarray(-(values[..., :-6:-1] @ FLUX_STENCIL) / (12.0 * dx), dtype=np.float64)


def flux_at_left(field: Field) -> Signal:
    """Trace ∂_x y(·, 0) of a field.

    Raises:
        GridTooCoarseError: fewer than four cells

    """
    if field.xgrid.n_cells < 4:
        raise GridTooCoarseError("flux_at_left needs at least 4 cells")
    return Signal(field.tgrid, left_flux_values(field.values, field.xgrid.dx))


__all__ = (
    "Field",
    "HeatField",
    "WaveField",
    "FLUX_STENCIL",
    "flux_at_left",
    "left_flux_values",
    "right_flux_values",
)
