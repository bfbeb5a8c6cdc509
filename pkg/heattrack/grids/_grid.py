"""
File: ./heattrack/grids/_grid.py
Project: heattrack

This program is free software; you can redistribute it and/or modify it under the terms of the GNU General Public License as published by the Free Software Foundation; either version 2 of the License, or (at your option) any later version.
This program is distributed in the hope that it will be useful, but WITHOUT ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the GNU General Public License for more details.
You should have received a copy of the GNU General Public License along with this program; if not, write to the Free Software Foundation, Inc., 51 Franklin Street, Fifth Floor, Boston, MA 02110-1301, USA.
"""

# Internal
from typing import Union, Annotated

# External
import numpy as np
from numpy.typing import NDArray
from pydantic import Field, BaseModel, validator


class TimeGrid(BaseModel):
    """
    Uniform grid over the horizon [0, T].
    """

    class Config:
        allow_mutation = False

    t_end: Annotated[float, Field(description="Horizon T, in seconds", gt=0)]
    n_steps: Annotated[int, Field(description="Number of time steps", ge=2)]

    @validator("t_end")
    def _finite_horizon(cls, value: float) -> float:
        if not np.isfinite(value):
            raise ValueError("t_end must be finite")
        return value

    @property
    def t_start(self) -> float:
        return 0.0

    @property
    def dt(self) -> float:
        return self.t_end / self.n_steps

    @property
    def nodes(self) -> NDArray[np.float64]:
        nodes = np.linspace(0.0, self.t_end, self.n_steps + 1)
        nodes.flags.writeable = False
        return nodes

    def refined(self, factor: int = 2) -> "TimeGrid":
        return TimeGrid(t_end=self.t_end, n_steps=self.n_steps * factor)


class SymmetricTimeGrid(BaseModel):
    """
    Uniform pseudo-time grid over [-S, S], with the node s = 0 at index n_half.
    """

    class Config:
        allow_mutation = False

    half_width: Annotated[float, Field(description="Half width S of the interval", gt=0)]
    n_half: Annotated[int, Field(description="Number of steps on each side of s = 0", ge=1)]

    @property
    def t_start(self) -> float:
        return -self.half_width

    @property
    def t_end(self) -> float:
        return self.half_width

    @property
    def n_steps(self) -> int:
        return 2 * self.n_half

    @property
    def dt(self) -> float:
        return self.half_width / self.n_half

    @property
    def nodes(self) -> NDArray[np.float64]:
        nodes = np.linspace(-self.half_width, self.half_width, 2 * self.n_half + 1)
        nodes[self.n_half] = 0.0
        nodes.flags.writeable = False
        return nodes

    @classmethod
    def covering(cls, half_width: float, ds: float) -> "SymmetricTimeGrid":
        """Smallest grid with step at most ds that spans [-half_width, half_width]"""
        n_half = max(1, int(np.ceil(half_width / ds - 1e-9)))
        return cls(half_width=n_half * ds, n_half=n_half)


class SpaceGrid(BaseModel):
    """
    Uniform grid over the interval [0, L].
    """

    class Config:
        allow_mutation = False

    length: Annotated[float, Field(description="Domain length L, in meters", gt=0)]
    n_cells: Annotated[int, Field(description="Number of cells", ge=4)]

    @property
    def dx(self) -> float:
        return self.length / self.n_cells

    @property
    def nodes(self) -> NDArray[np.float64]:
        nodes = np.linspace(0.0, self.length, self.n_cells + 1)
        nodes.flags.writeable = False
        return nodes

    def refined(self, factor: int = 2) -> "SpaceGrid":
        return SpaceGrid(length=self.length, n_cells=self.n_cells * factor)


# Anything a Signal can live on
AnyTimeGrid = Union[TimeGrid, SymmetricTimeGrid]

__all__ = ("TimeGrid", "SymmetricTimeGrid", "SpaceGrid", "AnyTimeGrid")
