"""
File: ./heattrack/solvers/_problems.py
Project: heattrack

This program is free software; you can redistribute it and/or modify it under the terms of the GNU General Public License as published by the Free Software Foundation; either version 2 of the License, or (at your option) any later version.
This program is distributed in the hope that it will be useful, but WITHOUT ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the GNU General Public License for more details.
You should have received a copy of the GNU General Public License along with this program; if not, write to the Free Software Foundation, Inc., 51 Franklin Street, Fifth Floor, Boston, MA 02110-1301, USA.
"""

# Internal
import warnings
from typing import Any, Dict, Optional, Annotated

# External
import numpy as np
from pydantic import Field, BaseModel, validator, root_validator
from numpy.typing import NDArray

# Project
from ..grids import Signal, TimeGrid, SpaceGrid, SymmetricTimeGrid
from .._errors import CompatibilityWarning
from .._constants import CORNER_TOL


def _read_only(values: Any) -> NDArray[np.float64]:
    array = np.array(values, dtype=np.float64)
    if array.ndim != 1:
        raise ValueError("expected a one-dimensional sequence over the space nodes")
    if not np.all(np.isfinite(array)):
        bad = int(np.flatnonzero(~np.isfinite(array))[0])
        raise ValueError(f"value at space node {bad} is not finite")
    array.flags.writeable = False
    return array


def _check_space_data(name: str, array: NDArray[np.float64], xgrid: Optional[SpaceGrid]) -> None:
    if xgrid is not None and array.shape != (xgrid.n_cells + 1,):
        raise ValueError(f"{name} has {array.size} values, expected {xgrid.n_cells + 1}")


class HeatProblem(BaseModel):
    """
    y_t = y_xx on (0, T)×(0, L) with Dirichlet data at both ends and initial state.
    """

    class Config:
        allow_mutation = False
        arbitrary_types_allowed = True

    xgrid: Annotated[SpaceGrid, Field(description="Space grid over [0, L]")]
    tgrid: Annotated[TimeGrid, Field(description="Time grid over [0, T]")]
    left_bc: Annotated[Signal, Field(description="Dirichlet data y(t, 0)")]
    right_bc: Annotated[Signal, Field(description="Dirichlet data y(t, L)")]
    initial: Annotated[np.ndarray, Field(description="Initial state over space nodes")]

    _initial = validator("initial", pre=True, allow_reuse=True)(_read_only)

    @validator("left_bc", "right_bc")
    def _on_time_grid(cls, value: Signal, values: Dict[str, Any]) -> Signal:
        tgrid = values.get("tgrid")
        if tgrid is not None and value.grid != tgrid:
            raise ValueError("boundary data must live on the problem time grid")
        return value

    @root_validator(skip_on_failure=True)
    def _corners(cls, values: Dict[str, Any]) -> Dict[str, Any]:
        initial: NDArray[np.float64] = values["initial"]
        _check_space_data("initial", initial, values["xgrid"])
        gaps = (
            abs(initial[0] - values["left_bc"].values[0]),
            abs(initial[-1] - values["right_bc"].values[0]),
        )
        if max(gaps) > CORNER_TOL:
            warnings.warn(
                f"Initial state and boundary data disagree at t = 0 by {max(gaps):.3g}",
                CompatibilityWarning,
            )
        return values

    @classmethod
    def tracking(cls, xgrid: SpaceGrid, control: Signal) -> "HeatProblem":
        """Zero initial state, zero Dirichlet data at x = 0 and ``control`` at x = L"""
        assert isinstance(control.grid, TimeGrid)
        return cls(
            xgrid=xgrid,
            tgrid=control.grid,
            left_bc=Signal.zeros(control.grid),
            right_bc=control,
            initial=np.zeros(xgrid.n_cells + 1),
        )


class AdjointProblem(BaseModel):
    """
    -p_t = p_xx on (0, T)×(0, L), p(T) = 0, p(t, 0) = f(t), p(t, L) = right_bc(t).
    """

    class Config:
        allow_mutation = False
        arbitrary_types_allowed = True

    xgrid: Annotated[SpaceGrid, Field(description="Space grid over [0, L]")]
    tgrid: Annotated[TimeGrid, Field(description="Time grid over [0, T]")]
    left_bc: Annotated[Signal, Field(description="Dirichlet data f at x = 0")]
    right_bc: Annotated[
        Optional[Signal], Field(description="Dirichlet data at x = L, zero when omitted")
    ] = None

    @validator("left_bc", "right_bc")
    def _on_time_grid(cls, value: Optional[Signal], values: Dict[str, Any]) -> Optional[Signal]:
        tgrid = values.get("tgrid")
        if value is not None and tgrid is not None and value.grid != tgrid:
            raise ValueError("boundary data must live on the problem time grid")
        return value


class WaveProblem(BaseModel):
    """
    z_ss = z_xx for s in [-S, S], z(s, 0) = 0, z(s, L) = g(s), z(0) = z_0, z_s(0) = z_1.
    """

    class Config:
        allow_mutation = False
        arbitrary_types_allowed = True

    xgrid: Annotated[SpaceGrid, Field(description="Space grid over [0, L]")]
    sgrid: Annotated[SymmetricTimeGrid, Field(description="Pseudo-time grid over [-S, S]")]
    control: Annotated[Signal, Field(description="Dirichlet data g(s) at x = L")]
    z0: Annotated[np.ndarray, Field(description="Initial displacement")]
    z1: Annotated[
        Optional[np.ndarray], Field(description="Initial velocity, zero when omitted")
    ] = None

    _z0 = validator("z0", pre=True, allow_reuse=True)(_read_only)

    @validator("z1", pre=True)
    def _velocity(cls, value: Any) -> Optional[NDArray[np.float64]]:
        return None if value is None else _read_only(value)

    @validator("control")
    def _on_pseudo_time_grid(cls, value: Signal, values: Dict[str, Any]) -> Signal:
        sgrid = values.get("sgrid")
        if sgrid is not None and value.grid != sgrid:
            raise ValueError("wave control must live on the problem pseudo-time grid")
        return value

    @root_validator(skip_on_failure=True)
    def _space_data(cls, values: Dict[str, Any]) -> Dict[str, Any]:
        _check_space_data("z0", values["z0"], values["xgrid"])
        if values.get("z1") is not None:
            _check_space_data("z1", values["z1"], values["xgrid"])
        return values

    @property
    def velocity(self) -> NDArray[np.float64]:
        return np.zeros(self.xgrid.n_cells + 1) if self.z1 is None else self.z1


__all__ = ("HeatProblem", "AdjointProblem", "WaveProblem")
