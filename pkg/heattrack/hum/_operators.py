"""
File: ./heattrack/hum/_operators.py
Project: heattrack

This program is free software; you can redistribute it and/or modify it under the terms of the GNU General Public License as published by the Free Software Foundation; either version 2 of the License, or (at your option) any later version.
This program is distributed in the hope that it will be useful, but WITHOUT ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the GNU General Public License for more details.
You should have received a copy of the GNU General Public License along with this program; if not, write to the Free Software Foundation, Inc., 51 Franklin Street, Fifth Floor, Boston, MA 02110-1301, USA.
"""

# External
import numpy as np
from numpy.typing import NDArray

# Project
from ..grids import Signal, TimeGrid, SpaceGrid, trapezoid_weights
from ..solvers import AdjointProblem, CrankNicolsonStepper, flux_at_right, solve_heat_adjoint
from .._errors import GridTooCoarseError, IncompatibleGridError


class TrackingOperators:
    """Discrete observation E, its adjoint B* and the Gramian Λ = E B* on one pair of grids.

    E maps a control v at x = L to E y_v = -∂_x y_v(·, 0), the outward flux at x = 0 of the
    state started from rest. B* is the exact transpose of E for the trapezoid inner product,
    swept backward through the transposed Crank-Nicolson steps, so ⟨v, B* f⟩ = ⟨E y_v, f⟩
    and Λ is symmetric to round-off.

    Raises:
        GridTooCoarseError: fewer than four cells

    """

    def __init__(self, xgrid: SpaceGrid, tgrid: TimeGrid) -> None:
        if xgrid.n_cells < 4:
            raise GridTooCoarseError("Tracking operators need at least 4 cells")
        self.xgrid = xgrid
        self.tgrid = tgrid
        self.weights = trapezoid_weights(tgrid)
        self._stepper = CrankNicolsonStepper(xgrid, tgrid)

    def _values(self, signal: Signal) -> NDArray[np.float64]:
        if signal.grid != self.tgrid:
            raise IncompatibleGridError("Signal does not live on the operator time grid")
        return signal.values

    def inner(self, a: NDArray[np.float64], b: NDArray[np.float64]) -> float:
        return float(np.dot(self.weights * a, b))

    def observe(self, control: Signal) -> Signal:
        """E y_v for the control v"""
        return Signal(self.tgrid, -self._stepper.tracking_flux(self._values(control)))

    def apply_Bstar(self, f: Signal) -> Signal:
        weighted = self.weights * self._values(f)
        return Signal(self.tgrid, -self._stepper.tracking_flux_transpose(weighted) / self.weights)

    def apply_gramian(self, f: Signal) -> Signal:
        return self.observe(self.apply_Bstar(f))


def apply_Bstar(f: Signal, xgrid: SpaceGrid) -> Signal:
    """B* f = ∂_x p_f(·, L), with p_f the backward heat state driven by f at x = 0.

    Args:
        f: Dual variable on the time grid
        xgrid: Space grid of the rod

    Returns:
        The observation of the adjoint state, the control that f synthesizes

    """
    assert isinstance(f.grid, TimeGrid)
    return TrackingOperators(xgrid, f.grid).apply_Bstar(f)


def apply_gramian(f: Signal, xgrid: SpaceGrid) -> Signal:
    """Λf = E y, y driven by the control B* f"""
    assert isinstance(f.grid, TimeGrid)
    return TrackingOperators(xgrid, f.grid).apply_gramian(f)


def continuous_Bstar(f: Signal, xgrid: SpaceGrid) -> Signal:
    """B* f from a direct solve of -p_t = p_xx, p(·, 0) = f, p(·, L) = 0, p(T) = 0.

    Agrees with ``apply_Bstar`` up to discretization error.
    """
    assert isinstance(f.grid, TimeGrid)
    adjoint = solve_heat_adjoint(AdjointProblem(xgrid=xgrid, tgrid=f.grid, left_bc=f))
    return flux_at_right(adjoint)


__all__ = ("TrackingOperators", "apply_Bstar", "apply_gramian", "continuous_Bstar")
