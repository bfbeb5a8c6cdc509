"""
File: ./heattrack/solvers/_heat.py
Project: heattrack

This program is free software; you can redistribute it and/or modify it under the terms of the GNU General Public License as published by the Free Software Foundation; either version 2 of the License, or (at your option) any later version.
This program is distributed in the hope that it will be useful, but WITHOUT ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the GNU General Public License for more details.
You should have received a copy of the GNU General Public License along with this program; if not, write to the Free Software Foundation, Inc., 51 Franklin Street, Fifth Floor, Boston, MA 02110-1301, USA.
"""

# Internal
from typing import Optional

# External
import numpy as np
from numpy.typing import NDArray, ArrayLike
from scipy.linalg import solve_banded

# Project
from ._problems import HeatProblem, AdjointProblem
from ..grids import (
    Signal,
    TimeGrid,
    resample,
    HeatField,
    SpaceGrid,
    FLUX_STENCIL,
    flux_at_left,
    left_flux_values,
    right_flux_values,
)
from ..logger import get_logger
from .._errors import OutOfRangeError, GridTooCoarseError
from .._constants import RANNACHER_STEPS

logger = get_logger(__name__)

FloatArray = NDArray[np.float64]


class CrankNicolsonStepper:
    """Crank-Nicolson time stepping for y_t = y_xx with Dirichlet data at both ends.

    The first ``RANNACHER_STEPS`` steps are each replaced by two implicit Euler half steps,
    with boundary data at the half step taken as the mean of the neighbouring nodes. Both step
    kinds share the same tridiagonal matrix I - (dt/2)·Δ_h, factorized once as a banded array.

    Args:
        xgrid: Space grid
        tgrid: Time grid
        rannacher_steps: Number of smoothing steps at the start

    """

    def __init__(
        self, xgrid: SpaceGrid, tgrid: TimeGrid, *, rannacher_steps: int = RANNACHER_STEPS
    ) -> None:
        self.xgrid = xgrid
        self.tgrid = tgrid
        self.rannacher_steps = min(max(rannacher_steps, 0), tgrid.n_steps)
        self.ratio = tgrid.dt / xgrid.dx**2

        interior = xgrid.n_cells - 1
        half = 0.5 * self.ratio
        banded = np.empty((3, interior))
        banded[0, :] = -half
        banded[1, :] = 1.0 + self.ratio
        banded[2, :] = -half
        banded.flags.writeable = False
        self._banded = banded

    def _solve(self, rhs: FloatArray) -> FloatArray:
        return np.asarray(solve_banded((1, 1), self._banded, rhs, check_finite=False))

    def _explicit_half(self, u: FloatArray) -> FloatArray:
        """(I + (dt/2)·Δ_h) u with zero boundary values"""
        out = (1.0 - self.ratio) * u
        out[1:] += 0.5 * self.ratio * u[:-1]
        out[:-1] += 0.5 * self.ratio * u[1:]
        return out

    def is_smoothing_step(self, n: int) -> bool:
        return n < self.rannacher_steps

    def step(
        self, n: int, u: FloatArray, left: FloatArray, right: FloatArray
    ) -> FloatArray:
        """Advance interior values from node n to node n + 1"""
        half = 0.5 * self.ratio
        if self.is_smoothing_step(n):
            rhs = u.copy()
            rhs[0] += half * 0.5 * (left[n] + left[n + 1])
            rhs[-1] += half * 0.5 * (right[n] + right[n + 1])
            u = self._solve(rhs)
            rhs = u.copy()
            rhs[0] += half * left[n + 1]
            rhs[-1] += half * right[n + 1]
            return self._solve(rhs)

        rhs = self._explicit_half(u)
        rhs[0] += half * (left[n] + left[n + 1])
        rhs[-1] += half * (right[n] + right[n + 1])
        return self._solve(rhs)

    def march(self, initial: ArrayLike, left: ArrayLike, right: ArrayLike) -> FloatArray:
        """Full field values, shape (n_steps + 1, n_cells + 1), boundary columns pinned"""
        left = np.asarray(left, dtype=np.float64)
        right = np.asarray(right, dtype=np.float64)
        values = np.empty((self.tgrid.n_steps + 1, self.xgrid.n_cells + 1))
        values[:, 0] = left
        values[:, -1] = right
        values[0, 1:-1] = np.asarray(initial, dtype=np.float64)[1:-1]

        u = values[0, 1:-1].copy()
        for n in range(self.tgrid.n_steps):
            u = self.step(n, u, left, right)
            values[n + 1, 1:-1] = u
        return values

    def tracking_flux(self, control: ArrayLike) -> FloatArray:
        """∂_x y(·, 0) for zero initial state, zero data at x = 0 and ``control`` at x = L"""
        control = np.asarray(control, dtype=np.float64)
        values = self.march(np.zeros(self.xgrid.n_cells + 1), np.zeros_like(control), control)
        return left_flux_values(values, self.xgrid.dx)

    def tracking_flux_transpose(self, g: ArrayLike) -> FloatArray:
        """Euclidean transpose of ``tracking_flux``, swept backward in time"""
        g = np.asarray(g, dtype=np.float64)
        n_steps = self.tgrid.n_steps
        interior = self.xgrid.n_cells - 1
        half = 0.5 * self.ratio

        # Observation weights: interior nodes 1..4, and node 4 itself when it is x = L
        observe = FLUX_STENCIL[1:] / (12.0 * self.xgrid.dx)
        observed_interior = min(4, interior)
        boundary_weight = observe[3] if self.xgrid.n_cells == 4 else 0.0

        grad = np.zeros(n_steps + 1)
        adjoint = np.zeros(interior)

        def observe_at(n: int, lam: FloatArray) -> FloatArray:
            lam = lam.copy()
            lam[:observed_interior] += observe[:observed_interior] * g[n]
            grad[n] += boundary_weight * g[n]
            return lam

        adjoint = observe_at(n_steps, adjoint)
        for n in range(n_steps - 1, -1, -1):
            if self.is_smoothing_step(n):
                second = self._solve(adjoint)
                grad[n + 1] += half * second[-1]
                first = self._solve(second)
                grad[n] += 0.5 * half * first[-1]
                grad[n + 1] += 0.5 * half * first[-1]
                adjoint = first
            else:
                mu = self._solve(adjoint)
                grad[n] += half * mu[-1]
                grad[n + 1] += half * mu[-1]
                adjoint = self._explicit_half(mu)
            adjoint = observe_at(n, adjoint)

        return grad


def solve_heat_forward(problem: HeatProblem) -> HeatField:
    """Crank-Nicolson solve of a heat problem.

    Accuracy is O(dt² + dx²) for compatible smooth data. With nonnegative data the solution
    stays nonnegative while dt/dx² <= 1.

    Raises:
        GridTooCoarseError: fewer than four cells

    """
    if problem.xgrid.n_cells < 4:
        raise GridTooCoarseError("Heat solver needs at least 4 cells")

    stepper = CrankNicolsonStepper(problem.xgrid, problem.tgrid)
    values = stepper.march(problem.initial, problem.left_bc.values, problem.right_bc.values)
    logger.debug(
        "Crank-Nicolson solve: %d steps, %d cells, dt/dx²=%s",
        problem.tgrid.n_steps,
        problem.xgrid.n_cells,
        stepper.ratio,
    )
    return HeatField(problem.tgrid, problem.xgrid, values)


def solve_heat_adjoint(problem: AdjointProblem) -> HeatField:
    """Backward solve of -p_t = p_xx from p(T) = 0, returned on the original time axis"""
    tgrid = problem.tgrid
    right: Optional[Signal] = problem.right_bc
    right_values = np.zeros(tgrid.n_steps + 1) if right is None else right.values

    reversed_problem = HeatProblem(
        xgrid=problem.xgrid,
        tgrid=tgrid,
        left_bc=Signal(tgrid, problem.left_bc.values[::-1]),
        right_bc=Signal(tgrid, right_values[::-1]),
        initial=np.zeros(problem.xgrid.n_cells + 1),
    )
    field = solve_heat_forward(reversed_problem)
    return HeatField(tgrid, problem.xgrid, field.values[::-1])


def flux_at_right(field: HeatField) -> Signal:
    """Trace ∂_x p(·, L) of a field.

    Raises:
        GridTooCoarseError: fewer than four cells

    """
    if field.xgrid.n_cells < 4:
        raise GridTooCoarseError("flux_at_right needs at least 4 cells")
    return Signal(field.tgrid, right_flux_values(field.values, field.xgrid.dx))


def heat_residual(field: HeatField) -> NDArray[np.float64]:
    """Crank-Nicolson residual (y^(n+1) - y^n)/dt - ½Δ_h(y^(n+1) + y^n) at interior nodes"""
    y = field.values
    dt, dx = field.tgrid.dt, field.xgrid.dx
    laplacian = (y[:, :-2] - 2.0 * y[:, 1:-1] + y[:, 2:]) / dx**2
    return np.asarray((y[1:, 1:-1] - y[:-1, 1:-1]) / dt - 0.5 * (laplacian[1:] + laplacian[:-1]))


def closed_loop_flux(control: Signal, xgrid: SpaceGrid, *, substeps: int = 1) -> Signal:
    """Flux ∂_x y(·, 0) produced by the boundary control ``control`` at x = L.

    With substeps > 1 the heat equation is marched on a time grid that many times finer,
    the control interpolated onto it by a cubic spline, and the flux is read back on the
    grid of the control.

    Raises:
        OutOfRangeError: substeps below 1

    """
    if substeps < 1:
        raise OutOfRangeError(f"substeps must be at least 1, got {substeps}")
    if substeps == 1:
        return flux_at_left(solve_heat_forward(HeatProblem.tracking(xgrid, control)))

    assert isinstance(control.grid, TimeGrid)
    fine = resample(control, control.grid.refined(substeps))
    flux = flux_at_left(solve_heat_forward(HeatProblem.tracking(xgrid, fine)))
    return control.with_values(flux.values[::substeps])


__all__ = (
    "CrankNicolsonStepper",
    "flux_at_right",
    "heat_residual",
    "closed_loop_flux",
    "solve_heat_forward",
    "solve_heat_adjoint",
)
