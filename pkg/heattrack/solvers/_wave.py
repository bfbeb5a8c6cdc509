"""
File: ./heattrack/solvers/_wave.py
Project: heattrack

This program is free software; you can redistribute it and/or modify it under the terms of the GNU General Public License as published by the Free Software Foundation; either version 2 of the License, or (at your option) any later version.
This program is distributed in the hope that it will be useful, but WITHOUT ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the GNU General Public License for more details.
You should have received a copy of the GNU General Public License along with this program; if not, write to the Free Software Foundation, Inc., 51 Franklin Street, Fifth Floor, Boston, MA 02110-1301, USA.
"""

# External
import numpy as np
from numpy.typing import NDArray

# Project
from ._problems import WaveProblem
from ..grids import WaveField
from ..logger import get_logger
from .._errors import StabilityError

logger = get_logger(__name__)

_CFL_SLACK = 1e-12


def _laplacian(z: NDArray[np.float64], dx: float) -> NDArray[np.float64]:
    out = np.zeros_like(z)
    out[1:-1] = (z[:-2] - 2.0 * z[1:-1] + z[2:]) / dx**2
    return out


def _leapfrog(
    z0: NDArray[np.float64],
    velocity: NDArray[np.float64],
    boundary: NDArray[np.float64],
    ds: float,
    dx: float,
) -> NDArray[np.float64]:
    """Rows z(k·ds) for k = 0..len(boundary) - 1, boundary[k] pinned at x = L"""
    steps = boundary.size
    rows = np.empty((steps, z0.size))
    rows[0] = z0
    rows[0, 0] = 0.0
    rows[0, -1] = boundary[0]
    if steps == 1:
        return rows

    # Taylor start
    rows[1] = rows[0] + ds * velocity + 0.5 * ds**2 * _laplacian(rows[0], dx)
    rows[1, 0] = 0.0
    rows[1, -1] = boundary[1]

    factor = (ds / dx) ** 2
    for k in range(1, steps - 1):
        current = rows[k]
        nxt = rows[k + 1]
        nxt[1:-1] = (
            2.0 * current[1:-1]
            - rows[k - 1, 1:-1]
            + factor * (current[:-2] - 2.0 * current[1:-1] + current[2:])
        )
        nxt[0] = 0.0
        nxt[-1] = boundary[k + 1]
    return rows


def solve_wave(problem: WaveProblem) -> WaveField:
    """Leapfrog solve of z_ss = z_xx on [-S, S].

    The run starts at s = 0 and marches to +S, then to -S with the velocity sign flipped.

    Raises:
        StabilityError: ds > dx

    """
    sgrid, xgrid = problem.sgrid, problem.xgrid
    ds, dx = sgrid.dt, xgrid.dx
    if ds > dx * (1.0 + _CFL_SLACK):
        raise StabilityError(f"Leapfrog needs ds <= dx, got ds={ds:.6g} and dx={dx:.6g}")

    middle = sgrid.n_half
    g = problem.control.values
    velocity = problem.velocity

    forward = _leapfrog(problem.z0, velocity, g[middle:], ds, dx)
    backward = _leapfrog(problem.z0, -velocity, g[middle::-1], ds, dx)

    values = np.empty((sgrid.n_steps + 1, xgrid.n_cells + 1))
    values[middle:] = forward
    values[: middle + 1] = backward[::-1]
    logger.debug("Leapfrog solve: %d steps each way, CFL number %s", middle, ds / dx)
    return WaveField(sgrid, xgrid, values)


def wave_energy(field: WaveField) -> NDArray[np.float64]:
    """Discrete energy conserved by leapfrog when the boundary data vanish, one per step.

    E = ½‖(z^(k+1) - z^k)/ds‖² + ½⟨D z^(k+1), D z^k⟩, D the forward difference in x.
    """
    z = field.values
    ds, dx = field.sgrid.dt, field.xgrid.dx
    kinetic = 0.5 * np.sum(((z[1:] - z[:-1]) / ds) ** 2, axis=1) * dx
    gradients = np.diff(z, axis=1) / dx
    potential = 0.5 * np.sum(gradients[1:] * gradients[:-1], axis=1) * dx
    return np.asarray(kinetic + potential)


__all__ = ("solve_wave", "wave_energy")
