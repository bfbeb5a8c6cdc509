"""
File: ./heattrack/transmutation/_transform.py
Project: heattrack

This program is free software; you can redistribute it and/or modify it under the terms of the GNU General Public License as published by the Free Software Foundation; either version 2 of the License, or (at your option) any later version.
This program is distributed in the hope that it will be useful, but WITHOUT ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the GNU General Public License for more details.
You should have received a copy of the GNU General Public License along with this program; if not, write to the Free Software Foundation, Inc., 51 Franklin Street, Fifth Floor, Boston, MA 02110-1301, USA.
"""

# Internal
from typing import List, Tuple, Annotated

# External
import numpy as np
from pydantic import Field, BaseModel
from numpy.typing import NDArray
from scipy.integrate import trapezoid
from scipy.interpolate import CubicSpline

# Project
from ._kernel import TransmutationPlan, kernel_mass
from ..grids import Signal, HeatField, WaveField, SymmetricTimeGrid, flux_at_left
from ..logger import get_logger
from .._errors import IncompatibleGridError, InsufficientSupportError
from ..solvers import HeatProblem, heat_residual, solve_heat_forward

logger = get_logger(__name__)

FloatArray = NDArray[np.float64]

# Quadrature nodes times wave columns handled per chunk
_WORK_CHUNK = 1 << 20
# Earliest heat times compared against z_0 in the initial trace sweep
_TRACE_NODES = 5


def _check_support(sgrid: SymmetricTimeGrid, plan: TransmutationPlan) -> None:
    if sgrid.half_width < plan.radius * (1.0 - 1e-12):
        raise InsufficientSupportError(
            f"Wave data covers [-{sgrid.half_width:.6g}, {sgrid.half_width:.6g}],"
            f" the kernel window needs S(T) = {plan.radius:.6g}"
        )


def _transmute_columns(
    snodes: FloatArray, data: FloatArray, plan: TransmutationPlan, middle: int
) -> FloatArray:
    """∫ k(t, s)·data(s, ·) ds for each heat time, with the s = 0 row at t = 0"""
    spline = CubicSpline(snodes, data, axis=0)
    t = plan.tgrid.nodes
    out = np.empty((t.size, data.shape[1]))
    out[0] = data[middle]

    positive = np.arange(1, t.size)
    points = plan.panels * plan.quad_nodes
    rows = max(1, _WORK_CHUNK // (points * data.shape[1]))
    for start in range(0, positive.size, rows):
        index = positive[start : start + rows]
        s, weights = plan.rules(t[index])
        samples = spline(s.ravel()).reshape(s.shape + (data.shape[1],))
        out[index] = np.einsum("mq,mqx->mx", weights, samples)
    return out


def transmute_signal(g: Signal, plan: TransmutationPlan) -> Signal:
    """Heat signal v(t) = ∫ k(t, s) g(s) ds, with v(0) = g(0).

    Each positive time integrates over [-S(t), S(t)] with panels no wider than sqrt(t),
    sampling g through a cubic spline.

    Raises:
        InsufficientSupportError: g does not cover [-S(T), S(T)]

    """
    sgrid = g.grid
    if not isinstance(sgrid, SymmetricTimeGrid):
        raise IncompatibleGridError("Transmuted signals must live on a symmetric pseudo-time grid")
    _check_support(sgrid, plan)

    values = _transmute_columns(sgrid.nodes, g.values[:, None], plan, sgrid.n_half)
    return Signal(plan.tgrid, values[:, 0])


def transmute_field(z: WaveField, plan: TransmutationPlan) -> HeatField:
    """Heat field y(t, x) = ∫ k(t, s) z(s, x) ds for a wave started at rest, y(0) = z_0.

    Raises:
        InsufficientSupportError: z does not cover [-S(T), S(T)]

    """
    sgrid = z.sgrid
    _check_support(sgrid, plan)

    values = _transmute_columns(sgrid.nodes, z.values, plan, sgrid.n_half)
    logger.debug(
        "Transmuted %d space nodes over %d heat times, %d panels of %d nodes",
        z.xgrid.n_cells + 1,
        plan.tgrid.n_steps,
        plan.panels,
        plan.quad_nodes,
    )
    return HeatField(plan.tgrid, z.xgrid, values)


def transmute_tracking_pair(
    z: WaveField, g: Signal, plan: TransmutationPlan
) -> Tuple[Signal, Signal]:
    """Heat control v from the wave control g, and the heat flux w it tracks.

    When g steers the wave so that its flux at x = 0 follows h, the transmuted control steers
    the heat flux along w = ∫ k h ds.

    Returns:
        The heat control and the tracked heat flux

    """
    if g.grid != z.sgrid:
        raise IncompatibleGridError("Wave control and wave field must share the pseudo-time grid")
    return transmute_signal(g, plan), transmute_signal(flux_at_left(z), plan)


class TransmutationReport(BaseModel):
    """
    Residuals of the three identities carried over from the wave to the heat problem.
    """

    class Config:
        allow_mutation = False

    heat_residual: Annotated[
        float, Field(description="Largest Crank-Nicolson residual of the transmuted field")
    ]
    flux_residual: Annotated[
        float, Field(description="Sup of flux(transmute(z)) - transmute(flux(z))")
    ]
    solve_discrepancy: Annotated[
        float, Field(description="Sup distance to a direct heat solve with the transmuted control")
    ]
    min_kernel_mass: Annotated[float, Field(description="Smallest truncated kernel mass")]
    max_kernel_mass: Annotated[float, Field(description="Largest truncated kernel mass")]
    initial_trace_errors: Annotated[
        List[float], Field(description="L² distance to z_0 at the earliest positive heat times")
    ]


def verify_transmutation(z: WaveField, plan: TransmutationPlan) -> TransmutationReport:
    """Transmute a wave field and measure how well it behaves as a heat field.

    The wave must have been started at rest; its control g is read from the x = L column.

    Raises:
        InsufficientSupportError: z does not cover [-S(T), S(T)]

    """
    field = transmute_field(z, plan)
    g = z.at_node(z.xgrid.n_cells)
    control = transmute_signal(g, plan)
    z0 = z.at_time(z.sgrid.n_half)

    residual = float(np.max(np.abs(heat_residual(field)), initial=0.0))
    flux = flux_at_left(field).values - transmute_signal(flux_at_left(z), plan).values
    direct = solve_heat_forward(
        HeatProblem(
            xgrid=z.xgrid,
            tgrid=plan.tgrid,
            left_bc=Signal.zeros(plan.tgrid),
            right_bc=control,
            initial=z0,
        )
    )
    mass = kernel_mass(plan)

    earliest = field.values[1 : _TRACE_NODES + 1] - z0[None, :]
    traces = np.sqrt(trapezoid(earliest**2, dx=z.xgrid.dx, axis=1))

    report = TransmutationReport(
        heat_residual=residual,
        flux_residual=float(np.max(np.abs(flux))),
        solve_discrepancy=float(np.max(np.abs(direct.values - field.values))),
        min_kernel_mass=float(np.min(mass)),
        max_kernel_mass=float(np.max(mass)),
        initial_trace_errors=[float(e) for e in traces],
    )
    logger.info(
        "Transmutation residuals: heat %s, flux %s, direct solve %s",
        report.heat_residual,
        report.flux_residual,
        report.solve_discrepancy,
    )
    return report


__all__ = (
    "TransmutationReport",
    "transmute_field",
    "transmute_signal",
    "verify_transmutation",
    "transmute_tracking_pair",
)
