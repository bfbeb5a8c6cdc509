"""
File: ./heattrack/transmutation/_kernel.py
Project: heattrack

This program is free software; you can redistribute it and/or modify it under the terms of the GNU General Public License as published by the Free Software Foundation; either version 2 of the License, or (at your option) any later version.
This program is distributed in the hope that it will be useful, but WITHOUT ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the GNU General Public License for more details.
You should have received a copy of the GNU General Public License along with this program; if not, write to the Free Software Foundation, Inc., 51 Franklin Street, Fifth Floor, Boston, MA 02110-1301, USA.
"""

# Internal
import math
from typing import Any, Dict, Tuple, Annotated

# External
import numpy as np
from pydantic import Field, BaseModel, root_validator
from numpy.typing import NDArray, ArrayLike

# Project
from ..grids import TimeGrid, SpaceGrid, SymmetricTimeGrid
from .._errors import OutOfRangeError, KernelDomainError
from .._constants import QUAD_NODES, TOL_KERNEL
from .._quadrature import composite_gauss_legendre

FloatArray = NDArray[np.float64]


def kernel_eval(t: ArrayLike, s: ArrayLike) -> FloatArray:
    """Heat kernel k(t, s) = exp(-s²/(4t))/sqrt(4πt), broadcast over t and s.

    Raises:
        KernelDomainError: some t <= 0

    """
    t = np.asarray(t, dtype=np.float64)
    s = np.asarray(s, dtype=np.float64)
    if np.any(~(t > 0)):
        raise KernelDomainError("Heat kernel is only a function for t > 0")
    with np.errstate(under="ignore"):
        return np.asarray(np.exp(-(s**2) / (4.0 * t) - 0.5 * np.log(4.0 * math.pi * t)))


def truncation_radius(t: ArrayLike, tol_k: float = TOL_KERNEL) -> FloatArray:
    """S(t) = 2·sqrt(t·ln(1/tol_k))"""
    return np.asarray(2.0 * np.sqrt(np.asarray(t, dtype=np.float64) * math.log(1.0 / tol_k)))


def _panel_count(tol_k: float) -> int:
    # Panels of width <= sqrt(t) over [-S(t), S(t)], a count independent of t
    return max(1, math.ceil(4.0 * math.sqrt(math.log(1.0 / tol_k)) - 1e-12))


class TransmutationPlan(BaseModel):
    """
    Quadrature plan turning wave data over pseudo-time s into heat data over t.
    """

    class Config:
        allow_mutation = False

    tgrid: Annotated[TimeGrid, Field(description="Heat time grid")]
    sgrid: Annotated[
        SymmetricTimeGrid, Field(description="Wave pseudo-time grid covering [-S(T), S(T)]")
    ]
    tol_k: Annotated[
        float, Field(description="Kernel tail mass left out on each side", gt=0, lt=0.5)
    ] = TOL_KERNEL
    quad_nodes: Annotated[
        int, Field(description="Gauss-Legendre nodes per panel", ge=2)
    ] = QUAD_NODES

    @root_validator(skip_on_failure=True)
    def _covering(cls, values: Dict[str, Any]) -> Dict[str, Any]:
        radius = float(truncation_radius(values["tgrid"].t_end, values["tol_k"]))
        if values["sgrid"].half_width < radius * (1.0 - 1e-12):
            raise ValueError(
                f"sgrid half width {values['sgrid'].half_width:.6g} does not cover"
                f" S(T) = {radius:.6g}"
            )
        return values

    @classmethod
    def for_grids(
        cls,
        tgrid: TimeGrid,
        xgrid: SpaceGrid,
        *,
        tol_k: float = TOL_KERNEL,
        quad_nodes: int = QUAD_NODES,
    ) -> "TransmutationPlan":
        """Plan whose pseudo-time step equals dx, the leapfrog stability limit"""
        radius = float(truncation_radius(tgrid.t_end, tol_k))
        sgrid = SymmetricTimeGrid.covering(radius, xgrid.dx)
        return cls(tgrid=tgrid, sgrid=sgrid, tol_k=tol_k, quad_nodes=quad_nodes)

    @property
    def panels(self) -> int:
        return _panel_count(self.tol_k)

    @property
    def radius(self) -> float:
        return float(truncation_radius(self.tgrid.t_end, self.tol_k))

    def unit_rule(self) -> Tuple[FloatArray, FloatArray]:
        """Composite rule on [-1, 1], scaled by S(t) at each heat time"""
        return composite_gauss_legendre(-1.0, 1.0, self.panels, self.quad_nodes)

    def rules(self, t: ArrayLike) -> Tuple[FloatArray, FloatArray]:
        """Quadrature nodes s and weights k(t, s)·ds at each positive time, shape (M, Q)"""
        t = np.atleast_1d(np.asarray(t, dtype=np.float64))
        unit, unit_weights = self.unit_rule()
        radius = truncation_radius(t, self.tol_k)[:, None]
        s = radius * unit[None, :]
        return s, radius * unit_weights[None, :] * kernel_eval(t[:, None], s)


def kernel_moment(t: float, order: int, plan: TransmutationPlan) -> float:
    """∫ s^order k(t, s) ds over the truncation window of time t.

    Raises:
        OutOfRangeError: order below 0
        KernelDomainError: t <= 0

    """
    if order < 0:
        raise OutOfRangeError(f"Moment order must be non-negative, got {order}")
    s, weights = plan.rules(np.array([t]))
    return float(np.sum(weights[0] * s[0] ** order))


def kernel_mass(plan: TransmutationPlan) -> FloatArray:
    """Truncated kernel mass at every positive heat time node"""
    _, weights = plan.rules(plan.tgrid.nodes[1:])
    return np.asarray(np.sum(weights, axis=1))


__all__ = (
    "TransmutationPlan",
    "kernel_eval",
    "kernel_mass",
    "kernel_moment",
    "truncation_radius",
)
