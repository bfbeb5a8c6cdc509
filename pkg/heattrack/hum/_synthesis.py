"""
File: ./heattrack/hum/_synthesis.py
Project: heattrack

This program is free software; you can redistribute it and/or modify it under the terms of the GNU General Public License as published by the Free Software Foundation; either version 2 of the License, or (at your option) any later version.
This program is distributed in the hope that it will be useful, but WITHOUT ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the GNU General Public License for more details.
You should have received a copy of the GNU General Public License along with this program; if not, write to the Free Software Foundation, Inc., 51 Franklin Street, Fifth Floor, Boston, MA 02110-1301, USA.
"""

# Internal
import math
from typing import Tuple, Optional, Annotated

# External
from pydantic import Field, BaseModel

# Project
from ._dual import HUMState, DualConfig, minimize_J
from ..grids import Signal, signal_norm
from ..logger import get_logger
from ..solvers import closed_loop_flux

logger = get_logger(__name__)

# Discretization slack allowed on top of ε in the closed-loop check
TOL_DISC = 5e-3


class HUMReport(BaseModel):
    """
    Closed-loop check of the control synthesized by the dual minimization.
    """

    class Config:
        allow_mutation = False

    eps: Annotated[float, Field(description="Tracking slack ε")]
    iterations: Annotated[int, Field(description="Iterations of the minimization")]
    converged: Annotated[bool, Field(description="Whether grad_tol was reached")]
    tracking_error_l2: Annotated[float, Field(description="‖E y - w‖ in L²(0, T)")]
    f_norm: Annotated[float, Field(description="‖f‖ in L²(0, T)")]
    v_norm: Annotated[float, Field(description="‖v‖ in L²(0, T)")]
    grad_norm: Annotated[float, Field(description="Final ‖∇J‖")]
    smoothing_sigma: Annotated[float, Field(description="σ used for the ε term")]
    cg_condition_estimate: Annotated[
        Optional[float], Field(description="Ritz value ratio, ε = 0 only")
    ] = None
    within_tolerance: Annotated[
        bool, Field(description="tracking_error_l2 <= ε + tol_disc")
    ] = False


def synthesize_and_verify(
    w: Signal, cfg: DualConfig, *, tol_disc: float = TOL_DISC
) -> Tuple[HUMState, HUMReport]:
    """Minimize J, then run the control v = B*f through a fresh forward solve.

    Args:
        w: Target for the outward flux E y = -∂_x y(·, 0)
        cfg: Dual minimization settings
        tol_disc: Slack on top of ε for the closed-loop check

    Returns:
        The minimization state and its closed-loop report

    """
    state = minimize_J(w, cfg)
    observed = closed_loop_flux(state.Bstar_p, cfg.xgrid)
    error = Signal(cfg.tgrid, -observed.values - w.values)
    tracking_error = signal_norm(error, "l2")

    report = HUMReport(
        eps=cfg.eps,
        iterations=state.iterations,
        converged=state.converged,
        tracking_error_l2=tracking_error,
        f_norm=signal_norm(state.f, "l2"),
        v_norm=signal_norm(state.Bstar_p, "l2"),
        grad_norm=state.grad_norm,
        smoothing_sigma=state.smoothing_sigma,
        cg_condition_estimate=(
            None
            if state.cg_condition_estimate is None or math.isinf(state.cg_condition_estimate)
            else state.cg_condition_estimate
        ),
        within_tolerance=tracking_error <= cfg.eps + tol_disc,
    )
    logger.info(
        "HUM closed loop eps=%s: |Ey - w|=%s, |v|=%s", cfg.eps, tracking_error, report.v_norm
    )
    return state, report


__all__ = ("TOL_DISC", "HUMReport", "synthesize_and_verify")
