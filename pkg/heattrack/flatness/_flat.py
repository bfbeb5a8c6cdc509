"""
File: ./heattrack/flatness/_flat.py
Project: heattrack

This program is free software; you can redistribute it and/or modify it under the terms of the GNU General Public License as published by the Free Software Foundation; either version 2 of the License, or (at your option) any later version.
This program is distributed in the hope that it will be useful, but WITHOUT ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the GNU General Public License for more details.
You should have received a copy of the GNU General Public License along with this program; if not, write to the Free Software Foundation, Inc., 51 Franklin Street, Fifth Floor, Boston, MA 02110-1301, USA.
"""

# Internal
import math
import warnings
from typing import List, Tuple, Optional, Annotated

# External
import numpy as np
from pydantic import Field, BaseModel
from numpy.typing import NDArray, ArrayLike
from scipy.special import gammaln

# Project
from ..jets import FloatArray, JetSource
from ..grids import Signal, TimeGrid, HeatField, SpaceGrid
from ..logger import get_logger
from .._errors import (
    OrderCapError,
    TruncationWarning,
    DivergentSeriesError,
    IncompatibleTargetError,
)
from .._constants import N_MAX, N_MAX_CAP, TOL_SERIES

logger = get_logger(__name__)

# Consecutive sub-tolerance terms that end the series
_QUIET_TERMS = 3
_FLATNESS_TOL = 1e-12
# Orders tried in turn before the configured jet order is requested
_ORDER_STAGES = (16, 32)


class FlatTarget:
    """A target whose derivatives all vanish at t = 0, with Gevrey order r in [1, 2).

    Args:
        source: Anything that yields Taylor coefficients at arbitrary times
        gevrey_order: Gevrey order of the source
        n_max: Jet order the flatness series starts from
        max_order: Order the series may double up to at nodes where it has not converged
        check_flatness: Verify that every coefficient up to n_max vanishes at t = 0

    Raises:
        DivergentSeriesError: r >= 2
        IncompatibleTargetError: a derivative at t = 0 exceeds 1e-12
        OrderCapError: not 0 <= n_max <= max_order <= N_MAX_CAP

    """

    def __init__(
        self,
        source: JetSource,
        gevrey_order: float,
        *,
        n_max: int = N_MAX,
        max_order: int = N_MAX_CAP,
        check_flatness: bool = True,
    ) -> None:
        if gevrey_order >= 2.0:
            raise DivergentSeriesError(
                f"Flatness series diverges for Gevrey order {gevrey_order} >= 2"
            )
        if gevrey_order < 1.0:
            raise IncompatibleTargetError(f"Gevrey order must be >= 1, got {gevrey_order}")
        if not (0 <= n_max <= max_order <= N_MAX_CAP):
            raise OrderCapError(
                f"Need 0 <= n_max <= max_order <= {N_MAX_CAP}, got n_max={n_max},"
                f" max_order={max_order}"
            )

        self.source = source
        self.gevrey_order = float(gevrey_order)
        self.n_max = n_max
        self.max_order = max_order

        if check_flatness:
            at_zero = np.abs(source.coefficients(np.array([0.0]), n_max)[0])
            if np.any(at_zero > _FLATNESS_TOL):
                order = int(np.flatnonzero(at_zero > _FLATNESS_TOL)[0])
                raise IncompatibleTargetError(
                    f"Target is not flat at t = 0: derivative of order {order} does not vanish"
                )

    def coefficients(
        self, t: ArrayLike, order: int, *, log_scale: Optional[ArrayLike] = None
    ) -> FloatArray:
        return self.source.coefficients(t, order, log_scale=log_scale)

    def values(self, t: FloatArray) -> FloatArray:
        return self.source.values(t)

    def __repr__(self) -> str:
        return f"FlatTarget({self.source!r}, gevrey_order={self.gevrey_order!r})"


class SeriesControl(BaseModel):
    """
    Boundary control given by the truncated flatness series, with truncation diagnostics.
    """

    class Config:
        allow_mutation = False
        arbitrary_types_allowed = True

    control: Annotated[Signal, Field(description="Control v(t) at x = L")]
    target: Annotated[FlatTarget, Field(description="Flat target the series was summed for")]
    terms_used: Annotated[np.ndarray, Field(description="Series terms summed at each node")]
    term_peaks: Annotated[
        np.ndarray, Field(description="Largest |term i| over the nodes that include term i")
    ]
    truncation_residual: Annotated[
        float, Field(description="Largest last included term over all nodes")
    ]
    truncated: Annotated[
        bool, Field(description="Whether some node reached max_order before the tolerance")
    ] = False


def _log_series_weights(length: float, order: int) -> FloatArray:
    """log(L^(2i+1)·i!/(2i+1)!), the weight of the Taylor coefficient w^(i)/i! in v"""
    i = np.arange(order + 1, dtype=np.float64)
    return np.asarray((2 * i + 1) * math.log(length) + gammaln(i + 1) - gammaln(2 * i + 2))


def _order_stages(n_max: int, max_order: int) -> List[int]:
    stages = {min(stage, n_max) for stage in _ORDER_STAGES} | {n_max}
    order = n_max
    while order < max_order:
        order = min(max(2 * order, 1), max_order)
        stages.add(order)
    return sorted(stages)


def _truncate(
    terms: FloatArray, tol_series: float
) -> Tuple[NDArray[np.int64], FloatArray, NDArray[np.bool_]]:
    """Truncation index per row, the residual there and whether the rule fired"""
    partial = np.cumsum(terms, axis=1)
    small = np.abs(terms) < tol_series * np.maximum(1.0, np.abs(partial))
    quiet = small.copy()
    for lag in range(1, _QUIET_TERMS):
        quiet[:, lag:] &= small[:, :-lag]
        quiet[:, :lag] = False

    fired = np.any(quiet, axis=1)
    last = np.where(fired, np.argmax(quiet, axis=1), terms.shape[1] - 1)
    residual = np.abs(terms[np.arange(terms.shape[0]), last])
    return last, residual, fired


def _series_terms(
    target: FlatTarget, t: FloatArray, length: float, tol_series: float
) -> Tuple[FloatArray, NDArray[np.int64], FloatArray, NDArray[np.bool_]]:
    """Weighted terms L^(2i+1)/(2i+1)!·w^(i), truncation index, residual and convergence flag.

    Orders are requested in stages so that most nodes never pay for the full jet order, and
    nodes still short of the tolerance at n_max go on doubling the order up to max_order.
    """
    stages = _order_stages(target.n_max, target.max_order)
    terms = np.zeros((t.size, stages[-1] + 1))
    last = np.full(t.size, stages[-1])
    residual = np.zeros(t.size)
    fired = np.zeros(t.size, dtype=bool)
    pending = np.arange(t.size)

    for order in stages:
        if pending.size == 0:
            break
        if order > target.n_max:
            logger.info("Series order raised to %d at %d nodes", order, pending.size)
        chunk = target.coefficients(
            t[pending], order, log_scale=_log_series_weights(length, order)
        )
        stop, res, done = _truncate(chunk, tol_series)

        # The last stage settles every remaining node, converged or not
        settle = np.ones_like(done) if order == stages[-1] else done
        finished = pending[settle]
        terms[finished, : order + 1] = chunk[settle]
        last[finished] = stop[settle]
        residual[finished] = res[settle]
        fired[finished] = done[settle]
        logger.debug(
            "Series at order %d: %d of %d nodes settled", order, finished.size, pending.size
        )
        pending = pending[~settle]

    width = int(np.max(last)) + 1 if t.size else 1
    return terms[:, :width], last, residual, fired


def flat_control(
    target: FlatTarget, length: float, tgrid: TimeGrid, *, tol_series: float = TOL_SERIES
) -> SeriesControl:
    """Control v(t) = Σ L^(2i+1)/(2i+1)!·w^(i)(t) making ∂_x y(·, 0) track a flat target.

    At each node the sum stops after three consecutive terms below
    tol_series·max(1, |partial sum|). Nodes that have not converged at the target's n_max
    are summed again with the order doubled, up to its max_order, where they are truncated.

    Args:
        target: Flat target of Gevrey order below 2
        length: Domain length L
        tgrid: Time grid of the control

    Raises:
        DivergentSeriesError: Gevrey order >= 2

    Returns:
        Control with per-node term counts, per-order term peaks and the truncation residual

    """
    if target.gevrey_order >= 2.0:
        raise DivergentSeriesError("Flatness series diverges for Gevrey order >= 2")

    terms, last, residual, fired = _series_terms(target, tgrid.nodes, length, tol_series)
    included = np.arange(terms.shape[1])[None, :] <= last[:, None]
    kept = np.where(included, terms, 0.0)
    control = np.sum(kept, axis=1)

    truncated = not bool(np.all(fired))
    worst = float(np.max(residual)) if residual.size else 0.0
    if truncated:
        warnings.warn(
            f"Flatness series reached order {target.max_order} at {int(np.sum(~fired))}"
            f" nodes, residual {worst:.3g}",
            TruncationWarning,
        )

    logger.info("Flatness control: up to %d terms, residual %s", int(np.max(last)) + 1, worst)
    return SeriesControl(
        control=Signal(tgrid, control),
        target=target,
        terms_used=last + 1,
        term_peaks=np.max(np.abs(kept), axis=0),
        truncation_residual=worst,
        truncated=truncated,
    )


def series_state(
    target: FlatTarget, xgrid: SpaceGrid, tgrid: TimeGrid, *, tol_series: float = TOL_SERIES
) -> HeatField:
    """Heat state y(t, x) = Σ x^(2i+1)/(2i+1)!·w^(i)(t), truncated as in ``flat_control``.

    y(t, 0) = 0 and ∂_x y(t, 0) = w(t) hold by construction.

    Raises:
        DivergentSeriesError: Gevrey order >= 2

    """
    if target.gevrey_order >= 2.0:
        raise DivergentSeriesError("Flatness series diverges for Gevrey order >= 2")

    terms, last, _, fired = _series_terms(target, tgrid.nodes, xgrid.length, tol_series)
    if not np.all(fired):
        warnings.warn(
            f"Series state reached order {target.max_order} at {int(np.sum(~fired))} nodes",
            TruncationWarning,
        )

    # Terms carry L^(2i+1), so x enters through (x/L)^(2i+1) <= 1
    i = np.arange(terms.shape[1])
    included = i[None, :] <= last[:, None]
    ratio = xgrid.nodes[1:] / xgrid.length
    with np.errstate(under="ignore"):
        weights = np.power(ratio[:, None], 2 * i[None, :] + 1)

    values = np.zeros((tgrid.n_steps + 1, xgrid.n_cells + 1))
    values[:, 1:] = np.where(included, terms, 0.0) @ weights.T
    return HeatField(tgrid, xgrid, values)


__all__ = (
    "FlatTarget",
    "SeriesControl",
    "flat_control",
    "series_state",
)
