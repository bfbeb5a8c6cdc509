"""
File: ./heattrack/flatness/_cost.py
Project: heattrack

This program is free software; you can redistribute it and/or modify it under the terms of the GNU General Public License as published by the Free Software Foundation; either version 2 of the License, or (at your option) any later version.
This program is distributed in the hope that it will be useful, but WITHOUT ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the GNU General Public License for more details.
You should have received a copy of the GNU General Public License along with this program; if not, write to the Free Software Foundation, Inc., 51 Franklin Street, Fifth Floor, Boston, MA 02110-1301, USA.
"""

# Internal
import math
from typing import List, Tuple, Union, Optional, Annotated, NamedTuple
from functools import lru_cache

# External
import numpy as np
from pydantic import Field, BaseModel
from numpy.typing import ArrayLike
from scipy.special import gammaln

# Project
from ._flat import FlatTarget, SeriesControl, flat_control
from ._targets import Target, ZeroTarget, SampledTarget
from ..jets import FloatArray, GevreyBump, MollifiedTarget, normalize_bump
from ..grids import Signal, TimeGrid
from ..logger import get_logger
from .._errors import OutOfRangeError, IncompatibleTargetError
from ..special import gs_eval
from .._constants import N_MAX, N_MAX_CAP, TOL_SERIES

logger = get_logger(__name__)

# Largest |w(0)| accepted as w(0) = 0
_START_TOL = 1e-10


class FlatTargetChoice(NamedTuple):
    """Outcome of ``make_flat_target``: ``delta`` is None for the zero target"""

    target: FlatTarget
    delta: Optional[float]
    clamped: bool


class CostReport(BaseModel):
    """
    Measured control size next to the G_s bound chain for one tolerance eps.
    """

    class Config:
        allow_mutation = False

    eps: Annotated[float, Field(description="Tracking tolerance ε")]
    delta: Annotated[float, Field(description="Mollification width δ, 0 for the zero target")]
    v_sup_norm: Annotated[float, Field(description="Measured sup norm of the control")]
    gs_argument: Annotated[float, Field(description="C·‖w‖_{W^{1,∞}}/ε")]
    bound_value: Annotated[
        float, Field(description="max(1, L)·G_s(argument)·‖w‖_{W^{1,∞}}")
    ]
    log_bound_value: Annotated[float, Field(description="Natural log of bound_value")]
    fitted_C: Annotated[float, Field(description="Machine-fitted derivative growth constant")]
    terms_used_max: Annotated[int, Field(description="Most series terms used at any node")]
    truncation_residual: Annotated[float, Field(description="Largest series residual")]
    s: Annotated[float, Field(description="Exponent s, bump order 2 - s")]
    w1inf_norm: Annotated[float, Field(description="‖w‖_{W^{1,∞}(0,T)}")]
    length: Annotated[float, Field(description="Domain length L")]
    t_end: Annotated[float, Field(description="Horizon T")]
    delta_clamped: Annotated[bool, Field(description="δ was larger than T and clamped")] = False
    truncated: Annotated[
        bool, Field(description="The series reached its order cap before converging")
    ] = False

    @property
    def bound_holds(self) -> bool:
        """Whether log|v| <= log bound, never for a truncated series"""
        if self.truncated:
            return False
        if self.v_sup_norm == 0.0:
            return True
        slack = 1e-12 * max(1.0, abs(self.log_bound_value))
        return math.log(self.v_sup_norm) <= self.log_bound_value + slack


@lru_cache(maxsize=16)
def _bump_for(s: float) -> GevreyBump:
    return normalize_bump(2.0 - s)


def _as_target(base: Union[Signal, Target]) -> Target:
    return SampledTarget(base) if isinstance(base, Signal) else base


def make_flat_target(
    base: Union[Signal, Target],
    s: float,
    eps: float,
    *,
    t_end: Optional[float] = None,
    n_max: int = N_MAX,
    max_order: int = N_MAX_CAP,
) -> FlatTargetChoice:
    """Mollify a target w with w(0) = 0 into a flat Gevrey target of order 2 - s.

    δ = ε/‖w‖_{W^{1,∞}}, clamped to the horizon when larger.

    Args:
        base: Closed-form target or sampled signal
        s: Exponent in (0, 1)
        eps: Tracking tolerance, positive
        t_end: Horizon, taken from the signal grid when base is a Signal
        n_max: Jet order the flatness series starts from
        max_order: Jet order the flatness series may grow to

    Raises:
        OutOfRangeError: s outside (0, 1), eps not positive, or no horizon
        IncompatibleTargetError: |w(0)| > 1e-10
        OrderCapError: not 0 <= n_max <= max_order <= N_MAX_CAP

    Returns:
        Flat target, δ (None for the zero target) and whether δ was clamped

    """
    if not (0.0 < s < 1.0):
        raise OutOfRangeError(f"s must lie in (0, 1), got {s}")
    if not eps > 0.0:
        raise OutOfRangeError(f"eps must be positive, got {eps}")

    if isinstance(base, Signal):
        t_end = base.grid.t_end if t_end is None else t_end
    if t_end is None:
        raise OutOfRangeError("t_end is required for a closed-form target")

    target = _as_target(base)
    start = float(target.values(np.array([0.0]))[0])
    if abs(start) > _START_TOL:
        raise IncompatibleTargetError(f"Target must satisfy w(0) = 0, got w(0) = {start:.3g}")

    gevrey_order = 2.0 - s
    norm = target.w1inf_norm(t_end)
    if norm == 0.0:
        logger.info("Zero target: nothing to mollify")
        flat = FlatTarget(ZeroTarget(), gevrey_order, n_max=n_max, max_order=max_order)
        return FlatTargetChoice(flat, None, False)

    delta = eps / norm
    clamped = delta > t_end
    if clamped:
        logger.warning("delta=%s exceeds the horizon and is clamped to %s", delta, t_end)
        delta = t_end

    mollified = MollifiedTarget(target, delta, _bump_for(s), t_end=t_end, n_max=max_order)
    logger.info("Mollified target: r=%s, delta=%s", gevrey_order, delta)
    flat = FlatTarget(mollified, gevrey_order, n_max=n_max, max_order=max_order)
    return FlatTargetChoice(flat, delta, clamped)


def calibrate_cost_constant(
    derivatives: ArrayLike, delta: float, s: float, length: float, w_norm: float
) -> float:
    """Smallest C with L^(2i+1)·‖w_δ^(i)‖ <= (C/δ)^i·(i!)^(2-s)·‖w‖ for 1 <= i <= I.

    Args:
        derivatives: w_δ^(i) sampled over time, shape (samples, I + 1)
        delta: Mollification width
        s: Exponent in (0, 1)
        length: Domain length L
        w_norm: ‖w‖_{W^{1,∞}}

    Returns:
        The fitted constant, 0 when every derivative vanishes

    """
    table = np.atleast_2d(np.asarray(derivatives, dtype=np.float64))
    peaks = np.max(np.abs(table[:, 1:]), axis=0)
    i = np.arange(1, table.shape[1], dtype=np.float64)
    with np.errstate(divide="ignore"):
        log_peaks = (2 * i + 1) * math.log(length) + np.log(peaks)
    return _fit_constant(log_peaks, delta, s, w_norm)


def _fit_constant(log_peaks: FloatArray, delta: float, s: float, w_norm: float) -> float:
    """Largest δ·(P_i/((i!)^(2-s)·‖w‖))^(1/i) for i >= 1, given log P_i in log_peaks"""
    i = np.arange(1, log_peaks.size + 1, dtype=np.float64)
    nonzero = np.isfinite(log_peaks)
    if not np.any(nonzero) or w_norm == 0.0:
        return 0.0

    log_c = math.log(delta) + (log_peaks - math.log(w_norm) - (2.0 - s) * gammaln(i + 1)) / i
    return float(np.exp(np.max(log_c[nonzero])))


def _constant_from_series(series: SeriesControl, delta: float, s: float, w_norm: float) -> float:
    """The constant fitted from the peaks of the summed terms L^(2i+1)/(2i+1)!·w_δ^(i)"""
    i = np.arange(1, series.term_peaks.size, dtype=np.float64)
    with np.errstate(divide="ignore"):
        log_peaks = np.log(series.term_peaks[1:]) + gammaln(2 * i + 2)
    return _fit_constant(log_peaks, delta, s, w_norm)


def cost_chain_check(C: float, delta: float, s: float, length: float, i_max: int) -> List[bool]:
    """Per-term check that (C/δ)^i (i!)^(2-s) L^(2i+1)/(2i+1)! <= (C'/δ)^i/(i!)^s.

    C' = C·max(1, L)^3 absorbs the powers of L. Entry i - 1 holds the result for term i.

    Raises:
        OutOfRangeError: i_max below 1

    """
    if i_max < 1:
        raise OutOfRangeError(f"i_max must be at least 1, got {i_max}")

    i = np.arange(1, i_max + 1, dtype=np.float64)
    absorbed = C * max(1.0, length) ** 3
    log_lhs = (
        i * math.log(C / delta)
        + (2.0 - s) * gammaln(i + 1)
        + (2 * i + 1) * math.log(length)
        - gammaln(2 * i + 2)
    )
    log_rhs = i * math.log(absorbed / delta) - s * gammaln(i + 1)
    return [bool(ok) for ok in log_lhs <= log_rhs + 1e-12 * np.abs(log_rhs)]


def _exp_or_inf(log_value: float) -> float:
    return math.exp(log_value) if log_value < 700.0 else math.inf


def _log_bound(s: float, argument: float, length: float, w_norm: float) -> float:
    return gs_eval(s, argument).log_value + math.log(max(1.0, length) * w_norm)


def approximate_tracking(
    base: Union[Signal, Target],
    s: float,
    eps: float,
    length: float,
    tgrid: TimeGrid,
    *,
    fitted_C: Optional[float] = None,
    n_max: int = N_MAX,
    max_order: int = N_MAX_CAP,
    tol_series: float = TOL_SERIES,
) -> Tuple[SeriesControl, CostReport]:
    """Mollify, then steer the flux with the flatness series, and bound the control size.

    Args:
        base: Target with w(0) = 0
        s: Exponent in (0, 1)
        eps: Tracking tolerance
        length: Domain length L
        tgrid: Time grid of the control
        fitted_C: Growth constant to report against; calibrated from the summed terms when
            omitted
        n_max: Jet order the series starts from
        max_order: Jet order the series may grow to before it is reported truncated

    Returns:
        The control and its cost report. A truncated series never satisfies the bound.

    """
    choice = make_flat_target(base, s, eps, t_end=tgrid.t_end, n_max=n_max, max_order=max_order)
    series = flat_control(choice.target, length, tgrid, tol_series=tol_series)
    w_norm = _as_target(base).w1inf_norm(tgrid.t_end)
    v_sup = float(np.max(np.abs(series.control.values)))
    terms_max = int(np.max(series.terms_used))

    if choice.delta is None:
        return (
            series,
            CostReport(
                eps=eps,
                delta=0.0,
                v_sup_norm=v_sup,
                gs_argument=0.0,
                bound_value=0.0,
                log_bound_value=-math.inf,
                fitted_C=0.0,
                terms_used_max=terms_max,
                truncation_residual=series.truncation_residual,
                s=s,
                w1inf_norm=0.0,
                length=length,
                t_end=tgrid.t_end,
                truncated=series.truncated,
            ),
        )

    if fitted_C is None:
        fitted_C = _constant_from_series(series, choice.delta, s, w_norm)

    argument = fitted_C / choice.delta
    log_bound = _log_bound(s, argument, length, w_norm)
    report = CostReport(
        eps=eps,
        delta=choice.delta,
        v_sup_norm=v_sup,
        gs_argument=argument,
        bound_value=_exp_or_inf(log_bound),
        log_bound_value=log_bound,
        fitted_C=fitted_C,
        terms_used_max=terms_max,
        truncation_residual=series.truncation_residual,
        s=s,
        w1inf_norm=w_norm,
        length=length,
        t_end=tgrid.t_end,
        delta_clamped=choice.clamped,
        truncated=series.truncated,
    )
    if series.truncated:
        logger.warning("eps=%s: series truncated, the bound is not certified", eps)
    logger.info(
        "eps=%s: |v|=%s, bound exp(%s), C=%s", eps, v_sup, log_bound, fitted_C
    )
    return series, report


def with_cost_constant(report: CostReport, fitted_C: float) -> CostReport:
    """Re-evaluate the bound of a cost report against another growth constant.

    A sweep over several tolerances reports every row against one common constant, the
    largest one fitted along the sweep. Reports of the zero target are returned unchanged.

    Raises:
        OutOfRangeError: fitted_C negative

    """
    if fitted_C < 0:
        raise OutOfRangeError(f"fitted_C must be non-negative, got {fitted_C}")
    if report.delta == 0.0:
        return report

    argument = fitted_C / report.delta
    log_bound = _log_bound(report.s, argument, report.length, report.w1inf_norm)
    return report.copy(
        update={
            "gs_argument": argument,
            "bound_value": _exp_or_inf(log_bound),
            "log_bound_value": log_bound,
            "fitted_C": fitted_C,
        }
    )


__all__ = (
    "CostReport",
    "with_cost_constant",
    "FlatTargetChoice",
    "make_flat_target",
    "cost_chain_check",
    "approximate_tracking",
    "calibrate_cost_constant",
)
