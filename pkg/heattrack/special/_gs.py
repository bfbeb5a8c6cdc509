"""
File: ./heattrack/special/_gs.py
Project: heattrack

This program is free software; you can redistribute it and/or modify it under the terms of the GNU General Public License as published by the Free Software Foundation; either version 2 of the License, or (at your option) any later version.
This program is distributed in the hope that it will be useful, but WITHOUT ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the GNU General Public License for more details.
You should have received a copy of the GNU General Public License along with this program; if not, write to the Free Software Foundation, Inc., 51 Franklin Street, Fifth Floor, Boston, MA 02110-1301, USA.
"""

# Internal
import math
from typing import Tuple, Callable, Annotated

# External
import numpy as np
from pydantic import Field, BaseModel
from numpy.typing import NDArray, ArrayLike
from scipy.special import gammaln
from scipy.optimize import brentq

# Project
from ..logger import get_logger
from .._errors import OutOfRangeError, OutOfDomainError
from .._constants import GS_TERM_RTOL, GS_QUIET_TERMS

logger = get_logger(__name__)

_BLOCK = 4096
_LOG_TERM_RTOL = math.log(GS_TERM_RTOL)


class GsEvaluation(BaseModel):
    """
    Value of G_s(x) = Σ x^i / (i!)^s with its truncation diagnostics.
    """

    class Config:
        allow_mutation = False

    s: Annotated[float, Field(description="Series exponent s")]
    x: Annotated[float, Field(description="Evaluation point")]
    value: Annotated[float, Field(description="G_s(x), inf when beyond the double range")]
    log_value: Annotated[float, Field(description="Natural log of G_s(x)")]
    terms_used: Annotated[int, Field(description="Number of series terms summed")]
    tail_bound: Annotated[float, Field(description="Geometric estimate of the omitted tail")]


def _exp(log_value: float) -> float:
    try:
        return math.exp(log_value)
    except OverflowError:
        return math.inf


def gs_log_terms(s: float, x: float, indices: ArrayLike) -> NDArray[np.float64]:
    """log(x^i / (i!)^s) for the given indices"""
    i = np.asarray(indices, dtype=np.float64)
    if x == 0:
        return np.where(i == 0, 0.0, -np.inf)
    return np.asarray(i * math.log(x) - s * gammaln(i + 1.0))


def _sum_log_series(
    log_terms: Callable[[NDArray[np.float64]], NDArray[np.float64]], peak: float
) -> Tuple[float, int, float]:
    """Sum a positive series given its log terms.

    Stops once GS_QUIET_TERMS consecutive terms are each below GS_TERM_RTOL times the running
    sum, counting only terms past ``peak``.

    Returns:
        log of the sum, number of terms used, log of the geometric tail estimate

    """
    log_sum = -np.inf
    quiet = 0
    start = 0
    previous_last = -np.inf
    while True:
        index = np.arange(start, start + _BLOCK, dtype=np.float64)
        terms = log_terms(index)
        running = np.logaddexp(log_sum, np.logaddexp.accumulate(terms))
        calm = (terms <= _LOG_TERM_RTOL + running) & (index > peak)

        positions = np.arange(_BLOCK)
        last_loud = np.maximum.accumulate(np.where(calm, -1, positions))
        run = np.where(last_loud < 0, positions + 1 + quiet, positions - last_loud)
        stops = np.flatnonzero(run >= GS_QUIET_TERMS)

        if stops.size:
            stop = int(stops[0])
            log_sum = float(running[stop])
            last = float(terms[stop])
            before = float(terms[stop - 1]) if stop > 0 else previous_last
            with np.errstate(invalid="ignore"):
                ratio = math.exp(last - before) if np.isfinite(before) else 0.0
            log_tail = last - math.log1p(-ratio) if ratio < 1.0 else math.inf
            return log_sum, start + stop + 1, log_tail

        log_sum = float(running[-1])
        quiet = int(run[-1])
        previous_last = float(terms[-1])
        start += _BLOCK


def gs_eval(s: float, x: float) -> GsEvaluation:
    """Evaluate G_s(x) = Σ x^i / (i!)^s by log-space summation.

    Args:
        s: Exponent, 0 < s <= 1
        x: Evaluation point, x >= 0

    Raises:
        OutOfRangeError: s outside (0, 1] or x negative

    Returns:
        Value, its logarithm and truncation diagnostics

    """
    if not (0.0 < s <= 1.0):
        raise OutOfRangeError(f"gs_eval needs 0 < s <= 1, got s={s}")
    if not (math.isfinite(x) and x >= 0.0):
        raise OutOfRangeError(f"gs_eval needs a finite x >= 0, got x={x}")

    if x == 0.0:
        return GsEvaluation(s=s, x=x, value=1.0, log_value=0.0, terms_used=1, tail_bound=0.0)

    peak = math.e * x ** (1.0 / s)
    log_value, terms_used, log_tail = _sum_log_series(lambda i: gs_log_terms(s, x, i), peak)
    logger.debug("G_%s(%s): %d terms, log value %s", s, x, terms_used, log_value)
    return GsEvaluation(
        s=s,
        x=x,
        value=_exp(log_value),
        log_value=log_value,
        terms_used=terms_used,
        tail_bound=_exp(log_tail),
    )


def gs_log_derivative(s: float, x: float) -> float:
    """log G_s'(x) from the term-wise series Σ (i+1)^(1-s) x^i / (i!)^s"""
    if x == 0.0:
        return 0.0

    def log_terms(i: NDArray[np.float64]) -> NDArray[np.float64]:
        return gs_log_terms(s, x, i) + (1.0 - s) * np.log1p(i)

    log_value, _, _ = _sum_log_series(log_terms, math.e * x ** (1.0 / s) + 1.0)
    return log_value


def log_gs_upper_bound(s: float, x: float, C: float) -> float:
    return math.log(C) + C * x ** (1.0 / s)


def gs_upper_bound(s: float, x: float, C: float) -> float:
    """C·exp(C·x^(1/s))"""
    return _exp(log_gs_upper_bound(s, x, C))


def log_gs_lower_bound(s: float, x: float) -> float:
    return s * x ** (1.0 / s)


def gs_lower_bound(s: float, x: float) -> float:
    """exp(s·x^(1/s)), a lower bound of G_s(x) for 0 < s < 1"""
    return _exp(log_gs_lower_bound(s, x))


def gs_closed_bound_s_ge_1(s: float, x: float) -> float:
    """exp(s·x^(1/s)), an upper bound of G_s(x) for s >= 1.

    Raises:
        OutOfRangeError: s < 1

    """
    if s < 1.0:
        raise OutOfRangeError(f"Closed bound holds for s >= 1, got s={s}")
    return _exp(s * x ** (1.0 / s))


def fit_upper_constant(s: float, xs: ArrayLike) -> float:
    """Smallest C >= 1 with log C + C·x^(1/s) >= log G_s(x) at every sample.

    Raises:
        OutOfRangeError: s outside (0, 1)

    """
    if not (0.0 < s < 1.0):
        raise OutOfRangeError(f"Upper bound constant is fitted for 0 < s < 1, got s={s}")

    fitted = 1.0
    for x in np.asarray(xs, dtype=np.float64).ravel():
        y = float(x) ** (1.0 / s)
        log_g = gs_eval(s, float(x)).log_value

        def gap(c: float) -> float:
            return math.log(c) + c * y - log_g

        if gap(fitted) >= 0.0:
            continue
        root = brentq(gap, fitted, log_g / y + 1.0, xtol=1e-14, rtol=1e-14)
        fitted = max(fitted, float(root))

    # Nudge past the root so the bound also holds after rounding
    fitted *= 1.0 + 1e-12
    logger.debug("Fitted G_%s upper constant C=%s", s, fitted)
    return fitted


def gs_derivative_ratio_check(s: float, x_samples: ArrayLike) -> float:
    """max over samples of G_s'(x) / (x^((1-s)/s)·G_s(x)).

    Raises:
        OutOfRangeError: s outside (0, 1)
        OutOfDomainError: a sample below 1

    """
    if not (0.0 < s < 1.0):
        raise OutOfRangeError(f"Derivative ratio is stated for 0 < s < 1, got s={s}")

    samples = np.asarray(x_samples, dtype=np.float64).ravel()
    if samples.size == 0 or np.any(samples < 1.0):
        raise OutOfDomainError("Derivative ratio is only stated for x >= 1")

    ratios = [
        math.exp(
            gs_log_derivative(s, float(x))
            - (1.0 - s) / s * math.log(float(x))
            - gs_eval(s, float(x)).log_value
        )
        for x in samples
    ]
    return max(ratios)


__all__ = (
    "GsEvaluation",
    "gs_eval",
    "gs_log_terms",
    "gs_lower_bound",
    "gs_upper_bound",
    "gs_log_derivative",
    "fit_upper_constant",
    "log_gs_lower_bound",
    "log_gs_upper_bound",
    "gs_closed_bound_s_ge_1",
    "gs_derivative_ratio_check",
)
