"""
File: ./heattrack/jets/_mollifier.py
Project: heattrack

This program is free software; you can redistribute it and/or modify it under the terms of the GNU General Public License as published by the Free Software Foundation; either version 2 of the License, or (at your option) any later version.
This program is distributed in the hope that it will be useful, but WITHOUT ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the GNU General Public License for more details.
You should have received a copy of the GNU General Public License along with this program; if not, write to the Free Software Foundation, Inc., 51 Franklin Street, Fifth Floor, Boston, MA 02110-1301, USA.
"""

# Internal
import warnings
from typing import Dict, Tuple, Union, Callable, Optional, Protocol

# External
import numpy as np
from numpy.typing import ArrayLike
from scipy.special import gammaln
from scipy.interpolate import CubicSpline

# Project
from ._bump import GevreyBump, bump_coefficients
from ._series import FloatArray
from ..grids import Signal
from ..logger import get_logger
from .._errors import OrderCapError, OutOfRangeError, TruncationWarning
from .._constants import (
    N_MAX,
    N_MAX_CAP,
    QUAD_NODES,
    MOLLIFIER_RTOL,
    MOLLIFIER_MAX_PANELS,
    MOLLIFIER_MIN_PANELS,
)
from .._quadrature import composite_gauss_legendre

logger = get_logger(__name__)

# Upper bound on jets evaluated at once (rows × quadrature nodes)
_WORK_CHUNK = 16384


class TimeFunction(Protocol):
    """Anything that can be sampled at an array of times"""

    def values(self, t: FloatArray) -> FloatArray:
        ...


class JetSource(TimeFunction, Protocol):
    """A time function with Taylor coefficients f^(k)(t)/k! at arbitrary times.

    ``log_scale``, of length order + 1, asks for the k-th coefficient multiplied by
    exp(log_scale[k]).
    """

    def coefficients(
        self, t: ArrayLike, order: int, *, log_scale: Optional[ArrayLike] = None
    ) -> FloatArray:
        ...


class MollifiedTarget:
    """w_δ = w̃ ∗ ξ_δ, where w̃ extends the base target by zero for t < 0.

    Args:
        base: Sampled signal (cubic-spline reconstruction) or closed-form target
        delta: Mollification width δ, 0 < δ <= t_end
        bump: Unit-mass cut-off ξ
        t_end: Horizon, taken from the signal grid when base is a Signal
        n_max: Highest derivative order that may be requested

    """

    def __init__(
        self,
        base: Union[Signal, TimeFunction],
        delta: float,
        bump: GevreyBump,
        *,
        t_end: Optional[float] = None,
        n_max: int = N_MAX,
        rtol: float = MOLLIFIER_RTOL,
    ) -> None:
        if isinstance(base, Signal):
            spline = CubicSpline(base.nodes, base.values)
            self._evaluate: Callable[[FloatArray], FloatArray] = lambda t: np.asarray(spline(t))
            t_end = base.grid.t_end if t_end is None else t_end
        else:
            self._evaluate = base.values
            if t_end is None:
                raise OutOfRangeError("t_end is required for a closed-form base target")

        if not (0.0 < delta <= t_end * (1.0 + 1e-12)):
            raise OutOfRangeError(f"delta must lie in (0, {t_end}], got {delta}")
        if not (0 <= n_max <= N_MAX_CAP):
            raise OrderCapError(f"n_max must lie in [0, {N_MAX_CAP}], got {n_max}")

        self.base = base
        self.delta = float(delta)
        self.bump = bump
        self.t_end = float(t_end)
        self.n_max = n_max
        self.rtol = rtol
        self._tables: Dict[Tuple[int, int, bytes], Tuple[FloatArray, FloatArray, FloatArray]] = {}

    def __repr__(self) -> str:
        return (
            f"MollifiedTarget(delta={self.delta!r}, r={self.bump.gevrey_order!r},"
            f" t_end={self.t_end!r})"
        )

    def extended_base(self, t: FloatArray) -> FloatArray:
        """w̃(t): the base target for t > 0, zero otherwise"""
        t = np.asarray(t, dtype=np.float64)
        out = np.zeros(t.shape)
        positive = t > 0
        out[positive] = self._evaluate(t[positive])
        return out

    def _table(
        self, panels: int, log_scale: FloatArray
    ) -> Tuple[FloatArray, FloatArray, FloatArray]:
        """Nodes, weights and scaled bump coefficients on the full window [0, 1]"""
        key = (panels, log_scale.size - 1, log_scale.tobytes())
        if key not in self._tables:
            sigma, weights = composite_gauss_legendre(0.0, 1.0, panels, QUAD_NODES)
            coeffs = bump_coefficients(self.bump, sigma, log_scale.size - 1, log_scale=log_scale)
            self._tables[key] = (sigma, weights, coeffs)
        return self._tables[key]

    def _integrate(
        self, t: FloatArray, upper: FloatArray, panels: int, log_scale: FloatArray
    ) -> Tuple[FloatArray, FloatArray]:
        """∫_0^upper w̃(t - δσ)·ξ^(k)(σ)/k! dσ and the same integral of absolute values"""
        order = log_scale.size - 1
        value = np.empty((t.size, order + 1))
        scale = np.empty((t.size, order + 1))

        full = np.flatnonzero(upper >= 1.0)
        if full.size:
            sigma, weights, coeffs = self._table(panels, log_scale)
            rows = max(1, (_WORK_CHUNK * 16) // sigma.size)
            for start in range(0, full.size, rows):
                index = full[start : start + rows]
                samples = self.extended_base(t[index, None] - self.delta * sigma[None, :])
                value[index] = (samples * weights) @ coeffs
                scale[index] = (np.abs(samples) * weights) @ np.abs(coeffs)

        # Windows cut by the kink of w̃ at 0: the rule is rescaled to [0, t/δ]
        partial = np.flatnonzero(upper < 1.0)
        if partial.size:
            unit, unit_weights = composite_gauss_legendre(0.0, 1.0, panels, QUAD_NODES)
            rows = max(1, _WORK_CHUNK // unit.size)
            for start in range(0, partial.size, rows):
                index = partial[start : start + rows]
                sigma = upper[index, None] * unit[None, :]
                weights = upper[index, None] * unit_weights[None, :]
                coeffs = bump_coefficients(self.bump, sigma, order, log_scale=log_scale)
                samples = self.extended_base(t[index, None] - self.delta * sigma) * weights
                value[index] = np.einsum("mq,mqk->mk", samples, coeffs)
                scale[index] = np.einsum("mq,mqk->mk", np.abs(samples), np.abs(coeffs))

        return value, scale

    def coefficients(
        self, t: ArrayLike, order: int, *, log_scale: Optional[ArrayLike] = None
    ) -> FloatArray:
        """Taylor coefficients w_δ^(k)(t)/k! for k = 0..order, shape (M, order + 1).

        The factor δ^(-k) and ``log_scale`` enter the bump coefficients in log space, so
        weighted coefficients stay finite at orders where the plain ones overflow.

        Raises:
            OrderCapError: order above n_max, or log_scale of the wrong length
            OutOfRangeError: t outside [0, t_end]

        """
        if not (0 <= order <= self.n_max):
            raise OrderCapError(f"Derivative order {order} exceeds n_max={self.n_max}")
        k = np.arange(order + 1.0)
        weights = -k * np.log(self.delta)
        if log_scale is not None:
            extra = np.asarray(log_scale, dtype=np.float64)
            if extra.shape != weights.shape:
                raise OrderCapError(f"log_scale has shape {extra.shape}, expected {k.shape}")
            weights = weights + extra

        t = np.atleast_1d(np.asarray(t, dtype=np.float64))
        if np.any(t < 0) or np.any(t > self.t_end * (1.0 + 1e-12)):
            raise OutOfRangeError(f"Mollified target evaluated outside [0, {self.t_end}]")

        upper = np.minimum(1.0, t / self.delta)
        result = np.zeros((t.size, order + 1))
        pending = np.flatnonzero(upper > 0)

        panels = MOLLIFIER_MIN_PANELS
        previous, _ = self._integrate(t[pending], upper[pending], panels, weights)
        while pending.size:
            panels *= 2
            current, scale = self._integrate(t[pending], upper[pending], panels, weights)
            done = np.all(np.abs(current - previous) <= self.rtol * scale, axis=1)
            result[pending[done]] = current[done]

            if panels >= MOLLIFIER_MAX_PANELS and not np.all(done):
                warnings.warn(
                    f"Mollifier quadrature did not converge at {int(np.sum(~done))} nodes"
                    f" with {panels} panels",
                    TruncationWarning,
                )
                result[pending[~done]] = current[~done]
                break

            pending = pending[~done]
            previous = current[~done]

        logger.debug(
            "Mollified %d nodes up to order %d, last panel count %d", t.size, order, panels
        )
        return result

    def derivatives(self, t: ArrayLike, order: int) -> FloatArray:
        """w_δ^(k)(t) for k = 0..order, shape (M, order + 1)"""
        return self.coefficients(t, order, log_scale=gammaln(np.arange(order + 1) + 1.0))

    def values(self, t: FloatArray) -> FloatArray:
        t = np.asarray(t, dtype=np.float64)
        return self.coefficients(t.ravel(), 0)[:, 0].reshape(t.shape)


def mollified_derivatives(m: MollifiedTarget, t: float, max_order: int) -> FloatArray:
    """d_i = w_δ^(i)(t) for i = 0..max_order.

    Raises:
        OrderCapError: max_order above the target's n_max

    """
    return m.derivatives(np.array([t]), max_order)[0]


__all__ = (
    "JetSource",
    "TimeFunction",
    "MollifiedTarget",
    "mollified_derivatives",
)
