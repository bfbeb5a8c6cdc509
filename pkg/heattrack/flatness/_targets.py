"""
File: ./heattrack/flatness/_targets.py
Project: heattrack

This program is free software; you can redistribute it and/or modify it under the terms of the GNU General Public License as published by the Free Software Foundation; either version 2 of the License, or (at your option) any later version.
This program is distributed in the hope that it will be useful, but WITHOUT ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the GNU General Public License for more details.
You should have received a copy of the GNU General Public License along with this program; if not, write to the Free Software Foundation, Inc., 51 Franklin Street, Fifth Floor, Boston, MA 02110-1301, USA.
"""

# Internal
import math
from typing import Optional, Protocol

# External
import numpy as np
from numpy.typing import ArrayLike
from scipy.special import gammaln
from scipy.interpolate import CubicSpline

# Project
from ..jets import FloatArray, GevreyBump, bump_primitive, bump_coefficients
from ..grids import Signal, signal_norm
from .._errors import OrderCapError, OutOfRangeError


class Target(Protocol):
    """A target w with Taylor coefficients w^(k)(t)/k! and its W^{1,∞} norm"""

    def values(self, t: FloatArray) -> FloatArray:
        ...

    def coefficients(
        self, t: ArrayLike, order: int, *, log_scale: Optional[ArrayLike] = None
    ) -> FloatArray:
        ...

    def w1inf_norm(self, t_end: float) -> float:
        ...


def _as_times(t: ArrayLike) -> FloatArray:
    return np.atleast_1d(np.asarray(t, dtype=np.float64))


def _log_weights(log_scale: Optional[ArrayLike], order: int) -> FloatArray:
    if log_scale is None:
        return np.zeros(order + 1)
    weights = np.asarray(log_scale, dtype=np.float64)
    if weights.shape != (order + 1,):
        raise OrderCapError(f"log_scale has shape {weights.shape}, expected {(order + 1,)}")
    return weights


def _scaled(coeffs: FloatArray, log_scale: Optional[ArrayLike]) -> FloatArray:
    """Coefficients times exp(log_scale), column by column; zero stays zero"""
    if log_scale is None:
        return coeffs
    weights = _log_weights(log_scale, coeffs.shape[-1] - 1)
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        scaled = coeffs * np.exp(weights)
    return np.where(coeffs == 0.0, 0.0, scaled)


def _to_derivatives(coeffs: FloatArray) -> FloatArray:
    factorials = np.exp(gammaln(np.arange(coeffs.shape[-1]) + 1.0))
    with np.errstate(over="ignore"):
        return np.asarray(coeffs * factorials)


class ZeroTarget:
    """w ≡ 0"""

    def values(self, t: FloatArray) -> FloatArray:
        return np.zeros(np.shape(t))

    def coefficients(
        self, t: ArrayLike, order: int, *, log_scale: Optional[ArrayLike] = None
    ) -> FloatArray:
        return _scaled(np.zeros((_as_times(t).size, order + 1)), log_scale)

    def derivatives(self, t: ArrayLike, order: int) -> FloatArray:
        return self.coefficients(t, order)

    def w1inf_norm(self, t_end: float) -> float:
        return 0.0

    def __repr__(self) -> str:
        return "ZeroTarget()"


class RampTarget:
    """w(t) = slope·t"""

    def __init__(self, slope: float = 1.0) -> None:
        self.slope = float(slope)

    def values(self, t: FloatArray) -> FloatArray:
        return np.asarray(self.slope * np.asarray(t, dtype=np.float64))

    def coefficients(
        self, t: ArrayLike, order: int, *, log_scale: Optional[ArrayLike] = None
    ) -> FloatArray:
        t = _as_times(t)
        out = np.zeros((t.size, order + 1))
        out[:, 0] = self.slope * t
        if order >= 1:
            out[:, 1] = self.slope
        return _scaled(out, log_scale)

    def derivatives(self, t: ArrayLike, order: int) -> FloatArray:
        return self.coefficients(t, order)

    def w1inf_norm(self, t_end: float) -> float:
        return abs(self.slope) * max(1.0, t_end)

    def __repr__(self) -> str:
        return f"RampTarget(slope={self.slope!r})"


class SineTarget:
    """w(t) = A·sin(2πft)"""

    def __init__(self, amplitude: float = 1.0, frequency: float = 1.0) -> None:
        self.amplitude = float(amplitude)
        self.frequency = float(frequency)

    @property
    def omega(self) -> float:
        return 2.0 * math.pi * self.frequency

    def values(self, t: FloatArray) -> FloatArray:
        return np.asarray(self.amplitude * np.sin(self.omega * np.asarray(t, dtype=np.float64)))

    def coefficients(
        self, t: ArrayLike, order: int, *, log_scale: Optional[ArrayLike] = None
    ) -> FloatArray:
        t = _as_times(t)
        k = np.arange(order + 1)
        if self.omega == 0.0:
            return _scaled(np.zeros((t.size, order + 1)), log_scale)
        phase = self.omega * t[:, None] + 0.5 * math.pi * k[None, :]
        weights = _log_weights(log_scale, order)
        log_magnitude = k * math.log(self.omega) - gammaln(k + 1.0) + weights
        with np.errstate(over="ignore", under="ignore"):
            scale = np.exp(log_magnitude)
        return np.asarray(self.amplitude * scale[None, :] * np.sin(phase))

    def derivatives(self, t: ArrayLike, order: int) -> FloatArray:
        return _to_derivatives(self.coefficients(t, order))

    def w1inf_norm(self, t_end: float) -> float:
        quarter = 0.5 * math.pi
        sup = 1.0 if self.omega * t_end >= quarter else math.sin(self.omega * t_end)
        return abs(self.amplitude) * max(sup, self.omega)

    def __repr__(self) -> str:
        return f"SineTarget(amplitude={self.amplitude!r}, frequency={self.frequency!r})"


class BumpIntegralTarget:
    """w(t) = A·∫_0^((t - onset)/width) ξ, flat at t = 0 whenever onset >= 0.

    Derivatives come from the bump jets: w^(i)(t) = A·width^(-i)·ξ^(i-1)((t - onset)/width).

    Raises:
        OutOfRangeError: width not positive

    """

    def __init__(
        self, bump: GevreyBump, onset: float, width: float, amplitude: float = 1.0
    ) -> None:
        if not width > 0:
            raise OutOfRangeError(f"Bump integral width must be positive, got {width}")
        self.bump = bump
        self.onset = float(onset)
        self.width = float(width)
        self.amplitude = float(amplitude)

    @property
    def gevrey_order(self) -> float:
        return self.bump.gevrey_order

    def _argument(self, t: ArrayLike) -> FloatArray:
        return np.asarray((np.asarray(t, dtype=np.float64) - self.onset) / self.width)

    def values(self, t: FloatArray) -> FloatArray:
        return np.asarray(self.amplitude * bump_primitive(self.bump, self._argument(t)))

    def coefficients(
        self, t: ArrayLike, order: int, *, log_scale: Optional[ArrayLike] = None
    ) -> FloatArray:
        u = self._argument(_as_times(t))
        weights = _log_weights(log_scale, order)
        out = np.empty((u.size, order + 1))
        out[:, :1] = _scaled(self.amplitude * bump_primitive(self.bump, u)[:, None], weights[:1])
        if order >= 1:
            k = np.arange(1, order + 1)
            # w^(k)/k! = A·width^(-k)·ξ^(k-1)/(k-1)!/k
            inner_scale = weights[1:] - k * math.log(self.width) - np.log(k)
            inner = bump_coefficients(self.bump, u, order - 1, log_scale=inner_scale)
            out[:, 1:] = self.amplitude * inner
        return out

    def derivatives(self, t: ArrayLike, order: int) -> FloatArray:
        return _to_derivatives(self.coefficients(t, order))

    def w1inf_norm(self, t_end: float) -> float:
        u_end = (t_end - self.onset) / self.width
        reached = float(bump_primitive(self.bump, np.array(u_end)))
        # ξ increases up to its peak at 1/2
        steepest = float(self.bump.values(np.array(min(0.5, max(0.0, u_end)))))
        return abs(self.amplitude) * max(reached, steepest / self.width)

    def __repr__(self) -> str:
        return (
            f"BumpIntegralTarget(r={self.bump.gevrey_order!r}, onset={self.onset!r},"
            f" width={self.width!r}, amplitude={self.amplitude!r})"
        )


class SampledTarget:
    """Cubic-spline reconstruction of a sampled signal, exact in its first derivative"""

    _MAX_ORDER = 1

    def __init__(self, signal: Signal) -> None:
        self.signal = signal
        self._spline = CubicSpline(signal.nodes, signal.values)

    def values(self, t: FloatArray) -> FloatArray:
        return np.asarray(self._spline(np.asarray(t, dtype=np.float64)))

    def coefficients(
        self, t: ArrayLike, order: int, *, log_scale: Optional[ArrayLike] = None
    ) -> FloatArray:
        if order > self._MAX_ORDER:
            raise OrderCapError(
                f"Sampled targets carry {self._MAX_ORDER} derivative, {order} requested"
            )
        t = _as_times(t)
        out = np.empty((t.size, order + 1))
        out[:, 0] = self._spline(t)
        if order >= 1:
            out[:, 1] = self._spline(t, 1)
        return _scaled(out, log_scale)

    def derivatives(self, t: ArrayLike, order: int) -> FloatArray:
        return self.coefficients(t, order)

    def w1inf_norm(self, t_end: float) -> float:
        return signal_norm(self.signal, "w1inf")

    def __repr__(self) -> str:
        return f"SampledTarget({self.signal!r})"


__all__ = (
    "Target",
    "ZeroTarget",
    "RampTarget",
    "SineTarget",
    "SampledTarget",
    "BumpIntegralTarget",
)
