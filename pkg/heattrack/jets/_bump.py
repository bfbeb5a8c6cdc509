"""
File: ./heattrack/jets/_bump.py
Project: heattrack

This program is free software; you can redistribute it and/or modify it under the terms of the GNU General Public License as published by the Free Software Foundation; either version 2 of the License, or (at your option) any later version.
This program is distributed in the hope that it will be useful, but WITHOUT ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the GNU General Public License for more details.
You should have received a copy of the GNU General Public License along with this program; if not, write to the Free Software Foundation, Inc., 51 Franklin Street, Fifth Floor, Boston, MA 02110-1301, USA.
"""

# Internal
import math
import warnings
from typing import Tuple, Callable, Optional, Annotated

# External
import numpy as np
from pydantic import Field, BaseModel
from numpy.typing import ArrayLike
from scipy.special import gammaln

# Project
from ._jet import Jet
from ._series import FloatArray, series_exp, quadratic_power
from ..logger import get_logger
from .._errors import OrderCapError, InvalidOrderError, TruncationWarning
from .._constants import N_MAX, N_MAX_CAP, ENDPOINT_GUARD
from .._quadrature import composite_gauss_legendre

logger = get_logger(__name__)

# Below this log value the bump is treated as zero with all its derivatives
_LOG_FLOOR = -700.0
_NORMALIZATION_RTOL = 1e-12
_NORMALIZATION_MAX_PANELS = 1 << 16
_JET_CHUNK = 16384


class GevreyBump(BaseModel):
    """
    Unit-mass cut-off ξ(t) = N_r·exp(-((1-t)t)^(-1/(r-1))) on (0, 1), zero elsewhere.
    """

    class Config:
        allow_mutation = False

    gevrey_order: Annotated[float, Field(description="Gevrey order r", gt=1)]
    log_normalization: Annotated[
        float, Field(description="Natural log of N_r, the factor giving unit mass")
    ]

    @property
    def exponent(self) -> float:
        return 1.0 / (self.gevrey_order - 1.0)

    @property
    def normalization(self) -> float:
        try:
            return math.exp(self.log_normalization)
        except OverflowError:
            return math.inf

    def log_shape(self, t: ArrayLike) -> FloatArray:
        """-((1-t)t)^(-1/(r-1)), -inf outside (0, 1)"""
        t = np.asarray(t, dtype=np.float64)
        q = t * (1.0 - t)
        out = np.full(t.shape, -np.inf)
        inside = q > 0
        out[inside] = -np.power(q[inside], -self.exponent)
        return out

    def values(self, t: ArrayLike) -> FloatArray:
        with np.errstate(under="ignore"):
            return np.asarray(np.exp(self.log_normalization + self.log_shape(t)))


def _adaptive_integral(
    func: Callable[[FloatArray], FloatArray], a: float, b: float, rtol: float, max_panels: int
) -> float:
    panels = 16
    x, w = composite_gauss_legendre(a, b, panels)
    previous = float(w @ func(x))
    while panels < max_panels:
        panels *= 2
        x, w = composite_gauss_legendre(a, b, panels)
        current = float(w @ func(x))
        if abs(current - previous) <= rtol * abs(current):
            return current
        previous = current

    warnings.warn(
        f"Adaptive quadrature stopped at {panels} panels before reaching rtol={rtol:g}",
        TruncationWarning,
    )
    return previous


def _peak_window(exponent: float) -> Tuple[float, float, float]:
    """Peak log value of the unnormalized bump and the interval where it exceeds the floor"""
    try:
        peak = -math.pow(4.0, exponent)
        q_cut = math.pow(-peak - _LOG_FLOOR, -1.0 / exponent)
    except OverflowError as exc:
        raise InvalidOrderError("Gevrey order too close to 1 for double precision") from exc

    half_gap = 0.5 * math.sqrt(max(0.0, 1.0 - 4.0 * q_cut))
    return peak, 0.5 - half_gap, 0.5 + half_gap


def normalize_bump(r: float) -> GevreyBump:
    """Unit-mass Gevrey bump of order r.

    Args:
        r: Gevrey order, must be > 1

    Raises:
        InvalidOrderError: r <= 1

    Returns:
        Bump with its log normalization constant

    """
    if not (math.isfinite(r) and r > 1.0):
        raise InvalidOrderError(f"Gevrey order must be > 1, got {r}")

    exponent = 1.0 / (r - 1.0)
    peak, lower, upper = _peak_window(exponent)

    def shifted(t: FloatArray) -> FloatArray:
        with np.errstate(under="ignore"):
            return np.asarray(np.exp(-np.power(t * (1.0 - t), -exponent) - peak))

    mass = _adaptive_integral(
        shifted, lower, upper, _NORMALIZATION_RTOL, _NORMALIZATION_MAX_PANELS
    )
    log_normalization = -(peak + math.log(mass))
    logger.debug("Gevrey bump r=%s: log N_r = %s", r, log_normalization)
    return GevreyBump(gevrey_order=r, log_normalization=log_normalization)


def _coefficient_chunk(
    bump: GevreyBump, sigma: FloatArray, order: int, log_scale: FloatArray
) -> FloatArray:
    out = np.zeros(sigma.shape + (order + 1,))
    q0 = sigma * (1.0 - sigma)
    inside = (sigma > ENDPOINT_GUARD) & (sigma < 1.0 - ENDPOINT_GUARD)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        log_value = np.where(
            inside, bump.log_normalization - np.power(q0, -bump.exponent), -np.inf
        )
    active = np.flatnonzero(log_value > _LOG_FLOOR)
    if active.size == 0:
        return out

    # Expand in τ with t = σ + q0·τ, so every coefficient is O(1), then undo the scaling in
    # log space together with the caller's weights
    scale = q0[active]
    scaled = quadratic_power(
        scale, (1.0 - 2.0 * sigma[active]) * scale, -scale * scale, -bump.exponent, order
    )
    expanded = series_exp(-scaled, log_offset=bump.log_normalization)

    k = np.arange(order + 1)
    with np.errstate(divide="ignore", over="ignore", under="ignore"):
        log_magnitude = np.log(np.abs(expanded)) - k[None, :] * np.log(scale)[:, None]
        magnitude = np.exp(log_magnitude + log_scale[None, :])
    out[active] = np.sign(expanded) * magnitude
    return out


def bump_coefficients(
    bump: GevreyBump, sigma: ArrayLike, order: int, *, log_scale: Optional[ArrayLike] = None
) -> FloatArray:
    """Taylor coefficients ξ^(k)(σ)/k!, shape ``sigma.shape + (order + 1,)``.

    With ``log_scale`` the k-th coefficient comes back multiplied by exp(log_scale[k]),
    applied before leaving log space so that high orders do not overflow.
    """
    sigma = np.asarray(sigma, dtype=np.float64)
    weights = np.zeros(order + 1) if log_scale is None else np.asarray(log_scale, dtype=np.float64)
    if weights.shape != (order + 1,):
        raise OrderCapError(f"log_scale has shape {weights.shape}, expected {(order + 1,)}")
    flat = sigma.ravel()
    out = np.empty((flat.size, order + 1))
    for start in range(0, flat.size, _JET_CHUNK):
        stop = start + _JET_CHUNK
        out[start:stop] = _coefficient_chunk(bump, flat[start:stop], order, weights)
    return out.reshape(sigma.shape + (order + 1,))


def bump_derivatives(bump: GevreyBump, sigma: ArrayLike, order: int) -> FloatArray:
    """Derivative values ξ^(k)(σ) for k = 0..order"""
    factorials = np.exp(gammaln(np.arange(order + 1) + 1.0))
    with np.errstate(over="ignore"):
        return np.asarray(bump_coefficients(bump, sigma, order) * factorials)


def bump_jet(bump: GevreyBump, t: float, order: int, *, n_max: int = N_MAX) -> Jet:
    """Jet of the bump at t; the zero jet outside (0, 1) and within 1e-12 of its ends.

    Raises:
        OrderCapError: order exceeds n_max

    """
    if order > min(n_max, N_MAX_CAP):
        raise OrderCapError(f"Jet order {order} exceeds the configured maximum {n_max}")
    if order < 0:
        raise OrderCapError("Jet order must be non-negative")
    return Jet(t, bump_coefficients(bump, np.array([t]), order)[0])


def bump_primitive(bump: GevreyBump, u: ArrayLike, *, panels: int = 64) -> FloatArray:
    """∫_0^u ξ, for each u (clipped to [0, 1])"""
    u = np.clip(np.asarray(u, dtype=np.float64), 0.0, 1.0)
    x, w = composite_gauss_legendre(0.0, 1.0, panels)
    flat = u.ravel()
    out = np.empty(flat.size)
    rows = max(1, _JET_CHUNK // x.size)
    for start in range(0, flat.size, rows):
        upper = flat[start : start + rows]
        out[start : start + rows] = (bump.values(upper[:, None] * x[None, :]) @ w) * upper
    return out.reshape(u.shape)


def bump_moment(bump: GevreyBump, k: int) -> float:
    """∫_0^1 σ^k ξ(σ) dσ"""
    _, lower, upper = _peak_window(bump.exponent)
    return _adaptive_integral(
        lambda t: t**k * bump.values(t),
        lower,
        upper,
        _NORMALIZATION_RTOL,
        _NORMALIZATION_MAX_PANELS,
    )


__all__ = (
    "GevreyBump",
    "bump_jet",
    "bump_moment",
    "normalize_bump",
    "bump_primitive",
    "bump_derivatives",
    "bump_coefficients",
)
