"""
File: ./heattrack/jets/_series.py
Project: heattrack

This program is free software; you can redistribute it and/or modify it under the terms of the GNU General Public License as published by the Free Software Foundation; either version 2 of the License, or (at your option) any later version.
This program is distributed in the hope that it will be useful, but WITHOUT ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the GNU General Public License for more details.
You should have received a copy of the GNU General Public License along with this program; if not, write to the Free Software Foundation, Inc., 51 Franklin Street, Fifth Floor, Boston, MA 02110-1301, USA.

Truncated power series kernels.

All functions act on the last axis of coefficient arrays, so a batch of jets at many centers
(shape ``(M, N + 1)``) is processed with one recurrence loop of length N.
"""

# External
import numpy as np
from numpy.typing import NDArray

# Project
from .._errors import SingularJetError

FloatArray = NDArray[np.float64]


def series_mul(a: FloatArray, b: FloatArray) -> FloatArray:
    """Cauchy product truncated at the common order"""
    order = a.shape[-1] - 1
    out = np.zeros(np.broadcast_shapes(a.shape, b.shape))
    for j in range(order + 1):
        out[..., j:] += a[..., j : j + 1] * b[..., : order + 1 - j]
    return out


def series_exp(u: FloatArray, *, log_offset: float = 0.0) -> FloatArray:
    """exp(log_offset + u) from e' = e·u', i.e. k·e_k = Σ_{j=1..k} j·u_j·e_{k-j}"""
    order = u.shape[-1] - 1
    out = np.empty_like(u, dtype=np.float64)
    out[..., 0] = np.exp(log_offset + u[..., 0])
    if order == 0:
        return out

    weighted = u[..., 1:] * np.arange(1, order + 1)
    for k in range(1, order + 1):
        out[..., k] = np.sum(weighted[..., :k] * out[..., k - 1 :: -1], axis=-1) / k
    return out


def series_power(u: FloatArray, exponent: float) -> FloatArray:
    """u**exponent from p'·u = exponent·p·u'.

    Raises:
        SingularJetError: a constant term vanishes while the exponent is not a non-negative
            integer

    """
    order = u.shape[-1] - 1
    u0 = u[..., 0]
    if np.any(u0 == 0) and not (float(exponent).is_integer() and exponent >= 0):
        raise SingularJetError("Power of a jet with vanishing constant term")

    out = np.empty_like(u, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        out[..., 0] = np.power(u0, exponent)
    if order == 0:
        return out

    if np.any(u0 == 0):
        # Non-negative integer power of a jet through zero: repeated products
        result = np.zeros_like(out)
        result[..., 0] = 1.0
        for _ in range(int(exponent)):
            result = series_mul(result, u)
        return result

    j = np.arange(1, order + 1)
    tail = u[..., 1:]
    for k in range(1, order + 1):
        factors = (exponent + 1.0) * j[:k] - k
        out[..., k] = np.sum(factors * tail[..., :k] * out[..., k - 1 :: -1], axis=-1) / (k * u0)
    return out


def quadratic_power(
    q0: FloatArray, q1: FloatArray, q2: FloatArray, exponent: float, order: int
) -> FloatArray:
    """(q0 + q1·τ + q2·τ²)**exponent as a series in τ by the two-term sparse recurrence"""
    out = np.zeros(q0.shape + (order + 1,))
    out[..., 0] = np.power(q0, exponent)
    if order >= 1:
        out[..., 1] = exponent * q1 * out[..., 0] / q0
    for k in range(2, order + 1):
        out[..., k] = (
            ((exponent + 1.0) - k) * q1 * out[..., k - 1]
            + (2.0 * (exponent + 1.0) - k) * q2 * out[..., k - 2]
        ) / (k * q0)
    return out


__all__ = ("FloatArray", "series_mul", "series_exp", "series_power", "quadratic_power")
