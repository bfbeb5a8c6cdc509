"""
File: ./heattrack/jets/_jet.py
Project: heattrack

This program is free software; you can redistribute it and/or modify it under the terms of the GNU General Public License as published by the Free Software Foundation; either version 2 of the License, or (at your option) any later version.
This program is distributed in the hope that it will be useful, but WITHOUT ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the GNU General Public License for more details.
You should have received a copy of the GNU General Public License along with this program; if not, write to the Free Software Foundation, Inc., 51 Franklin Street, Fifth Floor, Boston, MA 02110-1301, USA.
"""

# Internal
from typing import Union

# External
import numpy as np
from numpy.typing import NDArray, ArrayLike
from scipy.special import gammaln

# Project
from ._series import series_exp, series_mul, series_power


class Jet:
    """Truncated Taylor expansion c_0..c_N of a function at ``center``, c_k = f^(k)(center)/k!"""

    __slots__ = ("_center", "_coeffs")

    def __init__(self, center: float, coeffs: ArrayLike) -> None:
        array = np.array(coeffs, dtype=np.float64)
        if array.ndim != 1 or array.size == 0:
            raise ValueError("Jet coefficients must be a non-empty sequence")
        if not np.all(np.isfinite(array)):
            raise ValueError("Jet coefficients must be finite")

        array.flags.writeable = False
        self._center = float(center)
        self._coeffs = array

    @classmethod
    def constant(cls, center: float, value: float, order: int) -> "Jet":
        coeffs = np.zeros(order + 1)
        coeffs[0] = value
        return cls(center, coeffs)

    @classmethod
    def variable(cls, center: float, order: int) -> "Jet":
        """Jet of the identity t ↦ t"""
        coeffs = np.zeros(order + 1)
        coeffs[0] = center
        if order >= 1:
            coeffs[1] = 1.0
        return cls(center, coeffs)

    @property
    def center(self) -> float:
        return self._center

    @property
    def order(self) -> int:
        return self._coeffs.size - 1

    @property
    def coeffs(self) -> NDArray[np.float64]:
        return self._coeffs

    def derivatives(self) -> NDArray[np.float64]:
        """f^(k)(center) for k = 0..N"""
        return np.asarray(self._coeffs * np.exp(gammaln(np.arange(self.order + 1) + 1.0)))

    def _check(self, other: "Jet") -> None:
        if self.order != other.order or self.center != other.center:
            raise ValueError(
                f"Jets do not match: order {self.order} at {self.center} vs"
                f" order {other.order} at {other.center}"
            )

    def __add__(self, other: Union["Jet", float]) -> "Jet":
        if isinstance(other, Jet):
            return jet_add(self, other)
        shifted = self._coeffs.copy()
        shifted[0] += other
        return Jet(self._center, shifted)

    __radd__ = __add__

    def __mul__(self, other: Union["Jet", float]) -> "Jet":
        if isinstance(other, Jet):
            return jet_multiply(self, other)
        return jet_scalar(self, other)

    __rmul__ = __mul__

    def __neg__(self) -> "Jet":
        return jet_scalar(self, -1.0)

    def __repr__(self) -> str:
        return f"Jet(center={self._center!r}, order={self.order})"


def jet_add(a: Jet, b: Jet) -> Jet:
    a._check(b)
    return Jet(a.center, a.coeffs + b.coeffs)


def jet_multiply(a: Jet, b: Jet) -> Jet:
    a._check(b)
    return Jet(a.center, series_mul(a.coeffs, b.coeffs))


def jet_scalar(a: Jet, factor: float) -> Jet:
    return Jet(a.center, factor * a.coeffs)


def jet_exp(a: Jet) -> Jet:
    return Jet(a.center, series_exp(a.coeffs))


def jet_power_neg(a: Jet, alpha: float) -> Jet:
    """a**(-alpha).

    Raises:
        SingularJetError: constant term of ``a`` is zero

    """
    return Jet(a.center, series_power(a.coeffs, -alpha))


__all__ = ("Jet", "jet_add", "jet_exp", "jet_scalar", "jet_multiply", "jet_power_neg")
