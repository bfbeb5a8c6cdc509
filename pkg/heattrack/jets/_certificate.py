"""
File: ./heattrack/jets/_certificate.py
Project: heattrack

This program is free software; you can redistribute it and/or modify it under the terms of the GNU General Public License as published by the Free Software Foundation; either version 2 of the License, or (at your option) any later version.
This program is distributed in the hope that it will be useful, but WITHOUT ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the GNU General Public License for more details.
You should have received a copy of the GNU General Public License along with this program; if not, write to the Free Software Foundation, Inc., 51 Franklin Street, Fifth Floor, Boston, MA 02110-1301, USA.
"""

# Internal
from typing import Tuple

# External
import numpy as np
from numpy.typing import ArrayLike
from scipy.special import gammaln

# Project
from ..logger import get_logger
from .._errors import OutOfRangeError

logger = get_logger(__name__)

_MIN_ORDERS = 5


def gevrey_certificate(derivs: ArrayLike, r: float) -> Tuple[float, float]:
    """Fit |w^(i)| <= C·(i!)^r / R^i to sampled derivatives.

    The fit is a least-squares line through log max_t |w^(i)| - r·log(i!) against i, a
    diagnostic of growth rates rather than a certified bound.

    Args:
        derivs: Derivative values, shape (samples, I + 1), column i holding w^(i)
        r: Gevrey order to test against

    Raises:
        OutOfRangeError: fewer than 6 derivative orders

    Returns:
        Fitted (C, R); (0, 1) when every derivative vanishes

    """
    table = np.atleast_2d(np.asarray(derivs, dtype=np.float64))
    if table.shape[1] <= _MIN_ORDERS:
        raise OutOfRangeError(
            f"Gevrey certificate needs derivatives up to order {_MIN_ORDERS} at least"
        )

    peaks = np.max(np.abs(table), axis=0)
    usable = np.flatnonzero((peaks > 0) & np.isfinite(peaks))
    if usable.size == 0:
        return 0.0, 1.0
    if usable.size == 1:
        only = usable[0]
        return float(peaks[only] / np.exp(r * gammaln(only + 1.0))), 1.0

    orders = usable.astype(np.float64)
    target = np.log(peaks[usable]) - r * gammaln(orders + 1.0)
    design = np.column_stack((np.ones_like(orders), -orders))
    (log_c, log_r), *_ = np.linalg.lstsq(design, target, rcond=None)

    logger.debug(
        "Gevrey fit r=%s over %d orders: log C=%s, log R=%s", r, usable.size, log_c, log_r
    )
    return float(np.exp(log_c)), float(np.exp(log_r))


__all__ = ("gevrey_certificate",)
