"""
File: ./heattrack/_quadrature.py
Project: heattrack

This program is free software; you can redistribute it and/or modify it under the terms of the GNU General Public License as published by the Free Software Foundation; either version 2 of the License, or (at your option) any later version.
This program is distributed in the hope that it will be useful, but WITHOUT ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the GNU General Public License for more details.
You should have received a copy of the GNU General Public License along with this program; if not, write to the Free Software Foundation, Inc., 51 Franklin Street, Fifth Floor, Boston, MA 02110-1301, USA.
"""

# Internal
from typing import Tuple
from functools import lru_cache

# External
import numpy as np
from numpy.typing import NDArray
from numpy.polynomial.legendre import leggauss

# Project
from ._constants import QUAD_NODES


@lru_cache(maxsize=8)
def _reference_rule(nodes: int) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
    points, weights = leggauss(nodes)
    points.flags.writeable = False
    weights.flags.writeable = False
    return points, weights


def composite_gauss_legendre(
    a: float, b: float, panels: int, nodes: int = QUAD_NODES
) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Nodes and weights of a composite Gauss-Legendre rule on [a, b]"""
    points, weights = _reference_rule(nodes)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    x = (mid[:, None] + half[:, None] * points[None, :]).ravel()
    w = (half[:, None] * weights[None, :]).ravel()
    return x, w


def scaled_rules(
    upper: NDArray[np.float64], panels: int, nodes: int = QUAD_NODES
) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Composite rules on [0, upper_m] for each m, shape (M, panels·nodes)"""
    x, w = composite_gauss_legendre(0.0, 1.0, panels, nodes)
    return upper[:, None] * x[None, :], upper[:, None] * w[None, :]


__all__ = ("composite_gauss_legendre", "scaled_rules")
