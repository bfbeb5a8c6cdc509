"""
File: ./heattrack/jets/__init__.py
Project: heattrack

This program is free software; you can redistribute it and/or modify it under the terms of the GNU General Public License as published by the Free Software Foundation; either version 2 of the License, or (at your option) any later version.
This program is distributed in the hope that it will be useful, but WITHOUT ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the GNU General Public License for more details.
You should have received a copy of the GNU General Public License along with this program; if not, write to the Free Software Foundation, Inc., 51 Franklin Street, Fifth Floor, Boston, MA 02110-1301, USA.
"""

# Project
from ._jet import Jet, jet_add, jet_exp, jet_scalar, jet_multiply, jet_power_neg
from ._bump import (
    GevreyBump,
    bump_jet,
    bump_moment,
    bump_primitive,
    normalize_bump,
    bump_derivatives,
    bump_coefficients,
)
from ._series import FloatArray, series_exp, series_mul, series_power, quadratic_power
from ._mollifier import JetSource, TimeFunction, MollifiedTarget, mollified_derivatives
from ._certificate import gevrey_certificate

__all__ = (
    "Jet",
    "jet_add",
    "jet_exp",
    "bump_jet",
    "JetSource",
    "FloatArray",
    "GevreyBump",
    "jet_scalar",
    "series_exp",
    "series_mul",
    "bump_moment",
    "jet_multiply",
    "series_power",
    "TimeFunction",
    "jet_power_neg",
    "bump_primitive",
    "normalize_bump",
    "MollifiedTarget",
    "quadratic_power",
    "bump_derivatives",
    "bump_coefficients",
    "gevrey_certificate",
    "mollified_derivatives",
)
