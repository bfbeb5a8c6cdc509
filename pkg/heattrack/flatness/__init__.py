"""
File: ./heattrack/flatness/__init__.py
Project: heattrack

This program is free software; you can redistribute it and/or modify it under the terms of the GNU General Public License as published by the Free Software Foundation; either version 2 of the License, or (at your option) any later version.
This program is distributed in the hope that it will be useful, but WITHOUT ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the GNU General Public License for more details.
You should have received a copy of the GNU General Public License along with this program; if not, write to the Free Software Foundation, Inc., 51 Franklin Street, Fifth Floor, Boston, MA 02110-1301, USA.
"""

# Project
from ._cost import (
    CostReport,
    FlatTargetChoice,
    make_flat_target,
    cost_chain_check,
    with_cost_constant,
    approximate_tracking,
    calibrate_cost_constant,
)
from ._flat import FlatTarget, SeriesControl, flat_control, series_state
from ._targets import (
    Target,
    ZeroTarget,
    RampTarget,
    SineTarget,
    SampledTarget,
    BumpIntegralTarget,
)
from ..solvers import closed_loop_flux

__all__ = (
    "Target",
    "CostReport",
    "FlatTarget",
    "ZeroTarget",
    "RampTarget",
    "SineTarget",
    "flat_control",
    "series_state",
    "SampledTarget",
    "SeriesControl",
    "FlatTargetChoice",
    "closed_loop_flux",
    "make_flat_target",
    "cost_chain_check",
    "with_cost_constant",
    "BumpIntegralTarget",
    "approximate_tracking",
    "calibrate_cost_constant",
)
