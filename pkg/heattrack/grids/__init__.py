"""
File: ./heattrack/grids/__init__.py
Project: heattrack

This program is free software; you can redistribute it and/or modify it under the terms of the GNU General Public License as published by the Free Software Foundation; either version 2 of the License, or (at your option) any later version.
This program is distributed in the hope that it will be useful, but WITHOUT ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the GNU General Public License for more details.
You should have received a copy of the GNU General Public License along with this program; if not, write to the Free Software Foundation, Inc., 51 Franklin Street, Fifth Floor, Boston, MA 02110-1301, USA.
"""

# Project
from ._io import (
    read_provenance,
    read_signal_csv,
    write_field_csv,
    write_table_csv,
    format_provenance,
    write_signal_csv,
)
from ._grid import TimeGrid, SpaceGrid, AnyTimeGrid, SymmetricTimeGrid
from ._field import (
    Field,
    FLUX_STENCIL,
    HeatField,
    WaveField,
    flux_at_left,
    left_flux_values,
    right_flux_values,
)
from ._signal import (
    Signal,
    NormKind,
    resample,
    signal_norm,
    inner_product,
    trapezoid_weights,
)

__all__ = (
    "Field",
    "FLUX_STENCIL",
    "Signal",
    "NormKind",
    "TimeGrid",
    "resample",
    "HeatField",
    "SpaceGrid",
    "WaveField",
    "AnyTimeGrid",
    "signal_norm",
    "flux_at_left",
    "inner_product",
    "read_provenance",
    "read_signal_csv",
    "write_field_csv",
    "write_table_csv",
    "format_provenance",
    "left_flux_values",
    "write_signal_csv",
    "right_flux_values",
    "SymmetricTimeGrid",
    "trapezoid_weights",
)
