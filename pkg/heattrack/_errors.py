"""
File: ./heattrack/_errors.py
Project: heattrack

This program is free software; you can redistribute it and/or modify it under the terms of the GNU General Public License as published by the Free Software Foundation; either version 2 of the License, or (at your option) any later version.
This program is distributed in the hope that it will be useful, but WITHOUT ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the GNU General Public License for more details.
You should have received a copy of the GNU General Public License along with this program; if not, write to the Free Software Foundation, Inc., 51 Franklin Street, Fifth Floor, Boston, MA 02110-1301, USA.
"""

class InvalidSignalError(ValueError):
    """Sampled data is non-finite or does not match its grid"""


class GridTooCoarseError(ValueError):
    """Grid has too few cells for the requested stencil"""


class IncompatibleGridError(ValueError):
    """Two grids that must agree (horizon, resolution) do not"""


class SingularJetError(ArithmeticError):
    """Negative power of a jet whose constant term vanishes"""


class InvalidOrderError(ValueError):
    """Gevrey order outside its admissible range"""


class OrderCapError(ValueError):
    """Requested derivative order exceeds the configured jet order"""


class OutOfRangeError(ValueError):
    """Parameter outside the range where the evaluation is defined"""


class OutOfDomainError(ValueError):
    """Evaluation point outside the domain where an estimate is stated"""


class DivergentSeriesError(ValueError):
    """Flatness series requested for a target of Gevrey order >= 2"""


class IncompatibleTargetError(ValueError):
    """Target violates a hypothesis of the tracking pipeline"""


class StabilityError(ValueError):
    """Explicit time stepping would violate its CFL condition"""


class InsufficientSupportError(ValueError):
    """Wave data does not cover the kernel truncation window"""


class KernelDomainError(ValueError):
    """Heat kernel evaluated at a non-positive time"""


class ConfigError(ValueError):
    """Experiment configuration is malformed or out of range"""


class DataFileError(RuntimeError):
    """A data file could not be parsed"""


class PropertyFailure(RuntimeError):
    """A numerical property check did not hold"""


class TruncationWarning(RuntimeWarning):
    """A series or quadrature hit its cap before reaching the tolerance"""


class CompatibilityWarning(RuntimeWarning):
    """Data is accepted but violates a soft compatibility condition"""


__all__ = (
    "InvalidSignalError",
    "GridTooCoarseError",
    "IncompatibleGridError",
    "SingularJetError",
    "InvalidOrderError",
    "OrderCapError",
    "OutOfRangeError",
    "OutOfDomainError",
    "DivergentSeriesError",
    "IncompatibleTargetError",
    "StabilityError",
    "InsufficientSupportError",
    "KernelDomainError",
    "ConfigError",
    "DataFileError",
    "PropertyFailure",
    "TruncationWarning",
    "CompatibilityWarning",
)
