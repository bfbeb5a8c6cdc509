"""
File: ./heattrack/cli/__init__.py
Project: heattrack

This program is free software; you can redistribute it and/or modify it under the terms of the GNU General Public License as published by the Free Software Foundation; either version 2 of the License, or (at your option) any later version.
This program is distributed in the hope that it will be useful, but WITHOUT ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the GNU General Public License for more details.
You should have received a copy of the GNU General Public License along with this program; if not, write to the Free Software Foundation, Inc., 51 Franklin Street, Fifth Floor, Boston, MA 02110-1301, USA.
"""

# Project
from ._config import (
    Command,
    TargetSpec,
    TargetFamily,
    ExperimentConfig,
    load_config,
    config_hash,
)
from ._verify import PROPERTY_CHECKS, PropertyResult, VerificationReport, verify_properties
from ._commands import (
    COMMANDS,
    GS_COLUMNS,
    COST_CURVE_COLUMNS,
    run_gs,
    run_hum,
    run_track,
    run_verify,
    run_transmute,
    run_cost_curve,
    run_experiment,
)
from ._artifacts import provenance_for, read_json_report, write_json_report

__all__ = (
    "Command",
    "COMMANDS",
    "GS_COLUMNS",
    "TargetSpec",
    "TargetFamily",
    "PROPERTY_CHECKS",
    "PropertyResult",
    "ExperimentConfig",
    "COST_CURVE_COLUMNS",
    "VerificationReport",
    "run_gs",
    "run_hum",
    "run_track",
    "run_verify",
    "load_config",
    "config_hash",
    "run_transmute",
    "run_cost_curve",
    "provenance_for",
    "run_experiment",
    "read_json_report",
    "verify_properties",
    "write_json_report",
)
