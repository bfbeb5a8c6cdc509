"""
File: ./heattrack/grids/_io.py
Project: heattrack

This program is free software; you can redistribute it and/or modify it under the terms of the GNU General Public License as published by the Free Software Foundation; either version 2 of the License, or (at your option) any later version.
This program is distributed in the hope that it will be useful, but WITHOUT ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the GNU General Public License for more details.
You should have received a copy of the GNU General Public License along with this program; if not, write to the Free Software Foundation, Inc., 51 Franklin Street, Fifth Floor, Boston, MA 02110-1301, USA.
"""

# Internal
import csv
from typing import Dict, List, Tuple, Mapping, Optional
from pathlib import Path

# External
import numpy as np
from numpy.typing import NDArray
from pydantic import ValidationError

# Project
from ._grid import TimeGrid, AnyTimeGrid, SymmetricTimeGrid
from ._field import Field
from ._signal import Signal
from ..logger import get_logger
from .._errors import DataFileError, InvalidSignalError

logger = get_logger(__name__)

_FLOAT_FORMAT = "%.17g"
_GRID_RTOL = 1e-9


def format_provenance(provenance: Optional[Mapping[str, str]]) -> str:
    """Header comment line ``# key=value ...``, empty without provenance"""
    if not provenance:
        return ""
    return "# " + " ".join(f"{key}={value}" for key, value in provenance.items()) + "\n"


def write_signal_csv(
    path: Path, signal: Signal, provenance: Optional[Mapping[str, str]] = None
) -> None:
    """Write a signal as ``t,value`` rows with full double precision"""
    with path.open("w", newline="", encoding="utf-8") as file:
        file.write(format_provenance(provenance))
        writer = csv.writer(file, lineterminator="\n")
        writer.writerow(("t", "value"))
        for t, value in zip(signal.nodes, signal.values):
            writer.writerow((_FLOAT_FORMAT % t, _FLOAT_FORMAT % value))

    logger.debug("Wrote %d samples to %s", len(signal), path)


def write_field_csv(
    path: Path, field: Field, provenance: Optional[Mapping[str, str]] = None
) -> None:
    """Write a field as ``t,x,value`` rows, row-major in time"""
    t_nodes = field.tgrid.nodes
    x_nodes = field.xgrid.nodes
    with path.open("w", newline="", encoding="utf-8") as file:
        file.write(format_provenance(provenance))
        writer = csv.writer(file, lineterminator="\n")
        writer.writerow(("t", "x", "value"))
        for t, row in zip(t_nodes, field.values):
            t_text = _FLOAT_FORMAT % t
            writer.writerows(
                (t_text, _FLOAT_FORMAT % x, _FLOAT_FORMAT % value)
                for x, value in zip(x_nodes, row)
            )

    logger.debug("Wrote %dx%d field to %s", *field.shape, path)


def write_table_csv(
    path: Path,
    columns: Tuple[str, ...],
    rows: List[Tuple[float, ...]],
    provenance: Optional[Mapping[str, str]] = None,
) -> None:
    """Write numeric rows under a header line"""
    with path.open("w", newline="", encoding="utf-8") as file:
        file.write(format_provenance(provenance))
        writer = csv.writer(file, lineterminator="\n")
        writer.writerow(columns)
        writer.writerows(tuple(_FLOAT_FORMAT % value for value in row) for row in rows)


def read_provenance(path: Path) -> Dict[str, str]:
    """Key/value pairs of the leading ``#`` comment lines of a data file"""
    provenance: Dict[str, str] = {}
    with path.open("r", encoding="utf-8") as file:
        for line in file:
            if not line.startswith("#"):
                break
            for item in line[1:].split():
                key, sep, value = item.partition("=")
                if sep:
                    provenance[key] = value
    return provenance


def _infer_grid(path: Path, times: NDArray[np.float64]) -> AnyTimeGrid:
    count = len(times)
    if count < 3:
        raise DataFileError(f"{path}: a signal needs at least 3 rows, found {count}")

    t_first, t_last = float(times[0]), float(times[-1])
    step = (t_last - t_first) / (count - 1)
    scale = max(1.0, abs(t_first), abs(t_last))
    drift = np.abs(times - (t_first + step * np.arange(count)))
    if np.any(drift > _GRID_RTOL * scale):
        bad = int(np.flatnonzero(drift > _GRID_RTOL * scale)[0])
        raise DataFileError(f"{path}: row {bad + 1}: t = {times[bad]!r} breaks the uniform grid")

    try:
        if abs(t_first) <= _GRID_RTOL * scale:
            return TimeGrid(t_end=t_last, n_steps=count - 1)
        if abs(t_first + t_last) <= _GRID_RTOL * scale and count % 2 == 1:
            return SymmetricTimeGrid(half_width=t_last, n_half=(count - 1) // 2)
    except ValidationError as exc:
        raise DataFileError(f"{path}: invalid time grid: {exc}") from exc

    raise DataFileError(
        f"{path}: time column must start at 0 or be symmetric about 0 with an odd row count"
    )


def read_signal_csv(path: Path) -> Signal:
    """Read a ``t,value`` CSV file, inferring its uniform grid from the time column.

    Args:
        path: File to be read

    Raises:
        DataFileError: Malformed file, the message names the offending line

    Returns:
        Signal on a TimeGrid when t starts at 0, on a SymmetricTimeGrid when t spans [-S, S]

    """
    times: List[float] = []
    values: List[float] = []
    header_seen = False

    try:
        with path.open("r", newline="", encoding="utf-8") as file:
            for row in csv.reader(file):
                if not row or row[0].lstrip().startswith("#"):
                    continue

                if not header_seen:
                    if [cell.strip() for cell in row] != ["t", "value"]:
                        raise DataFileError(
                            f"{path}: expected header 't,value', found {','.join(row)!r}"
                        )
                    header_seen = True
                    continue

                if len(row) != 2:
                    raise DataFileError(
                        f"{path}: row {len(times) + 1} has {len(row)} columns, expected 2"
                    )
                try:
                    t, value = float(row[0]), float(row[1])
                except ValueError as exc:
                    raise DataFileError(
                        f"{path}: row {len(times) + 1} is not numeric: {','.join(row)!r}"
                    ) from exc
                if not (np.isfinite(t) and np.isfinite(value)):
                    raise DataFileError(f"{path}: row {len(times) + 1} has non-finite entries")

                times.append(t)
                values.append(value)
    except OSError as exc:
        raise DataFileError(f"Failed to read {path}: {exc}") from exc

    if not header_seen:
        raise DataFileError(f"{path}: missing 't,value' header")

    grid = _infer_grid(path, np.asarray(times, dtype=np.float64))
    try:
        return Signal(grid, values)
    except InvalidSignalError as exc:
        raise DataFileError(f"{path}: {exc}") from exc


__all__ = (
    "format_provenance",
    "read_signal_csv",
    "read_provenance",
    "write_field_csv",
    "write_signal_csv",
    "write_table_csv",
)
