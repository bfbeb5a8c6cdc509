"""
File: ./heattrack/cli/_artifacts.py
Project: heattrack

This program is free software; you can redistribute it and/or modify it under the terms of the GNU General Public License as published by the Free Software Foundation; either version 2 of the License, or (at your option) any later version.
This program is distributed in the hope that it will be useful, but WITHOUT ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the GNU General Public License for more details.
You should have received a copy of the GNU General Public License along with this program; if not, write to the Free Software Foundation, Inc., 51 Franklin Street, Fifth Floor, Boston, MA 02110-1301, USA.
"""

# Internal
from typing import Any, Dict, Mapping
from pathlib import Path

# External
import orjson

# Project
from .. import __version__
from ._config import ExperimentConfig, config_hash
from ..grids import format_provenance
from ..logger import get_logger
from .._errors import DataFileError

logger = get_logger(__name__)

_JSON_OPTIONS = orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY


def provenance_for(cfg: ExperimentConfig) -> Dict[str, str]:
    return {"config_hash": config_hash(cfg), "version": __version__, "command": cfg.command}


def write_json_report(path: Path, payload: Any, provenance: Mapping[str, str]) -> None:
    """Write a JSON document below a ``#`` provenance line, keys sorted for stable output"""
    with path.open("wb") as file:
        file.write(format_provenance(provenance).encode("utf-8"))
        file.write(orjson.dumps(payload, option=_JSON_OPTIONS))
        file.write(b"\n")

    logger.debug("Wrote report %s", path)


def read_json_report(path: Path) -> Any:
    """Read a report written by ``write_json_report``, skipping its ``#`` lines

    Raises:
        DataFileError: the document is not valid JSON

    """
    lines = path.read_bytes().splitlines(keepends=True)
    body = b"".join(line for line in lines if not line.startswith(b"#"))
    try:
        return orjson.loads(body)
    except orjson.JSONDecodeError as exc:
        raise DataFileError(f"{path}: {exc}") from exc


__all__ = ("provenance_for", "read_json_report", "write_json_report")
