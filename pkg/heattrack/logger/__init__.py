"""
File: ./heattrack/logger/__init__.py
Project: heattrack

This program is free software; you can redistribute it and/or modify it under the terms of the GNU General Public License as published by the Free Software Foundation; either version 2 of the License, or (at your option) any later version.
This program is distributed in the hope that it will be useful, but WITHOUT ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the GNU General Public License for more details.
You should have received a copy of the GNU General Public License along with this program; if not, write to the Free Software Foundation, Inc., 51 Franklin Street, Fifth Floor, Boston, MA 02110-1301, USA.
"""

# Internal
from typing import Union
from logging import DEBUG, Logger, Handler, StreamHandler, captureWarnings
from pathlib import Path
from logging.handlers import RotatingFileHandler

# Project
from ._json_formatter import JSONFormatter
from ._console_formatter import ConsoleFormatter

_LOG_FILE_NAME = "run.log.jsonl"
_MAX_LOG_FILE_SIZE = 10 * 1024 * 1024
_MAX_LOG_FILE_COUNT = 3

# Setup root logger basic config
Logger.root.setLevel(DEBUG)
_stderr_stream_handler = StreamHandler()
_stderr_stream_handler.setFormatter(ConsoleFormatter())
Logger.root.addHandler(_stderr_stream_handler)

# Numerical warnings (truncation, corner compatibility) go through logging
captureWarnings(True)


def set_level(level: Union[str, int]) -> None:
    """Set global logger level.

    Arguments:
        level: Level to be used.

    """
    for handler in Logger.root.handlers:
        handler.setLevel(level)


def get_logger(name: str) -> Logger:
    """Retrieve a heattrack logger.

    Arguments:
        name: Logger name.

    """
    return Logger.root.getChild(name)


def add_jsonl_handler(
    log_dir: Path,
    *,
    file_size_limit: int = _MAX_LOG_FILE_SIZE,
    file_count_limit: int = _MAX_LOG_FILE_COUNT,
) -> Handler:
    """Attach a structured JSON lines log file to the root logger.

    Arguments:
        log_dir: Directory that receives the log file, usually a run output directory.
        file_size_limit: Limit of logger file size.
        file_count_limit: Limit of existing logger file.

    Raises:
        NotADirectoryError: log_dir exists and is not a directory

    Returns:
        The attached handler, so callers can detach it when the run ends

    """
    if log_dir.exists():
        if not log_dir.is_dir():
            raise NotADirectoryError("log_dir must point to a directory")
    else:
        log_dir.mkdir(parents=True, exist_ok=True)

    rfh = RotatingFileHandler(
        filename=log_dir / _LOG_FILE_NAME,
        encoding="utf8",
        maxBytes=file_size_limit,
        backupCount=file_count_limit,
    )
    rfh.setFormatter(JSONFormatter())
    Logger.root.addHandler(rfh)

    return rfh


def remove_handler(handler: Handler) -> None:
    Logger.root.removeHandler(handler)
    handler.close()


__all__ = ("get_logger", "set_level", "add_jsonl_handler", "remove_handler")
