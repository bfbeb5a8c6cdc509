"""
File: ./heattrack/logger/_json_formatter.py
Project: heattrack

This program is free software; you can redistribute it and/or modify it under the terms of the GNU General Public License as published by the Free Software Foundation; either version 2 of the License, or (at your option) any later version.
This program is distributed in the hope that it will be useful, but WITHOUT ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the GNU General Public License for more details.
You should have received a copy of the GNU General Public License along with this program; if not, write to the Free Software Foundation, Inc., 51 Franklin Street, Fifth Floor, Boston, MA 02110-1301, USA.
"""

# Internal
from logging import Formatter, LogRecord

# External
import orjson


class JSONFormatter(Formatter):
    """One JSON object per record, numeric arguments kept as numbers and time as a float epoch"""

    def format(self, record: LogRecord) -> str:
        return orjson.dumps(
            {
                "name": record.name,
                "levelname": record.levelname,
                "created": record.created,
                "module": record.module,
                "funcName": record.funcName,
                "lineno": record.lineno,
                "message": record.getMessage(),
                "template": record.msg if isinstance(record.msg, str) else repr(record.msg),
                "arguments": record.args,
                "exc_info": (
                    self.formatException(record.exc_info) if record.exc_info else record.exc_text
                ),
                "threadName": record.threadName,
            },
            default=repr,
            option=orjson.OPT_NON_STR_KEYS | orjson.OPT_SERIALIZE_NUMPY,
        ).decode("utf-8")


__all__ = ("JSONFormatter",)
