"""Console log formatter, derived from LogFormatter from Tornado (Copyright 2009 Facebook)
Original:
    https://github.com/tornadoweb/tornado/blob/1db5b45918da8303d2c6958ee03dbbd5dc2709e9/tornado/log.py#L81-L208
Licensed under:
    Apache-2.0 License (https://github.com/tornadoweb/tornado/blob/1db5b45918da8303d2c6958ee03dbbd5dc2709e9/LICENSE)
"""

# Internal
import os
import sys
from typing import Any, Dict, Tuple, Optional
from logging import INFO, DEBUG, ERROR, WARNING, CRITICAL, Formatter, LogRecord

# External
import numpy as np

_ANSI_COLORS = {
    DEBUG: 4,  # Blue
    INFO: 2,  # Green
    WARNING: 3,  # Yellow
    ERROR: 1,  # Red
    CRITICAL: 5,  # Magenta
}


def _stderr_colors() -> Optional[Tuple[Dict[int, str], str]]:
    if "NO_COLOR" in os.environ or os.name == "nt":
        return None

    if not (hasattr(sys.stderr, "isatty") and sys.stderr.isatty()):
        return None

    try:
        # Internal
        import curses

        curses.setupterm()
        if curses.tigetnum("colors") > 0:
            fg_color = curses.tigetstr("setaf") or curses.tigetstr("setf") or b""
            return {
                levelno: str(curses.tparm(fg_color, code), "ascii")
                for levelno, code in _ANSI_COLORS.items()
            }, str(curses.tigetstr("sgr0") or b"", "ascii")
    except Exception:
        return {
            levelno: ("\033[2;3%dm" % code) for levelno, code in _ANSI_COLORS.items()
        }, "\033[0m"

    return None


def _compact(arg: Any) -> Any:
    """Shorten numeric log arguments: arrays become a shape/range summary"""
    if isinstance(arg, np.ndarray):
        if arg.size == 0:
            return f"array{arg.shape}"
        if arg.size <= 6:
            return np.array2string(arg, precision=6, separator=", ")
        return f"array{arg.shape}[min={np.min(arg):.6g}, max={np.max(arg):.6g}]"
    if isinstance(arg, (float, np.floating)):
        return f"{float(arg):.6g}"
    return arg


class ConsoleFormatter(Formatter):
    """Single header line per record, coloured by level when stderr is a terminal"""

    DEFAULT_FORMAT = (
        "%(color)s[%(levelname).1s %(asctime)s %(name)s]%(end_color)s %(message)s"
    )
    DEFAULT_DATE_FORMAT = "%H:%M:%S"

    def __init__(self, fmt: str = DEFAULT_FORMAT, datefmt: str = DEFAULT_DATE_FORMAT) -> None:
        super().__init__(fmt, datefmt)

        colors = _stderr_colors()
        if colors is None:
            self._colors: Optional[Dict[int, str]] = None
            self._normal = ""
        else:
            self._colors, self._normal = colors

    def format(self, record: LogRecord) -> str:
        try:
            message = str(record.msg)
            if isinstance(record.args, tuple) and record.args:
                message = message % tuple(_compact(arg) for arg in record.args)
            elif isinstance(record.args, dict):
                message = message % {name: _compact(arg) for name, arg in record.args.items()}
            record.message = message
        except Exception as exc:
            record.message = "Bad message"
            record.exc_info = (type(exc), exc, exc.__traceback__)

        record.asctime = self.formatTime(record, self.datefmt)

        color = ""
        end_color = ""
        if self._colors and record.levelno in self._colors:
            color = self._colors[record.levelno]
            end_color = self._normal

        formatted = (self._fmt or type(self).DEFAULT_FORMAT) % {
            **record.__dict__,
            "color": color,
            "end_color": end_color,
        }

        if record.exc_info and not record.exc_text:
            record.exc_text = self.formatException(record.exc_info)

        if record.exc_text:
            formatted = "\n".join([formatted.rstrip(), *record.exc_text.split("\n")])

        return formatted.replace("\n", "\n    ")


__all__ = ("ConsoleFormatter",)
