"""
File: ./heattrack/__main__.py
Project: heattrack

This program is free software; you can redistribute it and/or modify it under the terms of the GNU General Public License as published by the Free Software Foundation; either version 2 of the License, or (at your option) any later version.
This program is distributed in the hope that it will be useful, but WITHOUT ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the GNU General Public License for more details.
You should have received a copy of the GNU General Public License along with this program; if not, write to the Free Software Foundation, Inc., 51 Franklin Street, Fifth Floor, Boston, MA 02110-1301, USA.
"""

# Internal
import os
import sys
from typing import Literal, NoReturn, Optional, Sequence
from logging import INFO, WARN, DEBUG
from pathlib import Path
from argparse import ArgumentError

# External
from tap import Tap

from heattrack import (
    ConfigError,
    DataFileError,
    PropertyFailure,
    __summary__,
    __version__,
)
from heattrack.cli import load_config, run_experiment
from heattrack.logger import get_logger, set_level

logger = get_logger(__name__)

# Exit codes
EXIT_CONFIG = 2
EXIT_PROPERTY = 3
EXIT_IO = 4


class ArgumentParser(Tap):
    config: Optional[Path] = None  # JSON experiment config, defaults apply when omitted
    command: Optional[Literal["track", "cost-curve", "gs", "transmute", "hum", "verify"]] = None
    """Pipeline to run, overrides the config command"""
    out: Optional[Path] = None  # Output directory, overrides the config
    seed: Optional[int] = None  # Seed of randomized property checks, overrides the config
    quiet: bool = False  # Only report warnings and errors
    verbose: int = 0  # Verbosity level, Maximum is -vv

    def configure(self) -> None:
        self.add_argument("--config", "-c")
        self.add_argument("--out", "-o")
        self.add_argument("--quiet", "-q")
        self.add_argument("--verbose", "-v", action="count")
        self.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    def process_args(self) -> None:
        if self.seed is not None and self.seed < 0:
            self.error("--seed must be a non-negative integer")
        if self.quiet and self.verbose:
            self.error("--quiet and --verbose can't be combined")


def main(raw_args: Sequence[str] = sys.argv[1:]) -> NoReturn:
    arg_parser = ArgumentParser(underscores_to_dashes=True, description=__summary__)

    try:
        args = arg_parser.parse_args(raw_args)
    except ArgumentError as exc:
        print(exc.message, file=sys.stderr)
        arg_parser.print_usage()
        sys.exit(EXIT_CONFIG)

    # Default is INFO, --quiet lowers it to WARN and -vv raises it to DEBUG
    set_level(WARN if args.quiet else (DEBUG if args.verbose >= 2 else INFO))

    try:
        cfg = load_config(args.config, command=args.command, seed=args.seed, out=args.out)
        for path in run_experiment(cfg):
            print(path)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        sys.exit(EXIT_CONFIG)
    except PropertyFailure as exc:
        print(f"property failure: {exc}", file=sys.stderr)
        sys.exit(EXIT_PROPERTY)
    except BrokenPipeError:
        # https://docs.python.org/3/library/signal.html#note-on-sigpipe
        devnull = os.open(os.devnull, os.O_WRONLY)
        os.dup2(devnull, sys.stdout.fileno())
        sys.exit(EXIT_IO)
    except (DataFileError, OSError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        sys.exit(EXIT_IO)
    except Exception:
        logger.exception("Unexpected failure")
        sys.exit(1)

    sys.exit(0)


if __name__ == "__main__":
    main()
