"""
File: ./heattrack/special/_factorial.py
Project: heattrack

This program is free software; you can redistribute it and/or modify it under the terms of the GNU General Public License as published by the Free Software Foundation; either version 2 of the License, or (at your option) any later version.
This program is distributed in the hope that it will be useful, but WITHOUT ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the GNU General Public License for more details.
You should have received a copy of the GNU General Public License along with this program; if not, write to the Free Software Foundation, Inc., 51 Franklin Street, Fifth Floor, Boston, MA 02110-1301, USA.
"""

# Internal
from math import comb, factorial

# Project
from ..logger import get_logger
from .._errors import OutOfRangeError

logger = get_logger(__name__)


def factorial_inequality_check(i_max: int) -> bool:
    """Check (i!)²·(2i+1)·C(2i, i) = (2i+1)! and C(2i, i) >= 2^i for 1 <= i <= i_max.

    Runs in exact integer arithmetic.

    Raises:
        OutOfRangeError: i_max below 1

    """
    if i_max < 1:
        raise OutOfRangeError(f"i_max must be at least 1, got {i_max}")

    for i in range(1, i_max + 1):
        central = comb(2 * i, i)
        if factorial(i) ** 2 * (2 * i + 1) * central != factorial(2 * i + 1):
            logger.warning("Factorial identity fails at i=%d", i)
            return False
        if central < 2**i:
            logger.warning("Central binomial bound fails at i=%d", i)
            return False

    return True


__all__ = ("factorial_inequality_check",)
