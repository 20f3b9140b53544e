"""Validation utilities for SpecWin inputs."""

from __future__ import annotations

import math
import re
from collections.abc import Sequence
from typing import Any

_GRID_PATTERN = re.compile(r"^\s*(\d+)\s*[xX]\s*(\d+)\s*$")


def coerce_complex_pair(value: Any) -> tuple[float, float]:
    """Normalize a complex number given as ``[re, im]``, a real, or a complex.

    Args:
        value: The raw value from a configuration file or the command line

    Returns:
        The ``(re, im)`` pair

    Raises:
        ValueError: If the value cannot be read as a finite complex number
    """
    if isinstance(value, bool):
        raise ValueError(f"Expected a number or [re, im] pair, got {value!r}")
    if isinstance(value, complex):
        pair = (value.real, value.imag)
    elif isinstance(value, (int, float)):
        pair = (float(value), 0.0)
    elif isinstance(value, Sequence) and not isinstance(value, (str, bytes)):
        if len(value) != 2:
            raise ValueError(f"Complex numbers are [re, im] pairs, got {len(value)} entries: {value!r}")
        try:
            pair = (float(value[0]), float(value[1]))
        except (TypeError, ValueError) as e:
            raise ValueError(f"Complex pair entries must be numbers: {value!r}") from e
    else:
        raise ValueError(f"Expected a number or [re, im] pair, got {value!r}")

    if not all(math.isfinite(part) for part in pair):
        raise ValueError(f"Complex value must be finite: {value!r}")
    return pair


def pair_to_complex(pair: Sequence[float]) -> complex:
    """Build a Python complex from an ``(re, im)`` pair."""
    return complex(float(pair[0]), float(pair[1]))


def complex_to_pair(value: complex) -> tuple[float, float]:
    """Split a complex number into a JSON-friendly ``(re, im)`` pair."""
    value = complex(value)
    return (float(value.real), float(value.imag))


def parse_grid(spec: str) -> tuple[int, int]:
    """Parse a ``WxH`` grid specification.

    Args:
        spec: Grid specification such as ``"201x201"``

    Returns:
        The ``(width, height)`` pair

    Raises:
        ValueError: If the specification is malformed or exceeds 512 x 512
    """
    match = _GRID_PATTERN.match(spec or "")
    if not match:
        raise ValueError(f"Grid must look like WxH, got {spec!r}")
    width, height = int(match.group(1)), int(match.group(2))
    if not (2 <= width <= 512 and 2 <= height <= 512):
        raise ValueError(f"Grid resolution must lie between 2x2 and 512x512, got {width}x{height}")
    return width, height


def validate_tolerance(tol: float, upper: float = 1e-3) -> float:
    """Check that a tolerance lies in ``(0, upper]``."""
    if not (0.0 < tol <= upper):
        raise ValueError(f"Tolerance must lie in (0, {upper:g}], got {tol!r}")
    return tol
