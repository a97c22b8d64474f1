from __future__ import annotations

from typing import TextIO

import numpy as np

from ..errors import ContractViolation
from .types import Path

__all__ = (
    "dump_path",
    "load_path",
)


_BLOCKED_PREFIX = "blocked:"


def dump_path(path: Path, stream: TextIO) -> None:
    """Writes a path as text, one waypoint per line with space-separated coordinates.

    Obstructed edges are listed in a leading ``# blocked: ...`` comment line.
    """
    header = f"{_BLOCKED_PREFIX} {' '.join(str(edge) for edge in sorted(path.blocked))}" if path.blocked else ""
    np.savetxt(stream, path.waypoints, fmt="%.17g", delimiter=" ", header=header)


def load_path(stream: TextIO) -> Path:
    """Reads a path written by :func:`dump_path`.

    Raises
    ------
    ContractViolation
        The text holds no waypoints or rows of different widths.
    """
    lines = stream.read().splitlines()
    blocked: list[int] = []
    rows: list[str] = []
    for line in lines:
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            comment = stripped.lstrip("#").strip()
            if comment.startswith(_BLOCKED_PREFIX):
                blocked.extend(int(edge) for edge in comment[len(_BLOCKED_PREFIX) :].split())
            continue
        rows.append(stripped)

    if not rows:
        raise ContractViolation("The path dump holds no waypoints.")
    try:
        waypoints = np.loadtxt(rows, dtype=np.float64, ndmin=2)
    except ValueError as e:
        raise ContractViolation(f"Malformed path dump: {e}") from e
    return Path(waypoints, blocked)
