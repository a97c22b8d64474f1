from __future__ import annotations

import numpy as np

from ..errors import ContractViolation
from .types import Configuration

__all__ = (
    "distance",
    "interpolate",
)


def _check_dimensions(a: Configuration, b: Configuration) -> None:
    if np.shape(a) != np.shape(b):
        raise ContractViolation(f"Configuration dimensions differ: {np.shape(a)} and {np.shape(b)}.")


def distance(a: Configuration, b: Configuration) -> float:
    """Returns the Euclidean distance between two configurations.

    Raises
    ------
    ContractViolation
        The configurations have different dimensions.
    """
    _check_dimensions(a, b)
    return float(np.linalg.norm(np.asarray(a, dtype=np.float64) - np.asarray(b, dtype=np.float64)))


def interpolate(a: Configuration, b: Configuration, s: float) -> Configuration:
    """Returns the configuration a fraction ``s`` of the way from ``a`` to ``b``.

    Parameters
    ----------
    a : Configuration
        The configuration returned for ``s = 0``.
    b : Configuration
        The configuration returned for ``s = 1``.
    s : float
        The fraction, within ``[0, 1]``.

    Raises
    ------
    ContractViolation
        The dimensions differ or ``s`` is outside ``[0, 1]``.
    """
    _check_dimensions(a, b)
    if not 0.0 <= s <= 1.0:
        raise ContractViolation(f"Interpolation parameter must lie in [0, 1], got {s}.")
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if s == 0.0:
        return a.copy()
    if s == 1.0:
        return b.copy()
    return a + s * (b - a)
