"""Lifetime algebra of a few coherent structures.

Each function maps component lifetimes to the system lifetime through the
min/max expression of its structure function. They serve as brute-force
validators and as building blocks for simulation.
"""

from __future__ import annotations

from itertools import combinations
from typing import Sequence

__all__ = [
    "LITERAL_MAX_N",
    "consecutive_kofn_lifetime",
    "kofn_lifetime",
    "min_of_max",
    "serial_spare_lifetime",
]

LITERAL_MAX_N = 20


def _lifetimes(x: Sequence[float]) -> list[float]:
    values = [float(v) for v in x]
    if not values:
        raise ValueError("at least one lifetime is required")
    if any(not v >= 0 for v in values):
        raise ValueError("lifetimes must be nonnegative")
    return values


def _check_k(k: int, n: int) -> None:
    if int(k) != k or not 1 <= k <= n:
        raise ValueError(f"k must be an integer in [1, {n}], got {k!r}")


def min_of_max(x: Sequence[float], size: int) -> float:
    """``min(max(A) for A in subsets of x of this size)``, by enumeration."""
    values = _lifetimes(x)
    _check_k(size, len(values))
    return min(max(a) for a in combinations(values, size))


def kofn_lifetime(x: Sequence[float], k: int) -> float:
    """Lifetime of a system that works while at least ``k`` of ``n`` components work.

    Such a system fails as soon as every component in some subset of size
    ``n - k + 1`` has failed, so its lifetime is the minimum over those
    subsets of their maxima: the ``(n - k + 1)``-th smallest lifetime. The
    subsets are enumerated when ``n <= LITERAL_MAX_N``; above that the order
    statistic is returned directly.
    """
    values = _lifetimes(x)
    n = len(values)
    _check_k(k, n)
    if n <= LITERAL_MAX_N:
        return min_of_max(values, n - k + 1)
    return sorted(values)[n - k]


def consecutive_kofn_lifetime(x: Sequence[float], k: int) -> float:
    """Lifetime of a linear system that fails once ``k`` consecutive components fail.

    Evaluated as the minimum, over the ``n - k + 1`` windows of ``k``
    neighbours, of the window maximum.
    """
    values = _lifetimes(x)
    n = len(values)
    _check_k(k, n)
    return min(max(values[j : j + k]) for j in range(n - k + 1))


def serial_spare_lifetime(x1: float, x2: float, y: float) -> float:
    """Two series components ``x1``, ``x2`` with a replacement component ``y``.

    ``max(min(max(x1, y), x2), min(x1, max(x2, y)))``
    """
    x1, x2, y = _lifetimes((x1, x2, y))
    return max(min(max(x1, y), x2), min(x1, max(x2, y)))
