"""System reliability as a signature-weighted mixture of failure-epoch survivals.

``R(t) = sum_k s_k P(U_k > t)`` over the retained signature terms. The sum is
not renormalized: discarded signature mass is reported as ``tail_mass`` and
``R(t) + tail_mass`` bounds the untruncated value from above.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .distributions import Rates, xi_exponential
from .failure_epochs import epoch_survival, epoch_survival_table
from .signature import (
    Signature,
    Truncation,
    TruncatedSignature,
    parallel_n_signature,
    remark5_signature,
    serial2_xi,
    truncate,
)

__all__ = [
    "TOPOLOGIES",
    "ReliabilityCurve",
    "RepairableSpec",
    "TruncationWarning",
    "reliability_curve",
    "system_reliability",
]

TOPOLOGIES = ("parallel2", "parallelN", "serial2spare", "remark5")
TAIL_WARNING_LEVEL = 0.05


class TruncationWarning(UserWarning):
    """More than 5% of the signature mass was discarded."""


@dataclass(frozen=True)
class RepairableSpec:
    """A repairable system: topology plus component failure and repair rates.

    ``n`` is the number of parallel components for ``parallelN``; ``q`` is the
    series-component failure probability for ``remark5``.
    """

    topology: str
    rates: Rates
    n: int | None = None
    q: float | None = None

    def __post_init__(self):
        if self.topology not in TOPOLOGIES:
            raise ValueError(f"unknown topology {self.topology!r}; expected one of {TOPOLOGIES}")
        if self.topology == "parallelN" and self.n is None:
            raise ValueError("parallelN needs n")
        if self.topology == "remark5" and self.q is None:
            raise ValueError("remark5 needs q")

    @property
    def xi(self) -> float:
        if self.topology == "serial2spare":
            return serial2_xi(self.rates)
        return xi_exponential(self.rates)

    def signature(self) -> Signature:
        if self.topology == "parallelN":
            return parallel_n_signature(self.n, self.xi)
        if self.topology == "remark5":
            return remark5_signature(self.q, self.xi)
        return parallel_n_signature(2, self.xi)

    def check_epochs_defined(self) -> None:
        # epoch mixtures exist only for two repairable components
        if self.topology == "parallelN" and self.n != 2:
            raise ValueError(
                "failure-epoch laws are only available for two-component systems; "
                f"parallelN with n={self.n} has signatures but no reliability"
            )


@dataclass(frozen=True)
class ReliabilityCurve:
    grid: np.ndarray
    values: np.ndarray
    terms: int
    tail_mass: float
    rates: Rates
    topology: str
    retained: TruncatedSignature = field(repr=False, default=None)

    @property
    def upper(self) -> np.ndarray:
        """Upper bracket on the untruncated reliability."""
        return np.minimum(self.values + self.tail_mass, 1.0)

    def __len__(self) -> int:
        return len(self.grid)


def _warn_tail(tail_mass: float) -> None:
    if tail_mass > TAIL_WARNING_LEVEL:
        warnings.warn(
            f"truncation discards {tail_mass:.3g} of the signature mass",
            TruncationWarning,
            stacklevel=3,
        )


def system_reliability(s: Signature, r: Rates, t: float, tr: Truncation) -> float:
    """P(U > t) from the retained terms of ``s``, without renormalization."""
    kept = truncate(s, tr)
    _warn_tail(kept.tail_mass)
    return math.fsum(mass * epoch_survival(k, r, t) for k, mass in kept.terms)


def _check_grid(grid: Sequence[float]) -> np.ndarray:
    g = np.asarray(list(grid), dtype=float).reshape(-1)
    if g.size and (np.any(~np.isfinite(g)) or np.any(g < 0)):
        raise ValueError("grid times must be finite and nonnegative")
    if np.any(np.diff(g) < 0):
        raise ValueError("grid must be sorted ascending")
    return g


def reliability_curve(
    spec: RepairableSpec, grid: Sequence[float], tr: Truncation
) -> ReliabilityCurve:
    """Evaluate ``R(t)`` on ``grid``, sharing epoch survivals across times."""
    spec.check_epochs_defined()
    g = _check_grid(grid)
    kept = truncate(spec.signature(), tr)
    _warn_tail(kept.tail_mass)
    values = np.zeros(g.size)
    if g.size:
        table = epoch_survival_table(kept.max_index, spec.rates, g)
        for i in range(g.size):
            values[i] = math.fsum(mass * table[i, k - 1] for k, mass in kept.terms)
    return ReliabilityCurve(
        grid=g,
        values=values,
        terms=len(kept.terms),
        tail_mass=kept.tail_mass,
        rates=spec.rates,
        topology=spec.topology,
        retained=kept,
    )
