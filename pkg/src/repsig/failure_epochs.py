"""Survival of the k-th component failure epoch of a two-component repairable system.

Each of the ``k - 1`` earlier failures is attributed to either component with
probability 1/2. If the failing component has failed ``j - 1`` times before,
it has spent ``j`` exponential working periods and ``j - 1`` exponential
repairs, so the epoch survival is a binomial mixture over
``Erlang(j, lam) + Erlang(j - 1, mu)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.stats import binom

from .distributions import ErlangSumParams, Rates, erlang_sum_survival

__all__ = [
    "EpochMixture",
    "component_params",
    "epoch_mixture",
    "epoch_survival",
    "epoch_survival_table",
    "epoch_weights",
]

EXACT_WEIGHTS_MAX_K = 64


def epoch_weights(k: int) -> tuple[float, ...]:
    """``C(k-1, j-1) / 2**(k-1)`` for ``j = 1..k``."""
    if int(k) != k or k < 1:
        raise ValueError(f"epoch index must be an integer >= 1, got {k!r}")
    k = int(k)
    if k <= EXACT_WEIGHTS_MAX_K:
        denom = 1 << (k - 1)
        # exact integer ratio, correctly rounded by int true division
        return tuple(math.comb(k - 1, j) / denom for j in range(k))
    # big-integer binomials get slow; the pmf is accurate to a few ulp
    return tuple(binom.pmf(np.arange(k), k - 1, 0.5).tolist())


def component_params(j: int, rates: Rates) -> ErlangSumParams:
    return ErlangSumParams.of(j, rates.lam, j - 1, rates.mu)


@dataclass(frozen=True)
class EpochMixture:
    k: int
    rates: Rates
    weights: tuple[float, ...]
    components: tuple[ErlangSumParams, ...]

    def survival(self, t: float) -> float:
        return math.fsum(
            w * erlang_sum_survival(c, t) for w, c in zip(self.weights, self.components)
        )


@lru_cache(maxsize=1024)
def epoch_mixture(k: int, rates: Rates) -> EpochMixture:
    weights = epoch_weights(k)
    components = tuple(component_params(j, rates) for j in range(1, k + 1))
    return EpochMixture(int(k), rates, weights, components)


def epoch_survival(k: int, rates: Rates, t: float) -> float:
    """P(U_k > t). For ``k = 1`` this is ``exp(-lam * t)``."""
    return epoch_mixture(k, rates).survival(t)


def epoch_survival_table(k_max: int, rates: Rates, grid: Sequence[float]) -> np.ndarray:
    """Epoch survivals for ``k = 1..k_max`` on ``grid``.

    Returns an array of shape ``(len(grid), k_max)``; column ``k - 1`` holds
    ``P(U_k > t)``. Each Erlang-sum component is evaluated once per time.
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    grid = [float(t) for t in grid]
    comps = np.ones((len(grid), k_max))
    for i, t in enumerate(grid):
        for j in range(1, k_max + 1):
            v = erlang_sum_survival(component_params(j, rates), t)
            comps[i, j - 1] = v
            # components grow stochastically with j, so the rest are 1 too
            if v >= 1.0:
                break
    weights = np.zeros((k_max, k_max))
    for k in range(1, k_max + 1):
        weights[k - 1, :k] = epoch_weights(k)
    # all weights and survivals are positive, so a plain product loses nothing
    return np.clip(comps @ weights.T, 0.0, 1.0)
