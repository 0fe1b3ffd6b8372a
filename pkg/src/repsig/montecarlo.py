"""Discrete-event Monte Carlo oracle for the analytic results.

Replications are grouped into fixed-size chunks. Chunk ``i`` draws from its own
stream, seeded by ``SeedSequence(seed, spawn_key=(i,))``, so outputs depend
only on ``(seed, replications, grid)`` and never on the number of workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import stats

from .distributions import ErlangSumParams, Rates
from .reliability import RepairableSpec, reliability_curve
from .signature import Truncation

__all__ = [
    "CHUNK_SIZE",
    "GAP_CAP",
    "ComparisonReport",
    "GeometricFit",
    "SimConfig",
    "SimEstimate",
    "compare_analytic",
    "estimate_serial_xi",
    "geometric_fit",
    "simulate_erlang_sum",
    "simulate_parallel2",
]

CHUNK_SIZE = 1 << 14
GAP_CAP = 10**6
FIRST_GAP_MODES = ("single", "racing")


@dataclass(frozen=True)
class SimConfig:
    """Simulation settings.

    ``first_gap="racing"`` draws the first failure as the minimum of two
    working components, Exp(2 lam), instead of Exp(lam). It is provided for
    exploration; no analytic result in this package models it.
    """

    rates: Rates
    replications: int
    seed: int
    time_grid: tuple[float, ...] = ()
    workers: int = 1
    first_gap: str = "single"

    def __post_init__(self):
        object.__setattr__(self, "time_grid", tuple(float(t) for t in self.time_grid))
        if int(self.replications) != self.replications or self.replications < 1:
            raise ValueError(f"replications must be a positive integer, got {self.replications!r}")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if int(self.workers) != self.workers or self.workers < 1:
            raise ValueError("workers must be a positive integer")
        if any(b < a for a, b in zip(self.time_grid, self.time_grid[1:])):
            raise ValueError("time grid must be sorted ascending")
        if self.first_gap not in FIRST_GAP_MODES:
            raise ValueError(f"first_gap must be one of {FIRST_GAP_MODES}")


@dataclass(frozen=True)
class SimEstimate:
    grid: np.ndarray
    estimates: np.ndarray
    std_errors: np.ndarray
    replications: int
    seed: int
    histogram: dict[int, int] = field(default_factory=dict)
    flagged: int = 0

    @property
    def value(self) -> float:
        return float(self.estimates[0])

    @property
    def std_error(self) -> float:
        return float(self.std_errors[0])

    def z_scores(self, truth: Sequence[float] | float) -> np.ndarray:
        """Deviations from ``truth`` in units of the binomial s.e. under ``truth``."""
        p = np.broadcast_to(np.asarray(truth, dtype=float), self.estimates.shape)
        sd = np.sqrt(p * (1.0 - p) / self.replications)
        diff = self.estimates - p
        with np.errstate(divide="ignore", invalid="ignore"):
            z = np.where(sd > 0, diff / np.where(sd > 0, sd, 1.0), np.where(diff == 0, 0.0, np.inf))
        return z

    @property
    def index_counts(self) -> tuple[np.ndarray, np.ndarray]:
        keys = np.array(sorted(self.histogram), dtype=int)
        return keys, np.array([self.histogram[k] for k in keys], dtype=np.int64)

    @property
    def mean_index(self) -> float:
        keys, counts = self.index_counts
        return float(np.dot(keys, counts) / counts.sum())

    @property
    def mean_index_se(self) -> float:
        keys, counts = self.index_counts
        total = counts.sum()
        mean = np.dot(keys, counts) / total
        var = np.dot((keys - mean) ** 2, counts) / (total - 1)
        return float(math.sqrt(var / total))


def _proportions(hits: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    p = hits / n if n else np.full(hits.shape, np.nan)
    return p, np.sqrt(p * (1.0 - p) / max(n, 1))


def _chunk_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def _run_chunks(cfg: SimConfig, work: Callable[[np.random.Generator, int], dict]) -> list[dict]:
    sizes = [CHUNK_SIZE] * (cfg.replications // CHUNK_SIZE)
    if cfg.replications % CHUNK_SIZE:
        sizes.append(cfg.replications % CHUNK_SIZE)

    def job(i: int) -> dict:
        return work(_chunk_rng(cfg.seed, i), sizes[i])

    if cfg.workers == 1 or len(sizes) == 1:
        return [job(i) for i in range(len(sizes))]
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        return list(pool.map(job, range(len(sizes))))


def _survival_counts(lifetimes: np.ndarray, grid: np.ndarray) -> np.ndarray:
    ordered = np.sort(lifetimes)
    return ordered.size - np.searchsorted(ordered, grid, side="right")


def simulate_parallel2(cfg: SimConfig) -> SimEstimate:
    """Simulate a two-component parallel system under repair.

    Gaps between component failures are iid Exp(lam) and repairs iid Exp(mu).
    The system fails at the first gap ``j >= 2`` that ends before the repair
    started at the previous failure. The lifetime is the sum of the gaps up
    to and including that one. Replications still running after ``GAP_CAP``
    gaps are dropped from the estimates and counted in ``flagged``.
    """
    lam, mu = cfg.rates.lam, cfg.rates.mu
    grid = np.asarray(cfg.time_grid, dtype=float)
    first_rate = 2.0 * lam if cfg.first_gap == "racing" else lam

    def work(rng: np.random.Generator, n: int) -> dict:
        lifetime = rng.exponential(1.0 / first_rate, n)
        index = np.zeros(n, dtype=np.int64)
        alive = np.arange(n)
        j = 2
        while alive.size and j <= GAP_CAP:
            gap = rng.exponential(1.0 / lam, alive.size)
            repair = rng.exponential(1.0 / mu, alive.size)
            lifetime[alive] += gap
            failed = gap < repair
            index[alive[failed]] = j
            alive = alive[~failed]
            j += 1
        ok = index > 0
        return {
            "survivors": _survival_counts(lifetime[ok], grid),
            "histogram": np.bincount(index[ok]),
            "n": int(ok.sum()),
            "flagged": int(n - ok.sum()),
        }

    parts = _run_chunks(cfg, work)
    n = sum(p["n"] for p in parts)
    survivors = sum((p["survivors"] for p in parts), np.zeros(grid.size, dtype=np.int64))
    hist: dict[int, int] = {}
    for p in parts:
        for k in np.flatnonzero(p["histogram"]):
            hist[int(k)] = hist.get(int(k), 0) + int(p["histogram"][k])
    est, se = _proportions(survivors, n)
    return SimEstimate(
        grid, est, se, n, cfg.seed, dict(sorted(hist.items())), sum(p["flagged"] for p in parts)
    )


def simulate_erlang_sum(p: ErlangSumParams, cfg: SimConfig) -> SimEstimate:
    """Empirical survival of ``Erlang(k, lam) + Erlang(m, mu)`` on the config grid."""
    k, lam = p.first.shape, p.first.rate
    m, mu = p.second_shape, p.second_rate
    grid = np.asarray(cfg.time_grid, dtype=float)

    def work(rng: np.random.Generator, n: int) -> dict:
        total = rng.standard_exponential((n, k)).sum(axis=1) / lam
        if m:
            total += rng.standard_exponential((n, m)).sum(axis=1) / mu
        return {"survivors": _survival_counts(total, grid)}

    parts = _run_chunks(cfg, work)
    survivors = sum((q["survivors"] for q in parts), np.zeros(grid.size, dtype=np.int64))
    est, se = _proportions(survivors, cfg.replications)
    return SimEstimate(grid, est, se, cfg.replications, cfg.seed)


def estimate_serial_xi(r: Rates, cfg: SimConfig, *, shared_repair: bool = True) -> SimEstimate:
    """Estimate the probability that the series pair outlives the first repair.

    ``X2`` (surviving series component) and ``Y`` (replacement) are
    Exp(lam); the repair ``Z1`` of the first failed component is Exp(mu).
    With ``shared_repair`` the event is ``min(X2, Y) > Z1`` with one repair
    draw, whose probability is ``mu / (2 lam + mu)``. Without it, ``X2`` and
    ``Y`` are each compared against an independent repair draw, which is the
    product form ``(mu / (lam + mu)) ** 2``.
    """

    def work(rng: np.random.Generator, n: int) -> dict:
        x2 = rng.exponential(1.0 / r.lam, n)
        y = rng.exponential(1.0 / r.lam, n)
        z1 = rng.exponential(1.0 / r.mu, n)
        if shared_repair:
            hit = np.minimum(x2, y) > z1
        else:
            hit = (x2 > z1) & (y > rng.exponential(1.0 / r.mu, n))
        return {"hits": int(np.count_nonzero(hit))}

    hits = sum(q["hits"] for q in _run_chunks(cfg, work))
    est, se = _proportions(np.array([hits], dtype=float), cfg.replications)
    return SimEstimate(np.zeros(0), est, se, cfg.replications, cfg.seed)


@dataclass(frozen=True)
class GeometricFit:
    statistic: float
    dof: int
    pvalue: float
    mean_index: float
    mean_index_se: float
    expected_mean: float

    def to_dict(self) -> dict:
        return {
            "chi2": self.statistic,
            "dof": self.dof,
            "pvalue": self.pvalue,
            "mean_index": self.mean_index,
            "mean_index_se": self.mean_index_se,
            "expected_mean": self.expected_mean,
        }


def geometric_fit(histogram: dict[int, int], xi: float, min_expected: float = 5.0) -> GeometricFit:
    """Chi-square fit of failure indices to ``P(N = k) = (1 - xi) xi^(k - 2)``, ``k >= 2``.

    Cells with expected count below ``min_expected`` are pooled into one
    upper-tail cell.
    """
    total = sum(histogram.values())
    if total == 0:
        raise ValueError("empty histogram")
    if any(k < 2 for k in histogram):
        raise ValueError("failure indices below 2 are impossible under this law")
    obs, exp = [], []
    k = 2
    while True:
        e = total * (1.0 - xi) * xi ** (k - 2)
        tail = total * xi ** (k - 1)
        if e < min_expected or tail < min_expected:
            break
        obs.append(histogram.get(k, 0))
        exp.append(e)
        k += 1
    obs.append(sum(c for i, c in histogram.items() if i >= k))
    exp.append(total * xi ** (k - 2))
    keys = np.array(sorted(histogram), dtype=float)
    counts = np.array([histogram[int(i)] for i in keys], dtype=float)
    mean = float(np.dot(keys, counts) / total)
    var = float(np.dot((keys - mean) ** 2, counts) / max(total - 1, 1))
    if len(obs) < 2:
        stat, pvalue = 0.0, 1.0
    else:
        stat, pvalue = stats.chisquare(obs, exp)
    return GeometricFit(
        float(stat),
        len(obs) - 1,
        float(pvalue),
        mean,
        math.sqrt(var / total),
        2.0 + xi / (1.0 - xi),
    )


@dataclass(frozen=True)
class ComparisonReport:
    """Empirical system survival next to the truncated analytic reliability.

    ``deviation`` is empirical minus analytic. No pass/fail judgement is made:
    the analytic model does not condition on earlier gaps surviving repair.
    """

    grid: np.ndarray
    analytic: np.ndarray
    empirical: np.ndarray
    std_errors: np.ndarray
    terms: int
    retained_mass: float
    tail_mass: float
    simulation: SimEstimate

    @property
    def deviation(self) -> np.ndarray:
        return self.empirical - self.analytic

    @property
    def max_abs_deviation(self) -> tuple[float, float | None]:
        """Largest ``|deviation|`` and the time where it occurs."""
        if not self.grid.size:
            return 0.0, None
        i = int(np.argmax(np.abs(self.deviation)))
        return float(abs(self.deviation[i])), float(self.grid[i])


def compare_analytic(cfg: SimConfig, tr: Truncation) -> ComparisonReport:
    sim = simulate_parallel2(cfg)
    curve = reliability_curve(RepairableSpec("parallel2", cfg.rates), cfg.time_grid, tr)
    return ComparisonReport(
        grid=curve.grid,
        analytic=curve.values,
        empirical=sim.estimates,
        std_errors=sim.std_errors,
        terms=curve.terms,
        retained_mass=curve.retained.retained_mass,
        tail_mass=curve.tail_mass,
        simulation=sim,
    )

