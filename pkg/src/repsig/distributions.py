"""Exponential, Erlang and Erlang-sum survival functions, and the xi probability.

An Erlang-sum is the law of ``Erlang(k, lam) + Erlang(m, mu)`` with the two
blocks independent, i.e. a chain of ``k + m`` exponential stages. Its survival
is evaluated by partial fractions when that is numerically safe and by a
uniformized stage-chain series otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import accumulate
from typing import Callable

import numpy as np
from scipy import integrate, special

__all__ = [
    "ErlangParams",
    "ErlangSumParams",
    "QuadratureError",
    "Rates",
    "erlang_survival",
    "erlang_sum_survival",
    "xi_exponential",
    "xi_general",
]

# Partial fractions are abandoned once the summed magnitude of the alternating
# terms would leave an absolute rounding error above this level.
_CANCELLATION_BUDGET = 1e-12
_POISSON_TAIL = 1e-16


class QuadratureError(RuntimeError):
    """Raised when an adaptive integral fails to reach its tolerance."""


@dataclass(frozen=True)
class ErlangParams:
    shape: int
    rate: float

    def __post_init__(self):
        if int(self.shape) != self.shape or self.shape < 1:
            raise ValueError(f"Erlang shape must be a positive integer, got {self.shape!r}")
        if not self.rate > 0 or not math.isfinite(self.rate):
            raise ValueError(f"Erlang rate must be positive and finite, got {self.rate!r}")


@dataclass(frozen=True)
class ErlangSumParams:
    """``Erlang(first.shape, first.rate) + Erlang(second_shape, second_rate)``.

    ``second_rate`` is ignored when ``second_shape`` is 0.
    """

    first: ErlangParams
    second_shape: int = 0
    second_rate: float = 1.0

    def __post_init__(self):
        if int(self.second_shape) != self.second_shape or self.second_shape < 0:
            raise ValueError(
                f"second shape must be a nonnegative integer, got {self.second_shape!r}"
            )
        if self.second_shape > 0 and (
            not self.second_rate > 0 or not math.isfinite(self.second_rate)
        ):
            raise ValueError(f"second rate must be positive, got {self.second_rate!r}")

    @classmethod
    def of(cls, k: int, lam: float, m: int = 0, mu: float = 1.0) -> ErlangSumParams:
        return cls(ErlangParams(k, lam), m, mu)


@dataclass(frozen=True)
class Rates:
    """Component failure rate ``lam`` and repair rate ``mu`` (per unit time)."""

    lam: float
    mu: float

    def __post_init__(self):
        for name in ("lam", "mu"):
            value = getattr(self, name)
            if not value > 0 or not math.isfinite(value):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")

    def scaled(self, c: float) -> Rates:
        return Rates(self.lam * c, self.mu * c)


def _check_time(t: float) -> float:
    t = float(t)
    if not t >= 0:
        raise ValueError(f"time must be nonnegative, got {t!r}")
    return t


def _poisson_terms(n: int, x: float) -> list[float]:
    """Poisson(x) probabilities of 0..n-1, each computed in log space."""
    if x == 0.0:
        return [1.0] + [0.0] * (n - 1)
    log_x = math.log(x)
    return [math.exp(i * log_x - x - math.lgamma(i + 1)) for i in range(n)]


def _erlang_cumulative(n: int, x: float) -> list[float]:
    """``[P(Poisson(x) < i) for i in 1..n]``, that is Erlang(i) survivals at ``x / rate``."""
    return [min(v, 1.0) for v in accumulate(_poisson_terms(n, x))]


def _poisson_upper_tail(k: int, x: float) -> float:
    """P(Poisson(x) >= k) by summing terms from k upward; meant for ``x < k``."""
    log_x = math.log(x)
    terms = []
    i = k
    while True:
        term = math.exp(i * log_x - x - math.lgamma(i + 1))
        terms.append(term)
        i += 1
        if term <= 1e-18 * terms[0] or term == 0.0:
            break
    return math.fsum(terms)


def erlang_survival(p: ErlangParams, t: float) -> float:
    """P(Erlang(p.shape, p.rate) > t).

    The Poisson terms are formed in log space, so ``shape * rate * t`` far
    beyond the exponential underflow point is handled. Below the Poisson mode
    the complement of the upper tail is returned, which keeps values near 1
    accurate and monotone.
    """
    t = _check_time(t)
    x = p.rate * t
    if x == 0.0:
        return 1.0
    if x < p.shape:
        return 1.0 - _poisson_upper_tail(p.shape, x)
    return min(math.fsum(_poisson_terms(p.shape, x)), 1.0)


def _partial_fraction_terms(
    k: int, lam: float, m: int, mu: float, t: float
) -> list[float] | None:
    """Signed partial-fraction terms, or None when cancellation would be too lossy."""
    # Laplace-domain expansion of lam^k mu^m / ((s+lam)^k (s+mu)^m): the
    # coefficient on 1/(s+lam)^i integrates to a multiple of Erlang(i, lam)
    # survival, and symmetrically for the mu block.
    log_scale = k * math.log(lam) + m * math.log(mu)
    blocks = []
    log_mags = []
    for own_shape, own_rate, other_shape, other_rate in (
        (k, lam, m, mu),
        (m, mu, k, lam),
    ):
        gap = other_rate - own_rate
        i = np.arange(1, own_shape + 1)
        r = own_shape - i
        power = other_shape + r
        log_binom = (
            special.gammaln(other_shape + r) - special.gammaln(r + 1) - special.gammaln(other_shape)
        )
        log_mags.append(log_scale - i * math.log(own_rate) + log_binom - power * math.log(abs(gap)))
        sign = np.where(r % 2 == 0, 1.0, -1.0) * np.where((gap > 0) | (power % 2 == 0), 1.0, -1.0)
        blocks.append((sign, own_rate, i))
    log_mags = np.concatenate(log_mags)
    rounding = 4 * (k + m) * np.finfo(float).eps
    if special.logsumexp(log_mags) > math.log(_CANCELLATION_BUDGET / rounding):
        return None
    terms = []
    offset = 0
    for sign, rate, i in blocks:
        surv = _erlang_cumulative(i.size, rate * t)
        mags = np.exp(log_mags[offset : offset + i.size])
        terms += list(sign * mags * np.array(surv))
        offset += i.size
    return terms


def _uniformized_survival(k: int, lam: float, m: int, mu: float, t: float) -> float:
    # Sum order does not matter in law; run the faster block first so that the
    # uniformized chain advances with certainty through it.
    (a, fast), (b, slow) = sorted(((k, lam), (m, mu)), key=lambda s: -s[1])
    x = fast * t
    p_advance = slow / fast
    head = erlang_survival(ErlangParams(a, fast), t)
    n_max = int(x + 12.0 * math.sqrt(x) + 40) + a
    while special.pdtrc(n_max, x) > _POISSON_TAIL:
        n_max *= 2
    n = np.arange(a, n_max + 1)
    if x > 0:
        pmf = np.exp(special.xlogy(n, x) - x - special.gammaln(n + 1))
    else:
        pmf = np.zeros_like(n)
    trials = n - a
    stuck = np.ones(n.size)
    tail = trials > b - 1
    stuck[tail] = special.bdtr(b - 1, trials[tail], p_advance)
    return min(head + math.fsum(pmf * stuck), 1.0)


def erlang_sum_survival(p: ErlangSumParams, t: float) -> float:
    """P(Erlang(k, lam) + Erlang(m, mu) > t) with absolute error about 1e-12."""
    t = _check_time(t)
    k, lam = p.first.shape, p.first.rate
    m, mu = p.second_shape, p.second_rate
    if m == 0:
        return erlang_survival(p.first, t)
    if t == 0.0:
        return 1.0
    if lam == mu:
        return erlang_survival(ErlangParams(k + m, lam), t)
    terms = _partial_fraction_terms(k, lam, m, mu, t)
    if terms is not None:
        return min(max(math.fsum(terms), 0.0), 1.0)
    return _uniformized_survival(k, lam, m, mu, t)


def xi_exponential(r: Rates) -> float:
    """P(Exp(lam) outlives an independent Exp(mu) repair) = mu / (lam + mu)."""
    return r.mu / (r.lam + r.mu)


def _validate_monotone(
    lifetime_survival: Callable[[float], float],
    repair_cdf: Callable[[float], float],
) -> None:
    grid = np.concatenate(([0.0], np.geomspace(1e-6, 1e6, 61)))
    s = np.array([lifetime_survival(y) for y in grid], dtype=float)
    g = np.array([repair_cdf(y) for y in grid], dtype=float)
    tol = 1e-12
    if np.any(~np.isfinite(s)) or np.any(s < -tol) or np.any(s > 1 + tol):
        raise ValueError("lifetime survival must take values in [0, 1]")
    if np.any(np.diff(s) > tol):
        raise ValueError("lifetime survival must be nonincreasing")
    if np.any(~np.isfinite(g)) or np.any(g < -tol) or np.any(g > 1 + tol):
        raise ValueError("repair distribution must take values in [0, 1]")
    if np.any(np.diff(g) < -tol):
        raise ValueError("repair distribution must be nondecreasing")


def _quad(f, a, b, epsabs, epsrel):
    value, _, info, *rest = integrate.quad(
        f, a, b, epsabs=epsabs, epsrel=epsrel, limit=200, full_output=1
    )
    if rest:
        raise QuadratureError(f"quadrature on [{a}, {b}] did not converge: {rest[0]}")
    return value


def _quantile(cdf: Callable[[float], float], u: float) -> float:
    """Generalized inverse inf{y >= 0 : cdf(y) >= u} by bracketing and bisection."""
    if cdf(0.0) >= u:
        return 0.0
    lo, hi = 0.0, 1.0
    for _ in range(2100):
        if cdf(hi) >= u:
            break
        lo, hi = hi, hi * 2.0
    else:
        return hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if cdf(mid) >= u:
            hi = mid
        else:
            lo = mid
    return hi


def xi_general(
    lifetime_survival: Callable[[float], float],
    repair_cdf: Callable[[float], float],
    *,
    repair_pdf: Callable[[float], float] | None = None,
    epsabs: float = 1e-10,
) -> float:
    """Probability that a working gap outlives the ongoing repair.

    Computes the Stieltjes integral of ``lifetime_survival`` against the
    repair law ``repair_cdf``.

    Parameters
    ----------
    lifetime_survival : callable
        ``y -> P(T > y)``, nonincreasing on ``[0, inf)``.
    repair_cdf : callable
        ``y -> P(Y <= y)``. Atoms (deterministic repairs) are allowed.
    repair_pdf : callable, optional
        Density of the absolutely continuous part of the repair law. When
        given, the integral is taken against it over dyadic blocks until the
        remaining repair mass drops below 1e-14, plus the atom at zero.
        Otherwise the integral is mapped onto ``[0, 1]`` through the repair
        quantile function, which handles any mix of atoms and densities.

    Returns
    -------
    float
        xi in ``[0, 1]``.

    Raises
    ------
    ValueError
        If either function is out of range or has the wrong monotonicity on a
        sampled grid.
    QuadratureError
        If the adaptive integration does not converge.
    """
    _validate_monotone(lifetime_survival, repair_cdf)
    if repair_pdf is None:
        value = _quad(
            lambda u: lifetime_survival(_quantile(repair_cdf, u)), 0.0, 1.0, epsabs, epsabs
        )
    else:
        value = repair_cdf(0.0) * lifetime_survival(0.0)
        lo, hi = 0.0, 1.0
        while True:
            value += _quad(
                lambda y: lifetime_survival(y) * repair_pdf(y), lo, hi, epsabs, epsabs
            )
            if 1.0 - repair_cdf(hi) < 1e-14:
                break
            if hi > 1e300:
                raise QuadratureError("repair distribution mass does not vanish at infinity")
            lo, hi = hi, hi * 2.0
    return min(max(value, 0.0), 1.0)
